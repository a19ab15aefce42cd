#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "tanhwf/flows.hpp"
#include "tanhwf/problem.hpp"

using namespace tanhwf;
using flows::FlowRule;
using flows::RuleKind;
using flows::TanhVariant;

namespace {

// single-measurement instance a=[1], x=[2]
ProblemInstance scalar_instance() {
    ProblemInstance inst;
    inst.n = 1;
    inst.m = 1;
    inst.x = VectorXd::Constant(1, 2.0);
    inst.A = MatrixXd::Constant(1, 1, 1.0);
    inst.y = VectorXd::Constant(1, 4.0);
    return inst;
}

const std::vector<FlowRule> solver_rules() {
    std::vector<FlowRule> rules(5);
    rules[0].kind = RuleKind::TanhWFL;
    rules[1].kind = RuleKind::TanhWFQ;
    rules[2].kind = RuleKind::RTanhWFL;
    rules[3].kind = RuleKind::RTanhWF;
    rules[4].kind = RuleKind::TWF;
    return rules;
}

}  // namespace

TEST_CASE("tanh_weight hand values") {
    CHECK(flows::tanh_weight(TanhVariant::L, 0.5) == doctest::Approx(0.0));
    CHECK(flows::tanh_weight(TanhVariant::Q, 0.5) == doctest::Approx(0.0));
    CHECK(flows::tanh_weight(TanhVariant::Q, 1.5) ==
          doctest::Approx(std::tanh(2.0)).epsilon(1e-12));
    CHECK(std::tanh(2.0) == doctest::Approx(0.96403).epsilon(1e-4));
}

TEST_CASE("tanh_weight is even and bounded") {
    for (double w : {0.0, 0.3, 0.5, 1.0, 2.5, 40.0}) {
        for (auto v : {TanhVariant::L, TanhVariant::Q}) {
            const double p = flows::tanh_weight(v, w);
            CHECK(p == flows::tanh_weight(v, -w));
            CHECK(p > -1.0);
            CHECK(p <= 1.0);  // rounds to 1.0 for huge w
        }
        CHECK(flows::tanh_weight(TanhVariant::L, w) > -std::tanh(0.5) - 1e-15);
    }
    // monotone in |w| past the zero crossing
    CHECK(flows::tanh_weight(TanhVariant::L, 0.6) <
          flows::tanh_weight(TanhVariant::L, 0.9));
    CHECK(flows::tanh_weight(TanhVariant::Q, 0.6) <
          flows::tanh_weight(TanhVariant::Q, 0.9));
}

TEST_CASE("tanhwf_gradient hand value") {
    const ProblemInstance inst = scalar_instance();
    const VectorXd z = VectorXd::Constant(1, 1.0);
    // w = 2/(2-1) - 1/2 = 1.5, weight tanh(1), grad = 2 (1 - 2 tanh 1)
    const double expected = 2.0 * (1.0 - 2.0 * std::tanh(1.0));
    const VectorXd g = flows::tanhwf_gradient(TanhVariant::L, inst.A, inst.y, z);
    CHECK(g(0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(-1.04637).epsilon(1e-4));
}

TEST_CASE("rtanh_weights hand values") {
    flows::RtanhParams params;
    CHECK(flows::rtanh_weights(1.0, 1, params).g == doctest::Approx(0.0));
    CHECK(flows::rtanh_weights(1.0, 5000, params).g == doctest::Approx(0.0));

    // decayed schedule: coefficients are exactly 1
    const int t_inf = 2000000000;
    CHECK(flows::rtanh_weights(1.0, t_inf, params).f ==
          doctest::Approx(std::tanh(1.25)).epsilon(1e-12));
    CHECK(std::tanh(1.25) == doctest::Approx(0.84828).epsilon(1e-4));

    const double g = flows::rtanh_weights(2.0, 1200, params).g;
    CHECK(g == doctest::Approx(std::tanh((1.0 - std::exp(-1.0)) * 0.25))
                   .epsilon(1e-12));
    CHECK(g == doctest::Approx(0.15673).epsilon(1e-3));
}

TEST_CASE("rtanh_weights stay in [0, 1) and handle the guard limits") {
    flows::RtanhParams params;
    for (double x_stat :
         {0.0, 0.3, 1.0, 2.0, 50.0, -1.5,
          std::numeric_limits<double>::infinity()}) {
        for (int t : {1, 100, 1200, 100000}) {
            const auto w = flows::rtanh_weights(x_stat, t, params);
            CHECK(w.f >= 0.0);
            CHECK(w.f <= 1.0);
            CHECK(w.g >= 0.0);
            CHECK(w.g <= 1.0);
        }
    }
    // singular-measurement limit: 1/x_stat -> 0
    const auto w = flows::rtanh_weights(
        std::numeric_limits<double>::infinity(), 2000000000, params);
    CHECK(w.g == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
    CHECK(w.f == doctest::Approx(1.0));
    // y = 0 measurement: x_stat = 0, f depends only on the bias
    const auto w0 = flows::rtanh_weights(0.0, 2000000000, params);
    CHECK(w0.f == doctest::Approx(std::tanh(params.b)).epsilon(1e-12));
    CHECK(w0.g == doctest::Approx(1.0));
}

TEST_CASE("rtanhwf_gradient hand values") {
    const ProblemInstance inst = scalar_instance();
    const VectorXd z = VectorXd::Constant(1, 1.0);
    flows::RtanhParams params;
    const int t_inf = 2000000000;
    // x_stat = 2, g = tanh(0.25), f = tanh(2.25)
    const double g_w = std::tanh(0.25);
    const double f_w = std::tanh(2.25);

    const VectorXd gl =
        flows::rtanhwf_gradient(true, inst.A, inst.y, z, t_inf, params);
    CHECK(gl(0) == doctest::Approx(2.0 * g_w * (1.0 - 2.0 * f_w))
                       .epsilon(1e-12));

    const VectorXd gf =
        flows::rtanhwf_gradient(false, inst.A, inst.y, z, t_inf, params);
    CHECK(gf(0) == doctest::Approx(-2.0 * g_w).epsilon(1e-12));

    CHECK_THROWS_AS(
        flows::rtanhwf_gradient(true, inst.A, inst.y, z, 0, params),
        std::invalid_argument);
}

TEST_CASE("twf_gradient hand values and truncation events") {
    const ProblemInstance inst = scalar_instance();
    flows::TwfParams params;

    VectorXd z = VectorXd::Constant(1, 1.0);
    // K = 3, both events hold: grad = 2 (1 - 4) / 1 = -6
    CHECK(flows::twf_gradient(inst.A, inst.y, z, params)(0) ==
          doctest::Approx(-6.0).epsilon(1e-12));

    z(0) = 0.2;
    CHECK(flows::twf_gradient(inst.A, inst.y, z, params)(0) ==
          doctest::Approx(-39.6).epsilon(1e-12));

    flows::TwfParams tight = params;
    tight.alpha_h = 0.5;  // residual event fails, term dropped
    CHECK(flows::twf_gradient(inst.A, inst.y, z, tight)(0) ==
          doctest::Approx(0.0));

    CHECK_THROWS_AS(
        flows::twf_gradient(inst.A, inst.y, VectorXd::Zero(1), params),
        std::invalid_argument);
}

TEST_CASE("every solver rule vanishes at the signal") {
    for (int seed = 0; seed < 5; ++seed) {
        const ProblemInstance inst = make_instance(20, 60, seed);
        for (const auto& rule : solver_rules()) {
            for (double s : {1.0, -1.0}) {
                const VectorXd g =
                    flows::gradient(rule, inst.A, inst.y, (s * inst.x).eval(), 3);
                CHECK(g.norm() <= 1e-9 * inst.x.norm());
            }
        }
    }
}

TEST_CASE("gradients are 1-homogeneous in joint signal/iterate scaling") {
    const ProblemInstance inst = make_instance(12, 40, 5);
    const VectorXd z = make_instance(12, 40, 6).x;
    for (double c : {0.5, 2.0, 3.0}) {
        ProblemInstance scaled = inst;
        scaled.x = c * inst.x;
        scaled.y = c * c * inst.y;
        for (auto rule : solver_rules()) {
            const VectorXd g = flows::gradient(rule, inst.A, inst.y, z, 7);
            const VectorXd gc =
                flows::gradient(rule, scaled.A, scaled.y, (c * z).eval(), 7);
            CHECK((gc - c * g).norm() <= 1e-9 * std::max(1.0, (c * g).norm()));
        }
        // the oracle rule is pinned to unit-sphere iterates and is not
        // 1-homogeneous; it is invariant under signal-only rescaling instead
        FlowRule oracle;
        oracle.kind = RuleKind::LikelihoodOracle;
        oracle.sigma = 0.4;
        oracle.x_norm = inst.x.norm();
        const VectorXd g = flows::gradient(oracle, inst.A, inst.y, z, 1);
        oracle.x_norm = c * inst.x.norm();
        const VectorXd gc = flows::gradient(oracle, scaled.A, scaled.y, z, 1);
        CHECK((gc - g).norm() <= 1e-9 * std::max(1.0, g.norm()));
    }
}

TEST_CASE("likelihood target collapses at sigma = 0") {
    const ProblemInstance inst = make_instance(4, 10, 11);
    const VectorXd z = make_instance(4, 10, 12).x;
    const double val = flows::likelihood_target(inst.A, inst.y, z, 0.0, 1.0);
    const VectorXd proj = inst.A * z;
    CHECK(val == doctest::Approx(proj.squaredNorm() / (2.0 * inst.m))
                     .epsilon(1e-12));
    CHECK(flows::likelihood_target(inst.A, inst.y, VectorXd::Zero(4), 0.0,
                                   1.0) == doctest::Approx(0.0));

    const VectorXd g = flows::likelihood_gradient(inst.A, inst.y, z, 0.0, 1.0);
    const VectorXd expected = inst.A.transpose() * proj / inst.m;
    CHECK((g - expected).norm() < 1e-12);

    CHECK_THROWS_AS(flows::likelihood_target(inst.A, inst.y, z, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(flows::likelihood_gradient(inst.A, inst.y, z, -1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("likelihood target matches a long-double re-evaluation") {
    // tiny data, no overflow: direct naive formula in extended precision
    const ProblemInstance inst = make_instance(2, 3, 21);
    const VectorXd z = 0.7 * make_instance(2, 3, 22).x;
    const double sigma = 0.6, xn = 1.0;
    const long double om = 1.0L - (long double)sigma * sigma;
    long double sum = 0.0L;
    for (int i = 0; i < inst.m; ++i) {
        const long double f = inst.A.row(i).dot(z);
        const long double sqy = std::sqrt((long double)inst.y(i));
        sum += (long double)sigma * sigma * inst.y(i) / (xn * xn) + f * f -
               2.0L * om * std::log(std::cosh(sigma * f * sqy / (om * xn)));
    }
    const long double ref = std::log(std::sqrt(om)) + sum / (2.0L * 3 * om);
    const double val = flows::likelihood_target(inst.A, inst.y, z, sigma, xn);
    CHECK(val == doctest::Approx((double)ref).epsilon(1e-12));
}

TEST_CASE("likelihood gradient matches finite differences") {
    const ProblemInstance inst = make_instance(5, 20, 33);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(-0.9, 0.9);
    for (int rep = 0; rep < 10; ++rep) {
        VectorXd z(5);
        for (int j = 0; j < 5; ++j) z(j) = gauss(rng);
        const double sigma = unif(rng);
        const VectorXd g =
            flows::likelihood_gradient(inst.A, inst.y, z, sigma, 1.0);
        const double h = 1e-6;
        VectorXd fd(5);
        for (int j = 0; j < 5; ++j) {
            VectorXd zp = z, zm = z;
            zp(j) += h;
            zm(j) -= h;
            fd(j) = (flows::likelihood_target(inst.A, inst.y, zp, sigma, 1.0) -
                     flows::likelihood_target(inst.A, inst.y, zm, sigma, 1.0)) /
                    (2.0 * h);
        }
        CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
}

TEST_CASE("likelihood gradient stays finite near sigma = 1") {
    const ProblemInstance inst = make_instance(6, 15, 44);
    const VectorXd g = flows::likelihood_gradient(inst.A, inst.y, inst.x,
                                                  1.0 - 1e-6, 1.0);
    CHECK(g.allFinite());
}

TEST_CASE("conditional density basics") {
    // sigma = 0: Gaussian in f
    for (double f : {0.0, 0.5, -1.7}) {
        const double p = flows::conditional_density(f, 1.3, 0.0, 1.0, 2.0);
        const double ref = std::exp(-f * f / 8.0) / (std::sqrt(2.0 * M_PI) * 2.0);
        CHECK(p == doctest::Approx(ref).epsilon(1e-12));
    }
    // even in f
    CHECK(flows::conditional_density(0.8, 1.3, 0.7, 1.0, 1.0) ==
          flows::conditional_density(-0.8, 1.3, 0.7, 1.0, 1.0));

    // normalizes over f (Simpson on a wide bracket)
    const int steps = 40000;
    const double lo = -12.0, hi = 12.0, h = (hi - lo) / steps;
    double integral = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double f = lo + k * h;
        const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        integral += w * flows::conditional_density(f, 1.3, 0.7, 1.0, 1.0);
    }
    integral *= h / 3.0;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(flows::conditional_density(0.0, 1.0, 1.0, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(flows::conditional_density(0.0, 1.0, 0.5, 0.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("gradient dispatcher rejects bad iterates") {
    const ProblemInstance inst = make_instance(4, 8, 50);
    VectorXd bad = inst.x;
    bad(0) = std::numeric_limits<double>::quiet_NaN();
    FlowRule rule;
    CHECK_THROWS_AS(flows::gradient(rule, inst.A, inst.y, bad, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        flows::gradient(rule, inst.A, inst.y, VectorXd::Zero(3), 1),
        std::invalid_argument);
}
