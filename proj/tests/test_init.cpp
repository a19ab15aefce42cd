#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tanhwf/init.hpp"

using namespace tanhwf;

TEST_CASE("spectral_init solves the 2x2 one-spike case by hand") {
    // y = [1, 0], mean 0.5; only the first measurement survives trimming, so
    // the weighted matrix is tanh(0.5) e1 e1^T and the output is sqrt(0.5) e1
    // up to sign.
    ProblemInstance inst;
    inst.n = 2;
    inst.m = 2;
    inst.A = MatrixXd::Identity(2, 2);
    inst.x = VectorXd::Zero(2);
    inst.x(0) = 1.0;
    inst.y = VectorXd::Zero(2);
    inst.y(0) = 1.0;

    const VectorXd z0 = init::spectral_init(inst, init::InitMethod::tanh_spectral());
    CHECK(std::abs(z0(0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(std::abs(z0(1)) <= 1e-12);
    CHECK(std::abs(z0(0)) == doctest::Approx(0.70711).epsilon(1e-4));
}

TEST_CASE("spectral_init output norm and determinism") {
    const ProblemInstance inst = make_instance(40, 120, 8);
    const double y_mean = inst.y.mean();
    for (const auto& method : {init::InitMethod::tanh_spectral(3),
                               init::InitMethod::truncated_spectral(3)}) {
        const VectorXd a = init::spectral_init(inst, method);
        const VectorXd b = init::spectral_init(inst, method);
        CHECK(a == b);
        CHECK(a.norm() == doctest::Approx(std::sqrt(y_mean)).epsilon(1e-9));
    }
}

TEST_CASE("spectral_init is scale equivariant") {
    const double c = 2.0;
    const ProblemInstance base = make_instance(30, 90, 5, 1.0);
    const ProblemInstance scaled = make_instance(30, 90, 5, c);
    REQUIRE((scaled.x - c * base.x).norm() < 1e-12);

    const auto method = init::InitMethod::tanh_spectral(17);
    const VectorXd z1 = init::spectral_init(base, method);
    const VectorXd z2 = init::spectral_init(scaled, method);
    CHECK((z1.normalized() - z2.normalized()).norm() < 1e-9);
    CHECK(z2.norm() == doctest::Approx(c * z1.norm()).epsilon(1e-9));
}

TEST_CASE("spectral_init rejects fully trimmed weights") {
    const ProblemInstance inst = make_instance(10, 30, 2);
    auto method = init::InitMethod::tanh_spectral();
    method.beta = 1e9;  // trims everything
    CHECK_THROWS_AS(init::spectral_init(inst, method), std::runtime_error);

    auto trunc = init::InitMethod::truncated_spectral();
    trunc.alpha_y = 0.0;
    CHECK_THROWS_AS(init::spectral_init(inst, trunc), std::runtime_error);
}

TEST_CASE("init_quality_report shapes and determinism") {
    const ProblemInstance inst = make_instance(25, 75, 14);
    const std::vector<init::InitMethod> methods = {
        init::InitMethod::tanh_spectral(1), init::InitMethod::tanh_spectral(1),
        init::InitMethod::truncated_spectral(1)};
    const auto rows = init::init_quality_report(inst, methods);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].method == "tanh-spectral");
    CHECK(rows[2].method == "truncated-spectral");
    CHECK(rows[0].stats.rel_error == rows[1].stats.rel_error);
    CHECK(rows[0].stats.correlation == rows[1].stats.correlation);
    CHECK_THROWS_AS(init::init_quality_report(inst, {}), std::invalid_argument);
}

TEST_CASE("tanh init lands in the expected error band at m/n = 2") {
    double err_sum = 0.0;
    const int trials = 30;
    for (int t = 0; t < trials; ++t) {
        const ProblemInstance inst = make_instance(500, 1000, 300 + t);
        auto method = init::InitMethod::tanh_spectral(300 + t);
        const VectorXd z0 = init::spectral_init(inst, method);
        err_sum += relative_error(z0, inst.x).rel_error;
    }
    const double mean_err = err_sum / trials;
    CHECK(mean_err >= 0.80);
    CHECK(mean_err <= 1.05);
}
