#include "tanhwf/flows.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tanhwf::flows {

namespace {

constexpr double kGuardEps = 1e-12;

inline double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }  // sgn(0) = +1

// log cosh without overflow: |v| + log(1 + e^{-2|v|}) - log 2
inline double log_cosh(double v) {
    const double a = std::abs(v);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

void check_point(const VectorXd& z, const MatrixXd& A) {
    if (z.size() != A.cols())
        throw std::invalid_argument("gradient: z length does not match A");
    if (!z.allFinite())
        throw std::invalid_argument("gradient: non-finite iterate");
}

// The weight statistic divides by sqrt(y) - |a^T z|. Near the singularity the
// analytic limit of every weight is reached by sending the statistic to
// +infinity, so that is what the guard returns. y = 0 gives exactly 0.
inline double weight_statistic(double sqrt_y, double proj) {
    const double denom = sqrt_y - std::abs(proj);
    if (std::abs(denom) < kGuardEps * std::max(sqrt_y, 1.0))
        return std::numeric_limits<double>::infinity();
    return sqrt_y / denom;
}

}  // namespace

std::string rule_name(RuleKind kind) {
    switch (kind) {
        case RuleKind::TanhWFL: return "tanhwfl";
        case RuleKind::TanhWFQ: return "tanhwfq";
        case RuleKind::RTanhWFL: return "rtanhwfl";
        case RuleKind::RTanhWF: return "rtanhwf";
        case RuleKind::TWF: return "twf";
        case RuleKind::LikelihoodOracle: return "likelihood-oracle";
    }
    return "unknown";
}

double tanh_weight(TanhVariant variant, double w) {
    const double a = std::abs(w);
    return variant == TanhVariant::L ? std::tanh(a - 0.5)
                                     : std::tanh(a * a - 0.25);
}

RtanhWeights rtanh_weights(double x_stat, int t, const RtanhParams& params) {
    const double decay = std::exp(-static_cast<double>(t) / params.T);
    const double coef_g = 1.0 - params.w_g * decay;
    const double coef_f = 1.0 - params.w_f * decay;

    RtanhWeights w;
    const double inv = (std::abs(x_stat) > 1.0 / kGuardEps ||
                        std::isinf(x_stat))
                           ? 0.0
                           : 1.0 / x_stat;  // x_stat = 0 gives inv = inf, g -> 1
    const double dev = inv - 1.0;
    w.g = std::tanh(coef_g * dev * dev);
    w.f = std::tanh(coef_f * (std::abs(x_stat) + params.b));
    if (std::isnan(w.g)) w.g = 1.0;  // coef * inf
    if (std::isnan(w.f)) w.f = 1.0;
    return w;
}

VectorXd tanhwf_gradient(TanhVariant variant, const MatrixXd& A,
                         const VectorXd& y, const VectorXd& z) {
    check_point(z, A);
    const Eigen::Index m = A.rows();
    const VectorXd proj = A * z;
    VectorXd coef(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sqy = std::sqrt(y(i));
        const double w = weight_statistic(sqy, proj(i)) - 0.5;
        coef(i) = proj(i) - sgn(proj(i)) * sqy * tanh_weight(variant, w);
    }
    return (2.0 / static_cast<double>(m)) * (A.transpose() * coef);
}

VectorXd rtanhwf_gradient(bool weight_amplitude, const MatrixXd& A,
                          const VectorXd& y, const VectorXd& z, int t,
                          const RtanhParams& params) {
    check_point(z, A);
    if (t < 1) throw std::invalid_argument("rtanhwf_gradient: t must be >= 1");
    const Eigen::Index m = A.rows();
    const VectorXd proj = A * z;
    VectorXd coef(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sqy = std::sqrt(y(i));
        const double x_stat = weight_statistic(sqy, proj(i));
        const RtanhWeights w = rtanh_weights(x_stat, t, params);
        const double f = weight_amplitude ? w.f : 1.0;
        coef(i) = w.g * (proj(i) - sgn(proj(i)) * sqy * f);
    }
    return (2.0 / static_cast<double>(m)) * (A.transpose() * coef);
}

VectorXd twf_gradient(const MatrixXd& A, const VectorXd& y, const VectorXd& z,
                      const TwfParams& params) {
    check_point(z, A);
    const double zn = z.norm();
    if (zn == 0.0) throw std::invalid_argument("twf_gradient: z must be nonzero");
    const Eigen::Index m = A.rows();
    const VectorXd proj = A * z;
    const double k_t =
        (y - proj.array().square().matrix()).array().abs().mean();
    VectorXd coef = VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double ap = std::abs(proj(i));
        const double ratio = ap / zn;
        const bool e1 = params.alpha_z_lb <= ratio && ratio <= params.alpha_z_ub;
        const double resid = proj(i) * proj(i) - y(i);
        const bool e2 = std::abs(resid) <= params.alpha_h * k_t * ratio;
        if (e1 && e2) coef(i) = resid / proj(i);
    }
    return (2.0 / static_cast<double>(m)) * (A.transpose() * coef);
}

double likelihood_target(const MatrixXd& A, const VectorXd& y,
                         const VectorXd& z, double sigma, double x_norm) {
    check_point(z, A);
    if (!(std::abs(sigma) < 1.0))
        throw std::invalid_argument("likelihood_target: |sigma| must be < 1");
    const double om = 1.0 - sigma * sigma;
    const Eigen::Index m = A.rows();
    const VectorXd proj = A * z;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double f = proj(i);
        const double sqy = std::sqrt(y(i));
        sum += sigma * sigma * y(i) / (x_norm * x_norm) + f * f -
               2.0 * om * log_cosh(sigma * f * sqy / (om * x_norm));
    }
    return std::log(std::sqrt(om)) +
           sum / (2.0 * static_cast<double>(m) * om);
}

VectorXd likelihood_gradient(const MatrixXd& A, const VectorXd& y,
                             const VectorXd& z, double sigma, double x_norm) {
    check_point(z, A);
    if (!(std::abs(sigma) < 1.0))
        throw std::invalid_argument("likelihood_gradient: |sigma| must be < 1");
    const double om = 1.0 - sigma * sigma;
    const Eigen::Index m = A.rows();
    const VectorXd proj = A * z;
    VectorXd coef(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sqy = std::sqrt(y(i));
        coef(i) = proj(i) - (sigma * sqy / x_norm) *
                                std::tanh(sigma * proj(i) * sqy / (om * x_norm));
    }
    return (1.0 / (static_cast<double>(m) * om)) * (A.transpose() * coef);
}

double conditional_density(double f, double y_abs, double sigma, double x_norm,
                           double z_norm) {
    if (!(std::abs(sigma) < 1.0))
        throw std::invalid_argument("conditional_density: |sigma| must be < 1");
    if (!(x_norm > 0.0) || !(z_norm > 0.0))
        throw std::invalid_argument("conditional_density: norms must be > 0");
    const double om = 1.0 - sigma * sigma;
    const double quad = sigma * sigma * y_abs * y_abs / (x_norm * x_norm) +
                        f * f / (z_norm * z_norm);
    const double log_p =
        -quad / (2.0 * om) - 0.5 * std::log(2.0 * M_PI * om) -
        std::log(z_norm) +
        log_cosh(sigma * f * y_abs / (om * z_norm * x_norm));
    return std::exp(log_p);
}

VectorXd gradient(const FlowRule& rule, const MatrixXd& A, const VectorXd& y,
                  const VectorXd& z, int t) {
    switch (rule.kind) {
        case RuleKind::TanhWFL:
            return tanhwf_gradient(TanhVariant::L, A, y, z);
        case RuleKind::TanhWFQ:
            return tanhwf_gradient(TanhVariant::Q, A, y, z);
        case RuleKind::RTanhWFL:
            return rtanhwf_gradient(true, A, y, z, t, rule.rtanh);
        case RuleKind::RTanhWF:
            return rtanhwf_gradient(false, A, y, z, t, rule.rtanh);
        case RuleKind::TWF:
            return twf_gradient(A, y, z, rule.twf);
        case RuleKind::LikelihoodOracle:
            return likelihood_gradient(A, y, z, rule.sigma, rule.x_norm);
    }
    throw std::logic_error("gradient: unknown rule kind");
}

}  // namespace tanhwf::flows
