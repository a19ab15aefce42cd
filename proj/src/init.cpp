#include "tanhwf/init.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tanhwf::init {

InitMethod InitMethod::tanh_spectral(std::int64_t seed, double alpha,
                                     double beta, int power_iters) {
    InitMethod m;
    m.kind = InitKind::TanhSpectral;
    m.alpha = alpha;
    m.beta = beta;
    m.power_iters = power_iters;
    m.seed = seed;
    return m;
}

InitMethod InitMethod::truncated_spectral(std::int64_t seed, double alpha_y,
                                          int power_iters) {
    InitMethod m;
    m.kind = InitKind::TruncatedSpectral;
    m.alpha_y = alpha_y;
    m.power_iters = power_iters;
    m.seed = seed;
    return m;
}

std::string method_name(const InitMethod& method) {
    return method.kind == InitKind::TanhSpectral ? "tanh-spectral"
                                                 : "truncated-spectral";
}

VectorXd spectral_init(const ProblemInstance& instance,
                       const InitMethod& method) {
    if (method.power_iters < 1)
        throw std::invalid_argument("spectral_init: power_iters must be >= 1");
    if (method.kind == InitKind::TanhSpectral && !(method.alpha > 0.0))
        throw std::invalid_argument("spectral_init: alpha must be > 0");

    const int m = instance.m;
    const double y_mean = instance.y.mean();

    // per-measurement weights of the trimmed spectral matrix
    VectorXd w(m);
    for (int i = 0; i < m; ++i) {
        const double yi = instance.y(i);
        if (method.kind == InitKind::TanhSpectral) {
            w(i) = (yi > method.beta * y_mean)
                       ? std::tanh(yi / (method.alpha * y_mean))
                       : 0.0;
        } else {
            w(i) = (yi <= method.alpha_y * method.alpha_y * y_mean) ? yi : 0.0;
        }
    }
    if (w.isZero(0.0))
        throw std::runtime_error(
            "spectral_init: degenerate spectrum, all weights trimmed to zero");

    std::mt19937_64 rng(static_cast<std::uint64_t>(method.seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXd z(instance.n);
    for (int j = 0; j < instance.n; ++j) z(j) = gauss(rng);
    z.normalize();

    // z <- (1/m) sum_i w_i a_i (a_i^T z), then renormalize. The 1/m scale is
    // irrelevant after normalization; it only keeps intermediates tame.
    for (int it = 0; it < method.power_iters; ++it) {
        const VectorXd proj = instance.A * z;
        z = instance.A.transpose() * proj.cwiseProduct(w) /
            static_cast<double>(m);
        const double zn = z.norm();
        if (zn == 0.0 || !z.allFinite())
            throw std::runtime_error(
                "spectral_init: degenerate spectrum, power step vanished");
        z /= zn;
    }
    return std::sqrt(y_mean) * z;
}

std::vector<InitQualityRow> init_quality_report(
    const ProblemInstance& instance, const std::vector<InitMethod>& methods) {
    if (methods.empty())
        throw std::invalid_argument("init_quality_report: empty method list");
    std::vector<InitQualityRow> rows;
    rows.reserve(methods.size());
    for (const auto& method : methods) {
        const VectorXd z0 = spectral_init(instance, method);
        rows.push_back({method_name(method), relative_error(z0, instance.x)});
    }
    return rows;
}

}  // namespace tanhwf::init
