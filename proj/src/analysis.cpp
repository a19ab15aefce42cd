#include "tanhwf/analysis.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace tanhwf::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

// 1 - tanh(v) and 1 + tanh(v) without cancellation for large |v|
inline double one_minus_tanh(double v) { return 2.0 / (std::exp(2.0 * v) + 1.0); }
inline double one_plus_tanh(double v) { return one_minus_tanh(-v); }

inline double sech2(double v) {
    const double e = std::exp(-2.0 * std::abs(v));
    const double s = 2.0 * std::sqrt(e) / (1.0 + e);
    return s * s;
}

struct GslFn {
    const std::function<double(double)>* fn;
};

double gsl_trampoline(double x, void* params) {
    return (*static_cast<GslFn*>(params)->fn)(x);
}

double integrate(const std::function<double(double)>& fn, double lo, double hi,
                 double epsabs) {
    static thread_local gsl_integration_workspace* ws =
        gsl_integration_workspace_alloc(4000);
    GslFn wrapped{&fn};
    gsl_function f;
    f.function = &gsl_trampoline;
    f.params = &wrapped;
    double result = 0.0, abserr = 0.0;
    const int status = gsl_integration_qag(&f, lo, hi, epsabs, 1e-10, 4000,
                                           GSL_INTEG_GAUSS61, ws, &result,
                                           &abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw std::runtime_error("quadrature failed to converge (gsl status " +
                                 std::to_string(status) + ")");
    return result;
}

struct GslInit {
    GslInit() { gsl_set_error_handler_off(); }
};
const GslInit gsl_init_once;

}  // namespace

void validate(const GeometryPoint& pt) {
    if (!(pt.rho > 0.0 && pt.rho <= 1.0))
        throw std::invalid_argument("GeometryPoint: rho must be in (0, 1]");
    if (!(pt.cos_theta > -1.0 && pt.cos_theta < 1.0))
        throw std::invalid_argument(
            "GeometryPoint: cos_theta must be strictly inside (-1, 1)");
}

double marginal_density_u(double u, const GeometryPoint& pt) {
    validate(pt);
    const double s2 = 1.0 - pt.cos_theta * pt.cos_theta;
    const double d = u * pt.rho - pt.cos_theta;
    return pt.rho * std::sqrt(s2) / (kPi * (d * d + s2));
}

double joint_density_ut(double u, double t, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& h) {
    const double hn2 = h.squaredNorm();
    const double xn2 = x.squaredNorm();
    const double xh = x.dot(h);
    const double disc = xn2 * hn2 - xh * xh;
    if (!(hn2 > 0.0))
        throw std::invalid_argument("joint_density_ut: |h| must be > 0");
    if (!(disc > 0.0))
        throw std::invalid_argument(
            "joint_density_ut: x and h must not be collinear");
    const double hn = std::sqrt(hn2);
    const double num = u * hn - xh / hn;
    const double q = num * num / disc + 1.0 / hn2;
    return std::exp(-q * t * t / 2.0) * std::abs(t) /
           (2.0 * kPi * std::sqrt(disc));
}

double case_weight_f(double u) {
    if (!std::isfinite(u)) return 0.0;
    if (u < 0.0 || u > 1.0) {
        return one_minus_tanh(u * u - u) * u;
    }
    const double d = u - 0.5;
    if (d == 0.0) return 1.0;  // interior limit: argument -> -inf
    const double arg = 0.25 - 1.0 / (16.0 * d * d);
    return one_minus_tanh(arg) * u;
}

SupResult sup_case_weight() {
    // coarse scan; f vanishes fast outside [-2, 3]
    double best_u = 0.0, best_f = 0.0;
    for (double u = -4.0; u <= 4.0; u += 1e-4) {
        const double f = case_weight_f(u);
        if (f > best_f) {
            best_f = f;
            best_u = u;
        }
    }
    // golden-section refinement around the best grid cell
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_u - 2e-4, b = best_u + 2e-4;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    while (b - a > 1e-12) {
        if (case_weight_f(c) > case_weight_f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    SupResult r;
    r.argmax = (a + b) / 2.0;
    r.value = case_weight_f(r.argmax);
    return r;
}

double curvature_expectation_quad(const GeometryPoint& pt) {
    validate(pt);
    const double c = pt.cos_theta;
    const double rho = pt.rho;
    const double s = std::sqrt(1.0 - c * c);

    // Substituting a = (u rho - c)/s and a = tan(phi) turns the squared-Cauchy
    // kernel into (2/pi) cos^2(phi) on (-pi/2, pi/2).
    const auto integrand = [&](double phi) {
        const double cp = std::cos(phi);
        const double u = (c + s * std::tan(phi)) / rho;
        return case_weight_f(u) * cp * cp;
    };
    const auto phi_of_u = [&](double u) { return std::atan((u * rho - c) / s); };

    std::vector<double> pts = {-kPi / 2.0, phi_of_u(0.0), phi_of_u(0.5),
                               phi_of_u(1.0), kPi / 2.0};
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        total += integrate(integrand, pts[k], pts[k + 1], 2.5e-9);
    return 2.0 / kPi * total;
}

McEstimate curvature_expectation_mc(const GeometryPoint& pt, std::int64_t N,
                                    std::int64_t seed) {
    validate(pt);
    if (N < 1000)
        throw std::invalid_argument("curvature_expectation_mc: N must be >= 1000");
    const double c = pt.cos_theta;
    const double rho = pt.rho;
    const double s = std::sqrt(1.0 - c * c);

    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);

    double sum = 0.0, sum2 = 0.0;
    for (std::int64_t i = 0; i < N; ++i) {
        const double z1 = gauss(rng);
        const double z2 = gauss(rng);
        const double t = rho * z1;        // a^T h,  |x| = 1, |h| = rho
        const double sx = c * z1 + s * z2;  // a^T x
        const double xi = (t == 0.0) ? 0.0 : t * t * case_weight_f(sx / t);
        sum += xi;
        sum2 += xi * xi;
    }
    const double nd = static_cast<double>(N);
    const double mean = sum / nd;
    const double var = std::max(0.0, sum2 / nd - mean * mean);
    McEstimate est;
    est.estimate = mean / (rho * rho);
    est.std_error = std::sqrt(var / nd) / (rho * rho);
    return est;
}

namespace {

// antiderivative of the squared-Cauchy kernel in the a variable
inline double kernel_cdf(double a) { return a / (1.0 + a * a) + std::atan(a); }

}  // namespace

double dyadic_upper_bound(const GeometryPoint& pt, int n_min, int n_max) {
    validate(pt);
    if (!(n_min <= 0 && 0 <= n_max))
        throw std::invalid_argument("dyadic_upper_bound: need n_min <= 0 <= n_max");
    const double c = pt.cos_theta;
    const double rho = pt.rho;
    const double s = std::sqrt(1.0 - c * c);
    const auto a_of_u = [&](double u) { return (u * rho - c) / s; };
    // kernel mass of [lo, hi] (the per-interval integral has this closed form)
    const auto mass = [&](double lo, double hi) {
        return (kernel_cdf(a_of_u(hi)) - kernel_cdf(a_of_u(lo))) / kPi;
    };

    double bound = 0.0;

    // u > 1: u_n = (1 + sqrt(2^{n+2} + 1))/2, f <= (1 - tanh 2^{n-1}) u_n
    const auto u_plus = [](int n) {
        return (1.0 + std::sqrt(std::exp2(n + 2) + 1.0)) / 2.0;
    };
    for (int n = n_min; n <= n_max; ++n)
        bound += one_minus_tanh(std::exp2(n - 1)) * u_plus(n) *
                 mass(u_plus(n - 1), u_plus(n));
    // closed-form tail for the intervals below n_min (u in (1, u_{n_min-1}]),
    // where f(u) <= u <= u_{n_min-1}
    bound += u_plus(n_min - 1) * mass(1.0, u_plus(n_min - 1));
    // intervals above n_max decay like e^{-2^n} and are dropped

    // u < 0: u_n = (1 - sqrt(2^{n+2} + 1))/2, f <= (1 - tanh 2^n) u_{n-1}
    const auto u_minus = [](int n) {
        return (1.0 - std::sqrt(std::exp2(n + 2) + 1.0)) / 2.0;
    };
    for (int n = n_min; n <= n_max; ++n)
        bound += one_minus_tanh(std::exp2(n)) * u_minus(n - 1) *
                 mass(u_minus(n), u_minus(n - 1));
    // both truncated u < 0 tails have f <= 0; omitting them keeps the bound

    // 0 < u < 1/2: u_n = 1/2 - 1/(2 sqrt(1 + 2^{n+2})), f <= (1 + tanh 2^n) u_n
    const auto u_left = [](int n) {
        return 0.5 - 0.5 / std::sqrt(1.0 + std::exp2(n + 2));
    };
    for (int n = n_min; n <= n_max; ++n)
        bound += one_plus_tanh(std::exp2(n)) * u_left(n) *
                 mass(u_left(n - 1), u_left(n));
    // truncation caps so the interior slivers stay covered:
    // (0, u_{n_min-1}] with f <= (1 + tanh 2^{n_min-1}) u, and
    // [u_{n_max}, 1/2] with f <= 2u <= 1
    bound += one_plus_tanh(std::exp2(n_min - 1)) * u_left(n_min - 1) *
             mass(0.0, u_left(n_min - 1));
    bound += 1.0 * mass(u_left(n_max), 0.5);

    // 1/2 < u < 1: u_n = 1/2 + 1/(2 sqrt(1 + 2^{n+2})), f <= (1 + tanh 2^n) u_{n-1}
    const auto u_right = [](int n) {
        return 0.5 + 0.5 / std::sqrt(1.0 + std::exp2(n + 2));
    };
    for (int n = n_min; n <= n_max; ++n)
        bound += one_plus_tanh(std::exp2(n)) * u_right(n - 1) *
                 mass(u_right(n), u_right(n - 1));
    // caps: [1/2, u_{n_max}] with f <= 2 u_{n_max}, and [u_{n_min-1}, 1)
    // with f <= (1 + tanh 2^{n_min}) u <= (1 + tanh 2^{n_min})
    bound += 2.0 * u_right(n_max) * mass(0.5, u_right(n_max));
    bound += one_plus_tanh(std::exp2(n_min)) * mass(u_right(n_min - 1), 1.0);

    return bound;
}

BoundGrid bound_contour(const std::vector<double>& rho_axis,
                        const std::vector<double>& cos_axis, int n_min,
                        int n_max) {
    if (rho_axis.empty() || cos_axis.empty())
        throw std::invalid_argument("bound_contour: empty axis");
    if (!std::is_sorted(rho_axis.begin(), rho_axis.end()) ||
        !std::is_sorted(cos_axis.begin(), cos_axis.end()))
        throw std::invalid_argument("bound_contour: axes must be ascending");
    for (double r : rho_axis)
        if (!(r >= 0.01 && r <= 1.0))
            throw std::invalid_argument("bound_contour: rho outside [0.01, 1]");
    for (double ct : cos_axis)
        if (!(ct >= -0.999 && ct <= 0.999))
            throw std::invalid_argument(
                "bound_contour: cos_theta outside [-0.999, 0.999]");

    BoundGrid grid;
    grid.rho_axis = rho_axis;
    grid.cos_axis = cos_axis;
    grid.n_min = n_min;
    grid.n_max = n_max;
    grid.values.resize(rho_axis.size());
    for (std::size_t i = 0; i < rho_axis.size(); ++i) {
        grid.values[i].resize(cos_axis.size());
        for (std::size_t j = 0; j < cos_axis.size(); ++j)
            grid.values[i][j] =
                dyadic_upper_bound({rho_axis[i], cos_axis[j]}, n_min, n_max) -
                1.0;
    }
    return grid;
}

void write_bound_grid_csv(const BoundGrid& grid, std::ostream& os) {
    os << "rho,cos_theta,bound_minus_one\n";
    os.precision(12);
    for (std::size_t i = 0; i < grid.rho_axis.size(); ++i)
        for (std::size_t j = 0; j < grid.cos_axis.size(); ++j)
            os << grid.rho_axis[i] << ',' << grid.cos_axis[j] << ','
               << grid.values[i][j] << '\n';
}

ProcessDerivatives process_derivatives(double x_var, double t, double rho) {
    const double x = x_var;
    ProcessDerivatives d;
    const double r2 = rho * rho;
    if (x < 0.0 || x > 1.0) {
        const double g = x * x - x;
        const double th = std::tanh(g);
        const double s2 = sech2(g);
        const double q = 2.0 * x - 1.0;
        d.d1 = t * r2 * (x * (1.0 - th) + (2.0 * x * x * x - x * x) * s2);
        d.d2 = r2 * 2.0 * x * x * x * s2 * (q * q * th - 1.0);
    } else {
        const double dd = x - 0.5;
        const double q = 2.0 * x - 1.0;
        double th, s2, gp, gpp;  // tanh G, sech^2 G, G', G''
        if (dd == 0.0) {
            th = -1.0;
            s2 = 0.0;
            gp = 0.0;
            gpp = 0.0;
        } else {
            const double G = 0.25 - 1.0 / (16.0 * dd * dd);
            th = std::tanh(G);
            s2 = sech2(G);
            gp = 1.0 / (q * q * q);
            gpp = -6.0 / (q * q * q * q);
        }
        d.d1 = t * r2 * (x * (1.0 - th) + x * x * s2 * gp);
        d.d2 = r2 * (x * x * x * s2 * (2.0 * th * gp * gp - gpp));
    }
    return d;
}

double spectral_gap_lower_bound(const SpectralBoundInputs& inputs) {
    if (!(inputs.alpha > 0.0))
        throw std::invalid_argument("spectral_gap_lower_bound: alpha > 0");
    const double a = inputs.alpha, b = inputs.beta;
    return b * std::exp(-b * b / 2.0) / std::sqrt(2.0 * kPi) *
           (1.0 - std::exp(-b * b / a) * std::pow(a / (2.0 + a), 1.5));
}

double spectral_lambda1_upper_bound(double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("spectral_lambda1_upper_bound: alpha > 0");
    return 1.0 - std::pow(alpha / (4.0 + alpha), 1.5);
}

SpectralMcResult spectral_expectation_mc(const SpectralBoundInputs& inputs,
                                         std::int64_t N, std::int64_t seed) {
    if (N < 10000)
        throw std::invalid_argument("spectral_expectation_mc: N must be >= 1e4");
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double gs = 0.0, gs2 = 0.0, ls = 0.0, ls2 = 0.0;
    for (std::int64_t i = 0; i < N; ++i) {
        // r has density r e^{-r^2/2}, phi is uniform on [0, 2 pi)
        const double r = std::sqrt(-2.0 * std::log1p(-unif(rng)));
        const double phi = 2.0 * kPi * unif(rng);
        const double cp = std::cos(phi);
        const double sp = std::sin(phi);
        const double rc = r * cp;
        double g = 0.0, l = 0.0;
        if (std::abs(rc) > inputs.beta) {
            const double w = std::tanh(rc * rc / inputs.alpha);
            g = r * r * (cp * cp - sp * sp) * w;
            l = rc * rc * w;
        }
        gs += g;
        gs2 += g * g;
        ls += l;
        ls2 += l * l;
    }
    const double nd = static_cast<double>(N);
    SpectralMcResult res;
    res.gap.estimate = gs / nd;
    res.gap.std_error =
        std::sqrt(std::max(0.0, gs2 / nd - res.gap.estimate * res.gap.estimate) /
                  nd);
    res.lambda1.estimate = ls / nd;
    res.lambda1.std_error = std::sqrt(
        std::max(0.0, ls2 / nd - res.lambda1.estimate * res.lambda1.estimate) /
        nd);
    return res;
}

}  // namespace tanhwf::analysis
