#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tanhwf::analysis {

// Error geometry of an iterate: rho = |h|/|x|, cos_theta = x^T h / (|x||h|),
// where h is the sign-aligned error vector.
struct GeometryPoint {
    double rho = 0.5;
    double cos_theta = 0.0;
};

void validate(const GeometryPoint& pt);

// p(u) for u = a^T x / a^T h: a Cauchy density with location
// cos_theta / rho and scale sqrt(1 - cos_theta^2) / rho.
double marginal_density_u(double u, const GeometryPoint& pt);

// Joint density of (u, t) = (a^T x / a^T h, a^T h) for general x, h.
double joint_density_ut(double u, double t, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& h);

// The curvature case weight:
//   f(u) = (1 - tanh(u^2 - u)) u                      for u > 1 or u < 0
//   f(u) = (1 - tanh(1/4 - 1/(16 (u - 1/2)^2))) u     for 0 <= u <= 1
// Continuous on all of R, with f(1/2) = 1 by the interior limit.
double case_weight_f(double u);

struct SupResult {
    double value = 0.0;
    double argmax = 0.0;
};

// Global supremum of case_weight_f (dense grid plus golden-section
// refinement); approximately 1.31 near u = 0.68.
SupResult sup_case_weight();

// E(X)/|h|^2 = int f(u) K(u; rho, cos_theta) du with the squared-Cauchy
// kernel of unit mass. Adaptive quadrature split at the branch seams
// {0, 1/2, 1}; absolute tolerance 1e-8.
double curvature_expectation_quad(const GeometryPoint& pt);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Independent Monte-Carlo route for the same quantity: samples
// (t, s) = (a^T h, a^T x) as correlated Gaussians and averages t^2 f(s/t),
// normalized by |h|^2.
McEstimate curvature_expectation_mc(const GeometryPoint& pt, std::int64_t N,
                                    std::int64_t seed);

// Dyadic-decomposition upper bound for E(X)/|h|^2: four branch families of
// per-interval bounds summed over n in [n_min, n_max], a closed-form tail
// for the u > 1 intervals below n_min, and small closed-form caps for the
// interior slivers the +-n_max truncation would otherwise drop (keeps the
// result a true upper bound at any truncation depth).
double dyadic_upper_bound(const GeometryPoint& pt, int n_min = -20,
                          int n_max = 20);

struct BoundGrid {
    std::vector<double> rho_axis;
    std::vector<double> cos_axis;
    // values[i][j] = dyadic_upper_bound({rho_axis[i], cos_axis[j]}) - 1
    std::vector<std::vector<double>> values;
    int n_min = -20;
    int n_max = 20;
};

BoundGrid bound_contour(const std::vector<double>& rho_axis,
                        const std::vector<double>& cos_axis, int n_min = -20,
                        int n_max = 20);

// CSV rows "rho,cos_theta,bound_minus_one".
void write_bound_grid_csv(const BoundGrid& grid, std::ostream& os);

struct ProcessDerivatives {
    double d1 = 0.0;  // dX/dt of X(t) = rho^2 t^2 f(s/(t rho)) at fixed s
    double d2 = 0.0;  // d^2X/dt^2
};

// Case-defined derivative formulas; x_var is the appendix-local ratio
// s/(t rho).
ProcessDerivatives process_derivatives(double x_var, double t, double rho);

struct SpectralBoundInputs {
    double alpha = 4.0;
    double beta = 1.0;
};

// Closed-form lower bound for the eigengap of the expected tanh-weighted
// spectral matrix: beta e^{-beta^2/2}/sqrt(2 pi) (1 - e^{-beta^2/alpha}
// (alpha/(2+alpha))^{3/2}).
double spectral_gap_lower_bound(const SpectralBoundInputs& inputs);

// Closed-form upper bound for its largest eigenvalue:
// 1 - (alpha/(4+alpha))^{3/2}.
double spectral_lambda1_upper_bound(double alpha);

struct SpectralMcResult {
    McEstimate gap;
    McEstimate lambda1;
};

// Monte-Carlo estimates of the trimmed spectral integrands via the polar 2D
// reduction; the closed forms above bracket these up to sampling noise.
SpectralMcResult spectral_expectation_mc(const SpectralBoundInputs& inputs,
                                         std::int64_t N, std::int64_t seed);

}  // namespace tanhwf::analysis
