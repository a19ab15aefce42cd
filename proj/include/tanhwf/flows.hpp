#pragma once

#include <Eigen/Dense>
#include <string>

namespace tanhwf::flows {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Gradient rules only ever see (A, y, z) -- never the true signal.

enum class TanhVariant { L, Q };

struct RtanhParams {
    double T = 1200.0;  // exponential decay of the schedule
    double w_f = 0.9;
    double w_g = 1.0;
    double b = 0.25;
};

struct TwfParams {
    double alpha_z_lb = 0.3;
    double alpha_z_ub = 5.0;
    double alpha_h = 5.0;
};

enum class RuleKind { TanhWFL, TanhWFQ, RTanhWFL, RTanhWF, TWF, LikelihoodOracle };

struct FlowRule {
    RuleKind kind = RuleKind::TanhWFL;
    RtanhParams rtanh;
    TwfParams twf;
    // sigma-oracle parameters (LikelihoodOracle only)
    double sigma = 0.0;
    double x_norm = 1.0;
};

std::string rule_name(RuleKind kind);

// tanh(|w| - 1/2) for L, tanh(w^2 - 1/4) for Q. Total and even in w.
double tanh_weight(TanhVariant variant, double w);

// Per-measurement schedule weights of the reweighted flow at 1-based step t:
//   g = tanh((1 - w_g e^{-t/T}) |1/x_stat - 1|^2)
//   f = tanh((1 - w_f e^{-t/T}) (|x_stat| + b))
// x_stat = sqrt(y)/(sqrt(y) - |a^T z|); the singular point sqrt(y) = |a^T z|
// is handled by its continuous limit (f -> 1, g's 1/x_stat -> 0).
struct RtanhWeights {
    double f = 0.0;
    double g = 0.0;
};
RtanhWeights rtanh_weights(double x_stat, int t, const RtanhParams& params);

VectorXd tanhwf_gradient(TanhVariant variant, const MatrixXd& A,
                         const VectorXd& y, const VectorXd& z);

VectorXd rtanhwf_gradient(bool weight_amplitude,  // false => f == 1 (RTanhWF)
                          const MatrixXd& A, const VectorXd& y,
                          const VectorXd& z, int t, const RtanhParams& params);

VectorXd twf_gradient(const MatrixXd& A, const VectorXd& y, const VectorXd& z,
                      const TwfParams& params);

// Conditional-likelihood objective and its gradient for a known correlation
// sigma between z and the signal. Validation oracle, not a solver rule.
double likelihood_target(const MatrixXd& A, const VectorXd& y,
                         const VectorXd& z, double sigma, double x_norm);
VectorXd likelihood_gradient(const MatrixXd& A, const VectorXd& y,
                             const VectorXd& z, double sigma, double x_norm);

// Density of f = a^T z conditioned on the observed amplitude |y| = |a^T x|,
// given the correlation sigma and the two norms. Evaluated in log space.
double conditional_density(double f, double y_abs, double sigma, double x_norm,
                           double z_norm);

// Dispatch a rule at 1-based iteration t (t only matters for the
// reweighted rules).
VectorXd gradient(const FlowRule& rule, const MatrixXd& A, const VectorXd& y,
                  const VectorXd& z, int t);

}  // namespace tanhwf::flows
