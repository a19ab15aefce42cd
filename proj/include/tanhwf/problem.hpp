#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace tanhwf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// A noiseless quadratic-measurement problem: y_i = (a_i^T x)^2 with
// Gaussian rows a_i. Immutable after construction.
struct ProblemInstance {
    int n = 0;
    int m = 0;
    VectorXd x;      // true signal, length n
    MatrixXd A;      // m x n design, rows a_i
    VectorXd y;      // measurements, length m, all >= 0
    std::int64_t seed = 0;
    double signal_norm = 1.0;
};

// Recovery metrics for an estimate z against the true signal x.
// The sign ambiguity z ~ -z is resolved by aligned_sign; h = s*z - x is the
// error of the sign-aligned iterate.
struct ErrorStats {
    double rel_error = 0.0;    // min(|z-x|, |z+x|) / |x|
    double correlation = 0.0;  // x^T h / (|x| |h|); 0 by convention if exact
    int aligned_sign = 1;      // +1 or -1, +1 on ties
    bool exact = false;        // h == 0
};

// Elementwise square of A*x.
VectorXd observe(const MatrixXd& A, const VectorXd& x);

// x uniform on the sphere of radius signal_norm, A iid standard normal,
// y = (A x)^2. Deterministic for a fixed seed.
ProblemInstance make_instance(int n, int m, std::int64_t seed,
                              double signal_norm = 1.0);

ErrorStats relative_error(const VectorXd& z, const VectorXd& x);

// Binary container for reproduction archives: fixed header
// (magic, n, m, seed, signal_norm) followed by x, A (row-major), y as
// little-endian doubles.
void save_instance(const ProblemInstance& inst, std::ostream& os);
ProblemInstance load_instance(std::istream& is);
void save_instance_file(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance_file(const std::string& path);

}  // namespace tanhwf
