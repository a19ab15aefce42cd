#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tanhwf/problem.hpp"

namespace tanhwf::init {

enum class InitKind { TanhSpectral, TruncatedSpectral };

// Spectral initialization settings. TanhSpectral weights each a_i a_i^T by
// tanh(y_i / (alpha * mean(y))) and keeps only y_i > beta * mean(y);
// TruncatedSpectral uses w_i = y_i on y_i <= alpha_y^2 * mean(y).
struct InitMethod {
    InitKind kind = InitKind::TanhSpectral;
    double alpha = 4.0;    // tanh scale factor
    double beta = 1.0;     // tanh trimming threshold
    double alpha_y = 3.0;  // truncated-baseline trimming threshold
    int power_iters = 100;
    std::int64_t seed = 0;

    static InitMethod tanh_spectral(std::int64_t seed = 0, double alpha = 4.0,
                                    double beta = 1.0, int power_iters = 100);
    static InitMethod truncated_spectral(std::int64_t seed = 0,
                                         double alpha_y = 3.0,
                                         int power_iters = 100);
};

std::string method_name(const InitMethod& method);

// Runs exactly power_iters weighted power steps from a seeded random unit
// vector and returns sqrt(mean(y)) times the final direction. Throws
// std::runtime_error if the trimmed weights are all zero or a power step
// collapses to the zero vector.
VectorXd spectral_init(const ProblemInstance& instance,
                       const InitMethod& method);

struct InitQualityRow {
    std::string method;
    ErrorStats stats;
};

std::vector<InitQualityRow> init_quality_report(
    const ProblemInstance& instance, const std::vector<InitMethod>& methods);

}  // namespace tanhwf::init
