#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "tanhwf/flows.hpp"
#include "tanhwf/problem.hpp"

namespace tanhwf::optimizer {

struct SolveOptions {
    int steps = 1500;
    double step_size = 2e-2;   // 0.2 for the reweighted rules
    double momentum = 0.9;
    double success_threshold = 0.01;
    int record_every = 1;

    static SolveOptions defaults_for(flows::RuleKind kind);
};

struct SolveReport {
    VectorXd final_z;
    std::vector<std::pair<int, double>> trajectory;  // (iteration, rel_error)
    double min_rel_error = 0.0;  // minimum over every iteration, not just
                                 // the recorded ones
    bool success = false;
    bool aborted = false;        // divergence / non-finite iterate
    int iterations_run = 0;
};

// Gradient callback at iterate z and 1-based iteration t.
using GradientFn =
    std::function<VectorXd(const VectorXd& z, int t)>;

// Nesterov accelerated descent:
//   v_t = mu v_{t-1} - s grad(z_{t-1}, t)
//   z_t = z_{t-1} - mu v_{t-1} + (1 + mu) v_t
// Runs exactly opts.steps iterations (success is the minimum error seen, so
// there is no early stop). The gradient callback never sees the true signal;
// the error metric reads it from the instance.
SolveReport solve(const ProblemInstance& instance, const VectorXd& z0,
                  const GradientFn& grad, const SolveOptions& opts);

SolveReport solve(const ProblemInstance& instance, const VectorXd& z0,
                  const flows::FlowRule& rule, const SolveOptions& opts);

// w_t = 1 - w0 e^{-t/T}; strictly increasing in t with range (1 - w0, 1).
double schedule_coefficient(double w0, int t, double T);

// Structured text (JSON) serialization of a report for the CLI.
void write_report(const SolveReport& report, std::ostream& os);

}  // namespace tanhwf::optimizer
