#include "tanhwf/optimizer.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tanhwf::optimizer {

SolveOptions SolveOptions::defaults_for(flows::RuleKind kind) {
    SolveOptions opts;
    if (kind == flows::RuleKind::RTanhWFL || kind == flows::RuleKind::RTanhWF)
        opts.step_size = 0.2;
    return opts;
}

double schedule_coefficient(double w0, int t, double T) {
    if (t < 1) throw std::invalid_argument("schedule_coefficient: t >= 1");
    return 1.0 - w0 * std::exp(-static_cast<double>(t) / T);
}

SolveReport solve(const ProblemInstance& instance, const VectorXd& z0,
                  const GradientFn& grad, const SolveOptions& opts) {
    if (z0.size() != instance.n)
        throw std::invalid_argument("solve: z0 length mismatch");
    if (opts.steps < 1 || opts.record_every < 1)
        throw std::invalid_argument("solve: steps and record_every must be >= 1");
    if (!(opts.momentum >= 0.0 && opts.momentum < 1.0))
        throw std::invalid_argument("solve: momentum must be in [0, 1)");
    if (!(opts.step_size > 0.0))
        throw std::invalid_argument("solve: step_size must be > 0");

    const double z0_norm = std::max(z0.norm(), 1e-300);
    const double mu = opts.momentum;
    const double s = opts.step_size;

    SolveReport report;
    VectorXd z = z0;
    VectorXd v = VectorXd::Zero(instance.n);
    report.min_rel_error = relative_error(z, instance.x).rel_error;

    for (int t = 1; t <= opts.steps; ++t) {
        const VectorXd g = grad(z, t);
        const VectorXd v_next = mu * v - s * g;
        z = z - mu * v + (1.0 + mu) * v_next;
        v = v_next;

        if (!z.allFinite() || z.norm() > 1e6 * z0_norm) {
            report.aborted = true;
            report.iterations_run = t;
            break;
        }
        const double err = relative_error(z, instance.x).rel_error;
        report.min_rel_error = std::min(report.min_rel_error, err);
        if (t % opts.record_every == 0 || t == opts.steps)
            report.trajectory.emplace_back(t, err);
        report.iterations_run = t;
    }

    report.final_z = z;
    report.success =
        !report.aborted && report.min_rel_error < opts.success_threshold;
    return report;
}

SolveReport solve(const ProblemInstance& instance, const VectorXd& z0,
                  const flows::FlowRule& rule, const SolveOptions& opts) {
    // capture only (A, y); the rule never sees instance.x
    const MatrixXd& A = instance.A;
    const VectorXd& y = instance.y;
    return solve(
        instance, z0,
        [&A, &y, &rule](const VectorXd& z, int t) {
            return flows::gradient(rule, A, y, z, t);
        },
        opts);
}

void write_report(const SolveReport& report, std::ostream& os) {
    nlohmann::json j;
    j["success"] = report.success;
    j["aborted"] = report.aborted;
    j["min_rel_error"] = report.min_rel_error;
    j["iterations_run"] = report.iterations_run;
    j["final_z"] = std::vector<double>(
        report.final_z.data(), report.final_z.data() + report.final_z.size());
    auto traj = nlohmann::json::array();
    for (const auto& [it, err] : report.trajectory)
        traj.push_back({{"iteration", it}, {"rel_error", err}});
    j["trajectory"] = std::move(traj);
    os << j.dump(2) << "\n";
}

}  // namespace tanhwf::optimizer
