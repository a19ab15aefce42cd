#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tanhwf/init.hpp"
#include "tanhwf/optimizer.hpp"

namespace tanhwf::bench {

// A named (init, flow, solve options) combination.
struct MethodCombo {
    std::string name;
    init::InitMethod init_method;
    flows::FlowRule rule;
    optimizer::SolveOptions solve_opts;
    // test hook: replaces spectral_init when set (e.g. oracle z0 = x)
    std::function<VectorXd(const ProblemInstance&)> init_override;
};

// Registry lookup: flow in {tanhwfl, tanhwfq, rtanhwfl, rtanhwf, twf},
// init in {tanh, trunc}. Name becomes "<flow>+<init>".
MethodCombo make_combo(const std::string& flow, const std::string& init_name);

struct BenchConfig {
    int n = 200;
    std::vector<int> m_list;
    std::vector<MethodCombo> methods;
    int trials = 50;
    std::int64_t base_seed = 1;
    double success_threshold = 0.01;
    int threads = 1;
};

struct BenchRow {
    std::string method;
    int m = 0;
    int n = 0;
    int trials = 0;
    int successes = 0;
    double success_rate = 0.0;
    double success_std_error = 0.0;  // binomial
    double mean_min_rel_error = 0.0;
    double wall_time_s = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;  // sorted by (method, m)
    std::int64_t base_seed = 0;
    std::string config_hash;
};

// Trial seeds are base_seed + trial_index; the same trial index yields the
// same instance for every method at a given m. Per-trial failures (divergence,
// degenerate init) count as unsuccessful and never abort the sweep.
BenchResult run_bench(const BenchConfig& config);

struct InitEvalRow {
    std::string method;
    int trial = 0;
    double rel_error = 0.0;
    double correlation = 0.0;
};

struct InitEvalSummary {
    double mean_rel_error = 0.0;
    double var_rel_error = 0.0;
    double mean_correlation = 0.0;
    double var_correlation = 0.0;
};

struct InitEvalResult {
    std::vector<InitEvalRow> rows;
    std::map<std::string, InitEvalSummary> summary;
    std::int64_t base_seed = 0;
};

InitEvalResult run_init_eval(int n, int m, int trials,
                             const std::vector<init::InitMethod>& methods,
                             std::int64_t base_seed);

// CSV with a leading "# config_hash=... base_seed=..." comment line.
void write_bench_csv(const BenchResult& result, std::ostream& os);
BenchResult read_bench_csv(std::istream& is);
void write_init_eval_csv(const InitEvalResult& result, std::ostream& os);

// Flat key-value config file ("key = value", '#' comments). See README for
// the schema.
BenchConfig parse_config(std::istream& is);
BenchConfig parse_config_file(const std::string& path);

std::string config_hash(const BenchConfig& config);

}  // namespace tanhwf::bench
