// Command-line front end: success-rate sweeps, init-quality evaluation,
// single solves, and the numerical bounds lab.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "tanhwf/analysis.hpp"
#include "tanhwf/bench.hpp"

namespace {

using namespace tanhwf;

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
    if (path.empty()) return nullptr;
    auto os = std::make_unique<std::ofstream>(path);
    if (!*os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

std::ostream& pick(std::unique_ptr<std::ofstream>& file) {
    return file ? *file : std::cout;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * i / std::max(1, count - 1);
    return v;
}

int run_bench_cmd(const std::string& config_path, const std::string& out_path,
                  std::int64_t seed_override, int threads_override) {
    bench::BenchConfig config = bench::parse_config_file(config_path);
    if (seed_override >= 0) config.base_seed = seed_override;
    if (threads_override > 0) config.threads = threads_override;
    const bench::BenchResult result = bench::run_bench(config);
    auto file = open_out(out_path);
    bench::write_bench_csv(result, pick(file));
    return 0;
}

int run_init_eval_cmd(int n, int m, int trials, std::int64_t seed,
                      const std::string& out_path) {
    const std::vector<init::InitMethod> methods = {
        init::InitMethod::tanh_spectral(),
        init::InitMethod::truncated_spectral()};
    const auto result = bench::run_init_eval(n, m, trials, methods, seed);
    auto file = open_out(out_path);
    bench::write_init_eval_csv(result, pick(file));
    std::ostream& os = pick(file);
    for (const auto& [name, s] : result.summary)
        os << "# " << name << ": mean_rel_error=" << s.mean_rel_error
           << " var_rel_error=" << s.var_rel_error
           << " mean_correlation=" << s.mean_correlation << "\n";
    return 0;
}

int run_solve_cmd(int n, int m, std::int64_t seed, const std::string& flow,
                  const std::string& init_name, const std::string& out_path) {
    bench::MethodCombo combo = bench::make_combo(flow, init_name);
    combo.init_method.seed = seed;
    const ProblemInstance inst = make_instance(n, m, seed);
    const VectorXd z0 = init::spectral_init(inst, combo.init_method);
    const auto report = optimizer::solve(inst, z0, combo.rule, combo.solve_opts);
    auto file = open_out(out_path);
    optimizer::write_report(report, pick(file));
    return report.success ? 0 : 2;
}

int run_contour_cmd(const std::string& out_path, int rho_steps, int cos_steps) {
    const auto grid = analysis::bound_contour(
        linspace(0.01, 1.0, rho_steps), linspace(-0.999, 0.999, cos_steps));
    auto file = open_out(out_path);
    analysis::write_bound_grid_csv(grid, pick(file));
    return 0;
}

int run_bounds_check_cmd(std::int64_t seed, std::int64_t mc_samples) {
    const std::vector<double> rhos = {0.05, 0.3, 0.5, 0.7, 0.95};
    const std::vector<double> coss = {-0.9, -0.4, 0.0, 0.4, 0.9};
    bool ok = true;
    std::cout << "rho,cos_theta,quad,mc,mc_stderr,dyadic,dominated,consistent\n";
    for (double rho : rhos)
        for (double ct : coss) {
            const analysis::GeometryPoint pt{rho, ct};
            const double quad = analysis::curvature_expectation_quad(pt);
            const auto mc =
                analysis::curvature_expectation_mc(pt, mc_samples, seed);
            const double dyadic = analysis::dyadic_upper_bound(pt);
            const bool dominated = dyadic >= quad;
            const bool consistent =
                std::abs(quad - mc.estimate) <= 4.0 * mc.std_error;
            ok = ok && dominated && consistent;
            std::cout << rho << ',' << ct << ',' << quad << ',' << mc.estimate
                      << ',' << mc.std_error << ',' << dyadic << ','
                      << dominated << ',' << consistent << "\n";
        }
    std::cout << (ok ? "bounds-check: OK" : "bounds-check: FAILED") << "\n";
    return ok ? 0 : 2;
}

int run_sup_f_cmd() {
    const auto sup = analysis::sup_case_weight();
    std::cout << "sup_f=" << sup.value << " argmax=" << sup.argmax << "\n";
    return 0;
}

int run_spectral_bounds_cmd(double alpha, double beta, std::int64_t samples,
                            std::int64_t seed) {
    const analysis::SpectralBoundInputs inputs{alpha, beta};
    const double gap_lb = analysis::spectral_gap_lower_bound(inputs);
    const double l1_ub = analysis::spectral_lambda1_upper_bound(alpha);
    const auto mc = analysis::spectral_expectation_mc(inputs, samples, seed);
    std::cout << "gap_lower_bound=" << gap_lb
              << " gap_mc=" << mc.gap.estimate
              << " gap_mc_stderr=" << mc.gap.std_error << "\n"
              << "lambda1_upper_bound=" << l1_ub
              << " lambda1_mc=" << mc.lambda1.estimate
              << " lambda1_mc_stderr=" << mc.lambda1.std_error << "\n";
    const bool ok =
        mc.gap.estimate >= gap_lb - 4.0 * mc.gap.std_error &&
        mc.lambda1.estimate <= l1_ub + 4.0 * mc.lambda1.std_error;
    std::cout << (ok ? "spectral-bounds: OK" : "spectral-bounds: FAILED")
              << "\n";
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tanh-weighted Wirtinger flow toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, flow = "tanhwfl", init_name = "tanh";
    std::int64_t seed = 1, mc_samples = 1000000;
    int n = 200, m = 600, trials = 30, threads = 0;
    int rho_steps = 34, cos_steps = 40;
    double alpha = 4.0, beta = 1.0;
    std::int64_t seed_override = -1;

    auto* bench_cmd = app.add_subcommand("bench", "success-rate sweep");
    bench_cmd->add_option("--config", config_path, "config file")
        ->required()
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--out", out_path, "output CSV (default stdout)");
    bench_cmd->add_option("--seed", seed_override, "override base_seed");
    bench_cmd->add_option("--threads", threads, "worker threads");

    auto* init_cmd = app.add_subcommand("init-eval", "initialization quality");
    init_cmd->add_option("--n", n, "dimension");
    init_cmd->add_option("--m", m, "measurements");
    init_cmd->add_option("--trials", trials, "trial count");
    init_cmd->add_option("--seed", seed, "base seed");
    init_cmd->add_option("--out", out_path, "output CSV (default stdout)");

    auto* solve_cmd = app.add_subcommand("solve", "single instance solve");
    solve_cmd->add_option("--n", n, "dimension");
    solve_cmd->add_option("--m", m, "measurements");
    solve_cmd->add_option("--seed", seed, "instance seed");
    solve_cmd->add_option("--flow", flow,
                          "tanhwfl|tanhwfq|rtanhwfl|rtanhwf|twf");
    solve_cmd->add_option("--init", init_name, "tanh|trunc");
    solve_cmd->add_option("--out", out_path, "report JSON (default stdout)");

    auto* contour_cmd =
        app.add_subcommand("contour", "dyadic bound contour CSV");
    contour_cmd->add_option("--out", out_path, "output CSV (default stdout)");
    contour_cmd->add_option("--rho-steps", rho_steps, "rho axis points");
    contour_cmd->add_option("--cos-steps", cos_steps, "cos axis points");

    auto* bounds_cmd =
        app.add_subcommand("bounds-check", "validation grid cross-check");
    bounds_cmd->add_option("--seed", seed, "MC seed");
    bounds_cmd->add_option("--samples", mc_samples, "MC sample count");

    app.add_subcommand("sup-f", "supremum of the curvature case weight");

    auto* spectral_cmd =
        app.add_subcommand("spectral-bounds", "spectral bound cross-check");
    spectral_cmd->add_option("--alpha", alpha, "tanh scale");
    spectral_cmd->add_option("--beta", beta, "trimming threshold");
    spectral_cmd->add_option("--samples", mc_samples, "MC sample count");
    spectral_cmd->add_option("--seed", seed, "MC seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("bench"))
            return run_bench_cmd(config_path, out_path, seed_override, threads);
        if (app.got_subcommand("init-eval"))
            return run_init_eval_cmd(n, m, trials, seed, out_path);
        if (app.got_subcommand("solve"))
            return run_solve_cmd(n, m, seed, flow, init_name, out_path);
        if (app.got_subcommand("contour"))
            return run_contour_cmd(out_path, rho_steps, cos_steps);
        if (app.got_subcommand("bounds-check"))
            return run_bounds_check_cmd(seed, mc_samples);
        if (app.got_subcommand("sup-f")) return run_sup_f_cmd();
        if (app.got_subcommand("spectral-bounds"))
            return run_spectral_bounds_cmd(alpha, beta, mc_samples, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
