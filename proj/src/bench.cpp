#include "tanhwf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tanhwf::bench {

namespace {

flows::FlowRule rule_by_name(const std::string& flow) {
    flows::FlowRule rule;
    if (flow == "tanhwfl")
        rule.kind = flows::RuleKind::TanhWFL;
    else if (flow == "tanhwfq")
        rule.kind = flows::RuleKind::TanhWFQ;
    else if (flow == "rtanhwfl")
        rule.kind = flows::RuleKind::RTanhWFL;
    else if (flow == "rtanhwf")
        rule.kind = flows::RuleKind::RTanhWF;
    else if (flow == "twf")
        rule.kind = flows::RuleKind::TWF;
    else
        throw std::invalid_argument("unknown flow rule: " + flow);
    return rule;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

}  // namespace

MethodCombo make_combo(const std::string& flow, const std::string& init_name) {
    MethodCombo combo;
    combo.rule = rule_by_name(flow);
    combo.solve_opts = optimizer::SolveOptions::defaults_for(combo.rule.kind);
    combo.solve_opts.record_every = 10;
    if (init_name == "tanh")
        combo.init_method = init::InitMethod::tanh_spectral();
    else if (init_name == "trunc")
        combo.init_method = init::InitMethod::truncated_spectral();
    else
        throw std::invalid_argument("unknown init method: " + init_name);
    combo.name = flow + "+" + init_name;
    return combo;
}

BenchResult run_bench(const BenchConfig& config) {
    if (config.trials < 1)
        throw std::invalid_argument("run_bench: trials must be >= 1");
    if (config.m_list.empty())
        throw std::invalid_argument("run_bench: m_list must be nonempty");
    if (config.methods.empty())
        throw std::invalid_argument("run_bench: methods must be nonempty");

    struct Job {
        std::size_t method_idx;
        std::size_t m_idx;
        int trial;
    };
    std::vector<Job> jobs;
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
        for (std::size_t ki = 0; ki < config.m_list.size(); ++ki)
            for (int t = 0; t < config.trials; ++t) jobs.push_back({mi, ki, t});

    struct TrialOutcome {
        bool success = false;
        double min_rel_error = std::numeric_limits<double>::infinity();
        double seconds = 0.0;
    };
    std::vector<TrialOutcome> outcomes(jobs.size());

    const auto run_job = [&](const Job& job) {
        const MethodCombo& combo = config.methods[job.method_idx];
        const int m = config.m_list[job.m_idx];
        const std::int64_t seed = config.base_seed + job.trial;
        const auto t0 = std::chrono::steady_clock::now();
        TrialOutcome out;
        try {
            const ProblemInstance inst = make_instance(config.n, m, seed);
            VectorXd z0;
            if (combo.init_override) {
                z0 = combo.init_override(inst);
            } else {
                init::InitMethod im = combo.init_method;
                im.seed = seed;
                z0 = init::spectral_init(inst, im);
            }
            optimizer::SolveOptions opts = combo.solve_opts;
            opts.success_threshold = config.success_threshold;
            const auto report = optimizer::solve(inst, z0, combo.rule, opts);
            out.success = report.success;
            out.min_rel_error = report.min_rel_error;
        } catch (const std::exception&) {
            // per-trial failures never abort the sweep
            out.success = false;
        }
        out.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        return out;
    };

    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j)
            outcomes[j] = run_job(jobs[j]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t j = next.fetch_add(1); j < jobs.size();
                     j = next.fetch_add(1))
                    outcomes[j] = run_job(jobs[j]);
            });
        for (auto& th : pool) th.join();
    }

    BenchResult result;
    result.base_seed = config.base_seed;
    result.config_hash = config_hash(config);
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        for (std::size_t ki = 0; ki < config.m_list.size(); ++ki) {
            BenchRow row;
            row.method = config.methods[mi].name;
            row.m = config.m_list[ki];
            row.n = config.n;
            row.trials = config.trials;
            double err_sum = 0.0, time_sum = 0.0;
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                if (jobs[j].method_idx != mi || jobs[j].m_idx != ki) continue;
                row.successes += outcomes[j].success ? 1 : 0;
                err_sum += std::isfinite(outcomes[j].min_rel_error)
                               ? outcomes[j].min_rel_error
                               : 0.0;
                time_sum += outcomes[j].seconds;
            }
            const double nt = static_cast<double>(row.trials);
            row.success_rate = static_cast<double>(row.successes) / nt;
            row.success_std_error =
                std::sqrt(row.success_rate * (1.0 - row.success_rate) / nt);
            row.mean_min_rel_error = err_sum / nt;
            row.wall_time_s = time_sum;
            result.rows.push_back(std::move(row));
        }
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const BenchRow& a, const BenchRow& b) {
                  return std::tie(a.method, a.m) < std::tie(b.method, b.m);
              });
    return result;
}

InitEvalResult run_init_eval(int n, int m, int trials,
                             const std::vector<init::InitMethod>& methods,
                             std::int64_t base_seed) {
    if (methods.empty())
        throw std::invalid_argument("run_init_eval: empty method list");
    if (trials < 1)
        throw std::invalid_argument("run_init_eval: trials must be >= 1");

    InitEvalResult result;
    result.base_seed = base_seed;
    std::map<std::string, std::vector<InitEvalRow>> per_method;
    for (int trial = 0; trial < trials; ++trial) {
        const std::int64_t seed = base_seed + trial;
        const ProblemInstance inst = make_instance(n, m, seed);
        for (const auto& method : methods) {
            init::InitMethod im = method;
            im.seed = seed;
            const VectorXd z0 = init::spectral_init(inst, im);
            const ErrorStats st = relative_error(z0, inst.x);
            InitEvalRow row{init::method_name(method), trial, st.rel_error,
                            st.correlation};
            result.rows.push_back(row);
            per_method[row.method].push_back(row);
        }
    }
    for (const auto& [name, rows] : per_method) {
        InitEvalSummary s;
        const double nt = static_cast<double>(rows.size());
        for (const auto& r : rows) {
            s.mean_rel_error += r.rel_error / nt;
            s.mean_correlation += r.correlation / nt;
        }
        for (const auto& r : rows) {
            s.var_rel_error +=
                (r.rel_error - s.mean_rel_error) *
                (r.rel_error - s.mean_rel_error) / nt;
            s.var_correlation += (r.correlation - s.mean_correlation) *
                                 (r.correlation - s.mean_correlation) / nt;
        }
        result.summary[name] = s;
    }
    return result;
}

void write_bench_csv(const BenchResult& result, std::ostream& os) {
    os << "# config_hash=" << result.config_hash
       << " base_seed=" << result.base_seed << "\n";
    os << "method,m,n,trials,successes,success_rate,mean_min_rel_error,"
          "success_std_error,wall_time_s\n";
    os.precision(17);
    for (const auto& r : result.rows)
        os << r.method << ',' << r.m << ',' << r.n << ',' << r.trials << ','
           << r.successes << ',' << r.success_rate << ','
           << r.mean_min_rel_error << ',' << r.success_std_error << ','
           << r.wall_time_s << '\n';
}

BenchResult read_bench_csv(std::istream& is) {
    BenchResult result;
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto hpos = line.find("config_hash=");
            const auto spos = line.find("base_seed=");
            if (hpos != std::string::npos)
                result.config_hash =
                    line.substr(hpos + 12, line.find(' ', hpos) - hpos - 12);
            if (spos != std::string::npos)
                result.base_seed = std::stoll(line.substr(spos + 10));
            continue;
        }
        if (line.rfind("method,", 0) == 0) continue;  // header row
        const auto fields = split(line, ',');
        if (fields.size() != 9)
            throw std::runtime_error("bench CSV: malformed row: " + line);
        BenchRow r;
        r.method = fields[0];
        r.m = std::stoi(fields[1]);
        r.n = std::stoi(fields[2]);
        r.trials = std::stoi(fields[3]);
        r.successes = std::stoi(fields[4]);
        r.success_rate = std::stod(fields[5]);
        r.mean_min_rel_error = std::stod(fields[6]);
        r.success_std_error = std::stod(fields[7]);
        r.wall_time_s = std::stod(fields[8]);
        result.rows.push_back(std::move(r));
    }
    return result;
}

void write_init_eval_csv(const InitEvalResult& result, std::ostream& os) {
    os << "# base_seed=" << result.base_seed << "\n";
    os << "method,trial,rel_error,correlation\n";
    os.precision(17);
    for (const auto& r : result.rows)
        os << r.method << ',' << r.trial << ',' << r.rel_error << ','
           << r.correlation << '\n';
}

BenchConfig parse_config(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    BenchConfig config;
    const auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("n")) config.n = std::stoi(*v);
    if (auto v = get("trials")) config.trials = std::stoi(*v);
    if (auto v = get("base_seed")) config.base_seed = std::stoll(*v);
    if (auto v = get("success_threshold"))
        config.success_threshold = std::stod(*v);
    if (auto v = get("threads")) config.threads = std::stoi(*v);
    if (auto v = get("m_list")) {
        for (const auto& tok : split(*v, ','))
            if (!tok.empty()) config.m_list.push_back(std::stoi(tok));
    }
    std::vector<std::string> method_names = {"tanhwfl+tanh"};
    if (auto v = get("methods")) {
        method_names.clear();
        for (const auto& tok : split(*v, ','))
            if (!tok.empty()) method_names.push_back(tok);
    }
    for (const auto& name : method_names) {
        const auto plus = name.find('+');
        if (plus == std::string::npos)
            throw std::runtime_error("config: method must be <flow>+<init>: " +
                                     name);
        MethodCombo combo =
            make_combo(name.substr(0, plus), name.substr(plus + 1));
        const std::string flow = name.substr(0, plus);
        // global and per-flow solver overrides
        const auto override_opt = [&](const std::string& key, auto setter) {
            if (auto v = get(key)) setter(*v);
            if (auto v = get(flow + "." + key)) setter(*v);
        };
        override_opt("steps", [&](const std::string& v) {
            combo.solve_opts.steps = std::stoi(v);
        });
        override_opt("step_size", [&](const std::string& v) {
            combo.solve_opts.step_size = std::stod(v);
        });
        override_opt("momentum", [&](const std::string& v) {
            combo.solve_opts.momentum = std::stod(v);
        });
        override_opt("record_every", [&](const std::string& v) {
            combo.solve_opts.record_every = std::stoi(v);
        });
        override_opt("power_iters", [&](const std::string& v) {
            combo.init_method.power_iters = std::stoi(v);
        });
        config.methods.push_back(std::move(combo));
    }
    if (config.m_list.empty()) config.m_list = {3 * config.n};
    return config;
}

BenchConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(is);
}

std::string config_hash(const BenchConfig& config) {
    std::ostringstream canon;
    canon.precision(17);
    canon << config.n << '|' << config.trials << '|' << config.base_seed << '|'
          << config.success_threshold << '|';
    for (int m : config.m_list) canon << m << ',';
    canon << '|';
    for (const auto& combo : config.methods)
        canon << combo.name << ':' << combo.solve_opts.steps << ':'
              << combo.solve_opts.step_size << ':' << combo.solve_opts.momentum
              << ':' << combo.init_method.power_iters << ';';
    // FNV-1a 64
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon.str()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

}  // namespace tanhwf::bench
