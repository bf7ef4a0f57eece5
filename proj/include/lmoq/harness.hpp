#pragma once

#include "levy.hpp"
#include "mlp.hpp"
#include "optim.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lmoq {

enum class TargetMode { minmax, raw };

struct RunConfig {
    std::vector<OptimizerKind> optimizers{std::begin(all_optimizer_kinds),
                                          std::end(all_optimizer_kinds)};
    std::size_t memory = 16;
    long k_max = 10000;
    double epsilon = 1e-6;
    int trials = 50;
    std::uint64_t base_seed = 0;
    int n_samples = 1000;
    int hidden_units = 50;
    ThetaRecurrence theta_form = ThetaRecurrence::corrected;
    TargetMode targets = TargetMode::minmax;
    std::filesystem::path out_dir;  // empty: keep everything in memory
    unsigned jobs = 0;              // 0: hardware concurrency

    void validate() const {
        if (optimizers.empty())
            throw std::invalid_argument("RunConfig: no optimizer selected");
        if (trials < 1)
            throw std::invalid_argument("RunConfig: trials must be positive");
        if (n_samples < 1)
            throw std::invalid_argument("RunConfig: samples must be positive");
        if (hidden_units < 1)
            throw std::invalid_argument("RunConfig: hidden units must be positive");
        optimizer_config().validate();
    }

    OptimizerConfig optimizer_config() const {
        OptimizerConfig c;
        c.memory = memory;
        c.k_max = k_max;
        c.epsilon = epsilon;
        c.theta_form = theta_form;
        return c;
    }

    Network network() const { return Network({5, hidden_units, 1}); }

    std::uint64_t trial_seed(int trial) const { return base_seed + std::uint64_t(trial); }
};

// Independent stream for weight initialization derived from the trial seed.
inline std::uint64_t init_seed(std::uint64_t trial_seed) {
    std::uint64_t z = trial_seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Inputs shared by every optimizer within one trial.
struct TrialInputs {
    Dataset data;
    ParamVector w0;

    std::uint64_t hash() const {
        std::uint64_t h = fingerprint(w0.data(), std::size_t(w0.size()));
        h = fingerprint(data.inputs.data(), std::size_t(data.inputs.size()), h);
        return fingerprint(data.targets.data(), std::size_t(data.targets.size()), h);
    }
};

inline TrialInputs make_trial_inputs(const RunConfig& config, int trial) {
    const std::uint64_t seed = config.trial_seed(trial);
    LevySpec spec;
    spec.n_samples = config.n_samples;
    spec.seed = seed;
    TrialInputs in{generate_dataset(spec), config.network().init_params(init_seed(seed))};
    if (config.targets == TargetMode::minmax)
        minmax_scale_targets(in.data);
    return in;
}

struct TrialRecord {
    OptimizerKind optimizer;
    int trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t input_hash = 0;
    RunResult result;
};

struct MethodSummary {
    std::string method;
    double final_value = 0.0;
    double iters = 0.0;
    double fev = 0.0;
    double gev = 0.0;
    double time_s = 0.0;
    int trials = 0;
    int diverged = 0;

    bool operator==(const MethodSummary&) const = default;
};

struct TrialSummary {
    std::string method;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string input_hash;
    std::string status;
    double final_value = 0.0;
    long iters = 0;
    long fev = 0;
    long gev = 0;
    double time_s = 0.0;

    bool operator==(const TrialSummary&) const = default;
};

struct BenchmarkSummary {
    std::string run_id;
    nlohmann::json config;
    std::vector<MethodSummary> methods;
    std::vector<TrialSummary> trials;

    bool operator==(const BenchmarkSummary&) const = default;
};

inline void to_json(nlohmann::json& j, const MethodSummary& m) {
    j = {{"method", m.method}, {"E", m.final_value}, {"iters", m.iters}, {"fev", m.fev},
         {"gev", m.gev},       {"time_s", m.time_s}, {"trials", m.trials},
         {"diverged", m.diverged}};
}
inline void from_json(const nlohmann::json& j, MethodSummary& m) {
    j.at("method").get_to(m.method);
    j.at("E").get_to(m.final_value);
    j.at("iters").get_to(m.iters);
    j.at("fev").get_to(m.fev);
    j.at("gev").get_to(m.gev);
    j.at("time_s").get_to(m.time_s);
    j.at("trials").get_to(m.trials);
    j.at("diverged").get_to(m.diverged);
}
inline void to_json(nlohmann::json& j, const TrialSummary& t) {
    j = {{"method", t.method}, {"trial", t.trial},   {"seed", t.seed},
         {"input_hash", t.input_hash}, {"status", t.status}, {"E", t.final_value},
         {"iters", t.iters},   {"fev", t.fev},       {"gev", t.gev},
         {"time_s", t.time_s}};
}
inline void from_json(const nlohmann::json& j, TrialSummary& t) {
    j.at("method").get_to(t.method);
    j.at("trial").get_to(t.trial);
    j.at("seed").get_to(t.seed);
    j.at("input_hash").get_to(t.input_hash);
    j.at("status").get_to(t.status);
    j.at("E").get_to(t.final_value);
    j.at("iters").get_to(t.iters);
    j.at("fev").get_to(t.fev);
    j.at("gev").get_to(t.gev);
    j.at("time_s").get_to(t.time_s);
}
inline void to_json(nlohmann::json& j, const BenchmarkSummary& s) {
    j = {{"run_id", s.run_id}, {"config", s.config}, {"methods", s.methods}, {"trials", s.trials}};
}
inline void from_json(const nlohmann::json& j, BenchmarkSummary& s) {
    j.at("run_id").get_to(s.run_id);
    s.config = j.at("config");
    j.at("methods").get_to(s.methods);
    j.at("trials").get_to(s.trials);
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline nlohmann::json config_echo(const RunConfig& c) {
    const OptimizerConfig oc = c.optimizer_config();
    nlohmann::json opts = nlohmann::json::array();
    for (OptimizerKind k : c.optimizers)
        opts.push_back(std::string(to_string(k)));
    return {
        {"optimizers", opts},
        {"memory", c.memory},
        {"k_max", c.k_max},
        {"epsilon", c.epsilon},
        {"trials", c.trials},
        {"seed", c.base_seed},
        {"samples", c.n_samples},
        {"hidden", c.hidden_units},
        {"network", c.network().layer_sizes()},
        {"parameters", c.network().parameter_count()},
        {"theta_recurrence", c.theta_form == ThetaRecurrence::corrected ? "corrected" : "literal"},
        {"gamma", oc.gamma},
        {"mu_cap", oc.mu_cap},
        {"armijo_c", oc.line_search.armijo_c},
        {"backtrack_factor", oc.line_search.backtrack_factor},
        {"alpha_init", oc.line_search.alpha_init},
        {"max_backtracks", oc.line_search.max_backtracks},
        {"loss", "mse_half"},
        {"targets", c.targets == TargetMode::minmax ? "minmax" : "raw"},
    };
}

inline std::string run_id(const nlohmann::json& echo) {
    const std::string text = echo.dump();
    return hex64(fnv1a({reinterpret_cast<const unsigned char*>(text.data()), text.size()}));
}

/// Trace rows as CSV: k,E,grad_norm,fev,gev,elapsed_ms
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    os << "k,E,grad_norm,fev,gev,elapsed_ms\n";
    char buf[160];
    for (const TraceRow& r : trace) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%ld,%ld,%.3f\n", r.k, r.value, r.grad_norm,
                      r.fev, r.gev, r.elapsed_ms);
        os << buf;
    }
}

inline std::string trace_filename(OptimizerKind kind, int trial) {
    return "trace_" + std::string(to_string(kind)) + "_trial" + std::to_string(trial) + ".csv";
}

struct CurvePoint {
    long k;
    double mean_value;
    int running;  // trials whose trace reaches k
};

/// Mean E per iteration across the records of one optimizer. Beyond the end
/// of a shorter trace the mean covers only the trials still running.
inline std::vector<CurvePoint> export_curve(const std::vector<TrialRecord>& records,
                                            OptimizerKind kind) {
    std::vector<const TrialRecord*> mine;
    for (const TrialRecord& r : records)
        if (r.optimizer == kind)
            mine.push_back(&r);
    if (mine.empty())
        throw std::invalid_argument("export_curve: no records for " +
                                    std::string(to_string(kind)));
    std::size_t len = 0;
    for (const TrialRecord* r : mine)
        len = std::max(len, r->result.trace.size());
    std::vector<CurvePoint> curve;
    curve.reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
        double sum = 0.0;
        int count = 0;
        for (const TrialRecord* r : mine) {
            if (k < r->result.trace.size()) {
                sum += r->result.trace[k].value;
                ++count;
            }
        }
        curve.push_back({long(k), sum / count, count});
    }
    return curve;
}

inline void write_curve(std::ostream& os, const std::vector<CurvePoint>& curve) {
    os << "# k mean_E\n";
    char buf[64];
    for (const CurvePoint& p : curve) {
        std::snprintf(buf, sizeof buf, "%ld %.17g\n", p.k, p.mean_value);
        os << buf;
    }
}

inline BenchmarkSummary summarize(const RunConfig& config, const std::vector<TrialRecord>& records) {
    BenchmarkSummary s;
    s.config = config_echo(config);
    s.run_id = run_id(s.config);
    for (OptimizerKind kind : config.optimizers) {
        MethodSummary m;
        m.method = std::string(display_name(kind));
        for (const TrialRecord& r : records) {
            if (r.optimizer != kind)
                continue;
            const RunSummary& rs = r.result.summary;
            m.final_value += rs.final_value;
            m.iters += double(rs.iters);
            m.fev += double(rs.fev);
            m.gev += double(rs.gev);
            m.time_s += rs.wall_seconds;
            ++m.trials;
            if (rs.status == RunStatus::diverged)
                ++m.diverged;
        }
        if (m.trials > 0) {
            m.final_value /= m.trials;
            m.iters /= m.trials;
            m.fev /= m.trials;
            m.gev /= m.trials;
            m.time_s /= m.trials;
        }
        s.methods.push_back(m);
    }
    for (const TrialRecord& r : records) {
        const RunSummary& rs = r.result.summary;
        s.trials.push_back({std::string(display_name(r.optimizer)), r.trial, r.seed,
                            hex64(r.input_hash), std::string(to_string(rs.status)),
                            rs.final_value, rs.iters, rs.fev, rs.gev, rs.wall_seconds});
    }
    return s;
}

struct BenchmarkResult {
    std::vector<TrialRecord> records;  // ordered by (trial, optimizer)
    BenchmarkSummary summary;
    std::vector<std::string> io_errors;

    bool any_diverged() const {
        return std::any_of(records.begin(), records.end(), [](const TrialRecord& r) {
            return r.result.summary.status == RunStatus::diverged;
        });
    }
};

/// Runs every selected optimizer on every trial. Trial t uses seed
/// base_seed + t for both the dataset and the initial weights, so all
/// optimizers in a trial start from identical inputs.
inline BenchmarkResult run_benchmark(const RunConfig& config) {
    config.validate();
    const Network net = config.network();
    const OptimizerConfig oc = config.optimizer_config();
    const std::size_t n_opt = config.optimizers.size();
    const std::size_t n_jobs = std::size_t(config.trials) * n_opt;

    BenchmarkResult out;
    out.records.resize(n_jobs);
    std::mutex err_mu;
    const bool write = !config.out_dir.empty();
    if (write)
        std::filesystem::create_directories(config.out_dir);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < n_jobs; j = next++) {
            const int trial = int(j / n_opt);
            const OptimizerKind kind = config.optimizers[j % n_opt];
            const TrialInputs in = make_trial_inputs(config, trial);
            const MlpObjective objective{&net, &in.data};
            TrialRecord& rec = out.records[j];
            rec.optimizer = kind;
            rec.trial = trial;
            rec.seed = config.trial_seed(trial);
            rec.input_hash = in.hash();
            rec.result = run(kind, objective, in.w0, oc);
            if (write) {
                const auto path = config.out_dir / trace_filename(kind, trial);
                std::ofstream os(path);
                write_trace_csv(os, rec.result.trace);
                if (!os) {
                    std::lock_guard lock(err_mu);
                    out.io_errors.push_back("failed to write " + path.string());
                }
            }
        }
    };

    unsigned threads = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
    threads = unsigned(std::min<std::size_t>(threads, n_jobs));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < threads; ++i)
            pool.emplace_back(worker);
        worker();
    }

    out.summary = summarize(config, out.records);
    if (write) {
        for (OptimizerKind kind : config.optimizers) {
            const auto path = config.out_dir / ("curve_" + std::string(to_string(kind)) + ".dat");
            std::ofstream os(path);
            write_curve(os, export_curve(out.records, kind));
            if (!os)
                out.io_errors.push_back("failed to write " + path.string());
        }
        const auto path = config.out_dir / "summary.json";
        std::ofstream os(path);
        os << nlohmann::json(out.summary).dump(2) << '\n';
        if (!os)
            out.io_errors.push_back("failed to write " + path.string());
    }
    return out;
}

struct QuadraticSmokeResult {
    double max_deviation = 0.0;  // max_k |w_k(L-MoQ) - w_k(L-NAQ)|_inf / max(1, |w_k|_inf)
    long iterations = 0;
    long gev_lnaq = 0;
    long gev_lmoq = 0;
};

/// Runs L-NAQ and L-MoQ side by side on a random SPD quadratic; on an affine
/// gradient the two directions coincide.
inline QuadraticSmokeResult quadratic_smoke(Eigen::Index d = 20, long iterations = 20,
                                            std::uint64_t seed = 1) {
    const QuadraticObjective q = random_quadratic(d, seed);
    OptimizerConfig oc;
    oc.epsilon = 1e-300;
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ParamVector w0(d);
    for (Eigen::Index i = 0; i < d; ++i)
        w0[i] = dist(rng);

    OptimizerState naq = make_state(q, w0, oc);
    OptimizerState moq = make_state(q, w0, oc);
    QuadraticSmokeResult res;
    for (long k = 0; k < iterations; ++k) {
        const StepInfo a = step_lnaq(naq, q, oc);
        const StepInfo b = step_lmoq(moq, q, oc);
        if (!a.taken || !b.taken)
            break;
        const double scale = std::max(1.0, naq.w.lpNorm<Eigen::Infinity>());
        res.max_deviation =
            std::max(res.max_deviation, (naq.w - moq.w).lpNorm<Eigen::Infinity>() / scale);
        ++res.iterations;
    }
    res.gev_lnaq = naq.gev;
    res.gev_lmoq = moq.gev;
    return res;
}

} // namespace lmoq
