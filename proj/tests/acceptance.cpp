// Acceptance suite: one PASS/FAIL line per criterion. Pass --full to also run
// the 50-trial, 10000-iteration protocol (hours on a single core).

#include <lmoq/harness.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace lmoq;
using clock_type = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<Outcome()>& body) {
    const auto t0 = clock_type::now();
    Outcome o = body();
    const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    bool pass = o.pass;
    if (time_limit_s > 0 && secs >= time_limit_s) {
        pass = false;
        o.detail += " [runtime limit " + std::to_string(time_limit_s) + " s exceeded]";
    }
    std::printf("[%s] %d. %s (%.2f s): %s\n", pass ? "PASS" : "FAIL", id, title, secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome gradient_accounting() {
    RunConfig rc;
    const Network net = rc.network();
    const TrialInputs in = make_trial_inputs(rc, 0);
    const MlpObjective obj{&net, &in.data};
    OptimizerConfig oc = rc.optimizer_config();
    oc.k_max = 100;
    bool ok = true;
    std::string detail;
    for (OptimizerKind kind : all_optimizer_kinds) {
        const RunResult r = run(kind, obj, in.w0, oc);
        const long K = r.summary.iters;
        const long expect = kind == OptimizerKind::lnaq ? 2 * K : K + 1;
        ok = ok && K == 100 && r.summary.gev == expect;
        detail += fmt("%s K=%ld gev=%ld (expect %ld); ", std::string(display_name(kind)).c_str(), K,
                      r.summary.gev, expect);
    }
    return {ok, detail};
}

Outcome two_loop_vs_dense() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const Eigen::Index d = 2 + Eigen::Index(rng() % 9);
        const std::size_t npairs = 1 + rng() % 8;
        Eigen::MatrixXd m(d, d);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = std::normal_distribution<double>()(rng);
        const Eigen::MatrixXd A = m * m.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
        LmemBuffer buf(npairs);
        std::vector<std::pair<ParamVector, ParamVector>> pairs;
        while (pairs.size() < npairs) {
            const ParamVector s = lmoq::testing::random_vector(d, rng);
            const ParamVector y = A * s;
            if (buf.push_pair(s, y))
                pairs.emplace_back(s, y);
        }
        const Eigen::MatrixXd H = lmoq::testing::dense_bfgs(pairs, d, buf.h0_scale());
        const ParamVector r = lmoq::testing::random_vector(d, rng);
        const ParamVector expect = H * r;
        worst = std::max(worst, (buf.two_loop(r) - expect).norm() / expect.norm());
    }
    return {worst <= 1e-10, fmt("100 cases, max relative error %.3e (tol 1e-10)", worst)};
}

Outcome moq_quadratic() {
    const QuadraticSmokeResult r = quadratic_smoke(20, 20, 3);
    return {r.iterations == 20 && r.max_deviation <= 1e-10,
            fmt("d=20, %ld iterations, max iterate deviation %.3e (tol 1e-10)", r.iterations,
                r.max_deviation)};
}

Outcome backprop() {
    RunConfig rc;
    const Network net = rc.network();
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const TrialInputs in = make_trial_inputs(rc, 1000 + t);
        const ParamVector g = net.grad(in.w0, in.data);
        Network::Workspace ws;
        const ParamVector fd = lmoq::testing::fd_gradient(
            [&](const ParamVector& w) { return net.loss(w, in.data, ws); }, in.w0, 1e-6);
        worst = std::max(worst, lmoq::testing::max_relative_error(g, fd));
    }
    return {worst <= 1e-5,
            fmt("d=%ld, 20 draws, max relative error %.3e (tol 1e-5)", long(net.parameter_count()),
                worst)};
}

Outcome momentum_schedule() {
    MomentumSchedule sched;
    std::vector<double> mu;
    for (int k = 0; k <= 1000; ++k)
        mu.push_back(sched.next());
    // Oracle: iterate the quadratic formula directly.
    double theta = 1.0, oracle_mu = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double b = theta * theta - 1e-5;
        const double next = 0.5 * (-b + std::sqrt(b * b + 4.0 * theta * theta));
        oracle_mu = theta * (1.0 - theta) / (theta * theta + next);
        theta = next;
    }
    bool monotone = true, bounded = true;
    for (std::size_t k = 0; k < mu.size(); ++k) {
        bounded = bounded && mu[k] >= 0.0 && mu[k] <= 0.99999;
        if (k > 0)
            monotone = monotone && mu[k] >= mu[k - 1];
    }
    const bool ok = mu[0] == 0.0 && monotone && bounded && mu[1000] > 0.99 &&
                    std::abs(mu[1000] - oracle_mu) <= 1e-12;
    return {ok, fmt("mu0=%g nondecreasing=%d bounded=%d mu1000=%.10f oracle=%.10f", mu[0],
                    monotone, bounded, mu[1000], oracle_mu)};
}

Outcome desk_scale() {
    RunConfig rc;
    rc.trials = 5;
    rc.k_max = 2000;
    const BenchmarkResult r = run_benchmark(rc);
    const auto& m = r.summary.methods;  // L-BFGS, L-NAQ, L-MoQ
    bool ok = m[2].final_value <= m[0].final_value && m[1].final_value <= m[0].final_value;
    std::string detail;
    for (const MethodSummary& s : m) {
        const double per_iter = s.fev / s.iters;
        ok = ok && per_iter >= 1.0 && per_iter <= 4.0 && s.diverged == 0;
        detail += fmt("%s E=%.6g iters=%.1f fev/iter=%.3f; ", s.method.c_str(), s.final_value,
                      s.iters, per_iter);
    }
    return {ok, detail + "need E(L-MoQ) <= E(L-BFGS) and E(L-NAQ) <= E(L-BFGS)"};
}

Outcome full_protocol() {
    RunConfig rc;  // 50 trials, k_max 10000, m 16, eps 1e-6
    const BenchmarkResult r = run_benchmark(rc);
    const auto& m = r.summary.methods;
    const double ratio_moq = m[0].final_value / m[2].final_value;
    const double ratio_naq = m[0].final_value / m[1].final_value;
    // Lower than L-BFGS, and within an order of magnitude of the reported 4x.
    const bool ok = ratio_moq >= 1.0 && ratio_moq <= 40.0 && ratio_naq >= 1.0 &&
                    ratio_naq <= 40.0 && m[2].gev < m[1].gev;
    return {ok, fmt("E ratio L-BFGS/L-MoQ=%.3g L-BFGS/L-NAQ=%.3g gev L-MoQ=%.1f L-NAQ=%.1f", ratio_moq,
                    ratio_naq, m[2].gev, m[1].gev)};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path a = fs::temp_directory_path() / "lmoq_accept_det_a";
    const fs::path b = fs::temp_directory_path() / "lmoq_accept_det_b";
    fs::remove_all(a);
    fs::remove_all(b);
    RunConfig rc;
    rc.trials = 2;
    rc.k_max = 100;
    rc.out_dir = a;
    const BenchmarkResult ra = run_benchmark(rc);
    rc.out_dir = b;
    const BenchmarkResult rb = run_benchmark(rc);

    auto strip = [](const fs::path& p) {
        std::ifstream is(p);
        std::string line, out;
        while (std::getline(is, line))
            out += line.substr(0, line.rfind(',')) + '\n';
        return out;
    };
    int files = 0, identical = 0;
    for (const TrialRecord& rec : ra.records) {
        const std::string name = trace_filename(rec.optimizer, rec.trial);
        ++files;
        identical += strip(a / name) == strip(b / name);
    }
    fs::remove_all(a);
    fs::remove_all(b);
    return {files == 6 && identical == files,
            fmt("%d/%d trace files byte-identical excluding elapsed_ms", identical, files)};
}

} // namespace

int main(int argc, char** argv) {
    const bool full = argc > 1 && std::strcmp(argv[1], "--full") == 0;

    criterion(1, "gradient-evaluation accounting", 10.0, gradient_accounting);
    criterion(2, "two-loop recursion vs dense BFGS", 1.0, two_loop_vs_dense);
    criterion(3, "L-MoQ equals L-NAQ on a quadratic", 1.0, moq_quadratic);
    criterion(4, "backpropagation vs finite differences", 30.0, backprop);
    criterion(5, "momentum schedule", 1.0, momentum_schedule);
    criterion(6, "desk-scale ordering (5 trials, k_max 2000)", 0.0, desk_scale);
    if (full)
        criterion(7, "full protocol (50 trials, k_max 10000)", 0.0, full_protocol);
    else
        std::printf("[SKIP] 7. full protocol (50 trials, k_max 10000): optional, run "
                    "`lmoq_acceptance --full`\n");
    criterion(8, "determinism", 0.0, determinism);

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
