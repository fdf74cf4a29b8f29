// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "jamguard/commands.hpp"
#include "jamguard/log.hpp"
#include "oracles.hpp"

using namespace jamguard;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Commands print their tables; keep the acceptance output to the verdict lines.
struct MuteStdout {
    std::ostringstream sink;
    std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
    ~MuteStdout() { std::cout.rdbuf(old); }
};

Outcome mapping() {
    const auto& t = MappingTables::standard();
    const double eta = snr_to_spectral_efficiency(15.0);
    const int mcs = efficiency_to_mcs(5.0278, t).index;
    const auto cqi = efficiency_to_cqi(5.0278, t);
    const bool ok = std::abs(eta - 5.0278) <= 1e-3 && mcs == 26 && cqi.bracket_low <= 14 && cqi.bracket_high >= 14;
    return {ok, fmt("eta(15 dB)=%.4f, MCS=%d, CQI bracket [%d,%d]", eta, mcs, cqi.bracket_low, cqi.bracket_high)};
}

Outcome esn_parameters() {
    PipelineConfig cfg;
    auto m = init_esn(cfg.esn);
    const Eigen::MatrixXd w_in = m.w_in, w_res = m.w_res;
    std::mt19937_64 g(1);
    std::normal_distribution<double> n;
    std::vector<SequenceWindow> windows;
    for (int i = 0; i < 40; ++i) {
        SequenceWindow w;
        w.label = i % 2;
        w.steps = Eigen::MatrixXd::NullaryExpr(2, m.params.input_dim, [&] { return n(g) + w.label; });
        windows.push_back(w);
    }
    train_esn(m, windows);
    auto same = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
    };
    const bool frozen = same(w_in, m.w_in) && same(w_res, m.w_res);
    return {m.trainable_parameters() == 100 && frozen,
            fmt("M=%ld K=%ld trainable=%zu, W_in/W_res unchanged by training: %s", static_cast<long>(m.params.reservoir_size),
                static_cast<long>(m.params.output_dim), m.trainable_parameters(), frozen ? "yes" : "no")};
}

Outcome inference() {
    std::mt19937_64 g(2026);
    double worst = 0, slowest = 0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t nodes = 2 + g() % 11;
        const auto net = oracle::random_net(g, nodes, 4);
        ResolvedEvidence ev;
        ev.states.assign(nodes, std::nullopt);
        const std::size_t q = g() % nodes;
        for (std::size_t i = 0; i < nodes; ++i)
            if (i != q && g() % 3 == 0) ev.states[i] = g() % net.node(i).cardinality();
        const auto t0 = Clock::now();
        const auto ve = posterior(net, q, ev);
        slowest = std::max(slowest, seconds_since(t0));
        const auto en = oracle::enumerate_posterior(net, q, ev.states);
        for (std::size_t s = 0; s < ve.size(); ++s) worst = std::max(worst, std::abs(ve[s] - en[s]));
    }
    return {worst <= 1e-10 && slowest < 1.0, fmt("50 nets, max |VE - enumeration| = %.2e, slowest query %.4f s", worst, slowest)};
}

Outcome auc_oracle() {
    std::mt19937_64 g(77);
    double worst_auc = 0, worst_j = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + g() % 199;
        std::vector<double> s(n);
        std::vector<int> y(n);
        const auto levels = 1 + g() % 50;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(g() % 2);
            s[i] = static_cast<double>(g() % levels) * 0.1 + 0.05 * y[i];
        }
        y[0] = 0;
        y[1] = 1;
        const auto roc = roc_auc(s, y);
        worst_auc = std::max(worst_auc, std::abs(roc.auc - oracle::concordance_auc(s, y)));
        worst_j = std::max(worst_j, std::abs(youden_threshold(roc).j - oracle::exhaustive_youden(s, y)));
    }
    return {worst_auc <= 1e-12 && worst_j <= 1e-12,
            fmt("100 sets, max AUC gap %.2e, max Youden J gap %.2e", worst_auc, worst_j)};
}

Outcome readout() {
    std::mt19937_64 g(5);
    std::normal_distribution<double> n;
    double worst = -INFINITY;
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index m = 3 + static_cast<Eigen::Index>(g() % 10), k = 2, T = m + 5 + static_cast<Eigen::Index>(g() % 30);
        const Eigen::MatrixXd X = Eigen::MatrixXd::NullaryExpr(m, T, [&] { return n(g); });
        const Eigen::MatrixXd Y = Eigen::MatrixXd::NullaryExpr(k, T, [&] { return n(g); });
        const double lambda = std::pow(10.0, -3.0 + static_cast<double>(g() % 4));
        const auto closed = fit_readout(X, Y, lambda);
        const auto gd = oracle::ridge_gradient_descent(X, Y, lambda);
        worst = std::max(worst, oracle::ridge_objective(closed, X, Y, lambda) - oracle::ridge_objective(gd, X, Y, lambda));
    }
    return {worst <= 1e-6, fmt("20 systems, max objective gap (closed form - gradient descent) %.2e", worst)};
}

struct PipelineRun {
    fs::path dir;
    double detect_seconds = 0;   // gen, train, eval
    double correct_seconds = 0;  // bnm, correct
};

PipelineRun run_pipeline(const fs::path& dir) {
    fs::remove_all(dir);
    PipelineConfig cfg;
    cfg.output_dir = dir.string();
    MuteStdout mute;
    PipelineRun r{dir};
    auto t0 = Clock::now();
    cmd_gen(cfg);
    cmd_train(cfg);
    cmd_eval(cfg);
    r.detect_seconds = seconds_since(t0);
    t0 = Clock::now();
    cmd_bnm(cfg);
    cmd_correct(cfg);
    r.correct_seconds = seconds_since(t0);
    cmd_report(cfg);
    return r;
}

Outcome detection(const PipelineRun& run) {
    const auto ev = read_json(run.dir / "eval.json");
    std::map<std::string, std::map<std::string, double>> auc;
    for (const auto& m : ev["models"])
        for (const auto& s : m["per_scenario"]) auc[m["model"]][s["scenario_id"]] = s["auc"];

    bool ok = run.detect_seconds < 60;
    std::string detail;
    std::map<Band, std::vector<JammingScenario>> by_band;
    for (const auto& s : testbed_scenarios()) by_band[s.band].push_back(s);
    for (auto& [band, list] : by_band) {
        std::sort(list.begin(), list.end(), [](auto& a, auto& b) { return a.power_dbm > b.power_dbm; });
        const auto& strongest = list.front().scenario_id;
        const double rf = auc["random_forest"][strongest], esn = auc[kEsnName][strongest];
        ok = ok && rf >= 0.95 && esn >= 0.93;
        detail += fmt("%s RF %.4f ESN %.4f; ", strongest.c_str(), rf, esn);
        for (const char* model : {"random_forest", kEsnName})
            for (std::size_t i = 1; i < list.size(); ++i) {
                const double prev = auc[model][list[i - 1].scenario_id], cur = auc[model][list[i].scenario_id];
                if (cur > prev + 0.02) {
                    ok = false;
                    detail += fmt("%s rises %s->%s (%.4f->%.4f); ", model, list[i - 1].scenario_id.c_str(),
                                  list[i].scenario_id.c_str(), prev, cur);
                }
            }
    }
    return {ok, detail + fmt("gen+train+eval %.1f s", run.detect_seconds)};
}

Outcome correction(const PipelineRun& run) {
    const auto co = read_json(run.dir / "correction.json");
    const auto& r = co["report"];
    const double fixed = r["combined_fixed_fraction"];
    const std::size_t broken = r["newly_broken_count"];
    const std::size_t correct_before = r["before"]["tp"].get<std::size_t>() + r["before"]["tn"].get<std::size_t>();
    const bool ok = fixed >= 0.5 && static_cast<double>(broken) <= 0.2 * static_cast<double>(correct_before) &&
                    run.correct_seconds < 30;
    return {ok, fmt("weak ESN AUC %.4f, fixed %.1f%% of %zu errors, newly broken %zu of %zu correct, %.1f s",
                    co["weak_esn_auc"].get<double>(), 100 * fixed,
                    r["before"]["fp"].get<std::size_t>() + r["before"]["fn"].get<std::size_t>(), broken,
                    correct_before, run.correct_seconds)};
}

Outcome determinism(const PipelineRun& a, const PipelineRun& b) {
    std::string detail;
    bool ok = true;
    for (const char* f : {"eval.json", "bnm.json", "correction.json", "report.json"}) {
        const bool same = slurp(a.dir / f) == slurp(b.dir / f) && !slurp(a.dir / f).empty();
        ok = ok && same;
        detail += fmt("%s %s; ", f, same ? "identical" : "DIFFERS");
    }
    return {ok, detail};
}

Outcome latency(const PipelineRun& run) {
    PipelineConfig cfg;
    cfg.output_dir = run.dir.string();
    {
        MuteStdout mute;
        cmd_bench(cfg);
    }
    const auto bench = read_json(run.dir / "bench.json");
    bool ok = !bench["records"].empty();
    double worst = 0;
    std::string slowest;
    for (const auto& r : bench["records"]) {
        const double t = r["max_inference_seconds"];
        if (t >= worst) {
            worst = t;
            slowest = r["model"];
        }
        ok = ok && t < 0.180;
    }
    return {ok, fmt("%zu models, slowest single window %.3f ms (%s)", bench["records"].size(), 1e3 * worst,
                    slowest.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    set_log_level(LogLevel::Error);
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "jamguard_acceptance";
    std::vector<std::pair<int, Outcome>> results;
    auto report = [&](int id, Outcome o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << o.detail << std::endl;
        results.emplace_back(id, std::move(o));
    };
    auto guarded = [&](int id, const std::function<Outcome()>& f) {
        try {
            report(id, f());
        } catch (const std::exception& e) {
            report(id, {false, std::string("threw: ") + e.what()});
        }
    };

    guarded(1, mapping);
    guarded(2, esn_parameters);
    guarded(3, inference);
    guarded(4, auc_oracle);

    std::optional<PipelineRun> first, second;
    try {
        first = run_pipeline(work / "run1");
        second = run_pipeline(work / "run2");
    } catch (const std::exception& e) {
        std::cerr << "pipeline failed: " << e.what() << "\n";
    }
    auto needs_run = [&](int id, auto f) {
        if (!first || !second) return report(id, {false, "pipeline did not complete"});
        guarded(id, [&] { return f(); });
    };
    needs_run(5, [&] { return detection(*first); });
    needs_run(6, [&] { return correction(*first); });
    guarded(7, readout);
    needs_run(8, [&] { return determinism(*first, *second); });
    needs_run(9, [&] { return latency(*first); });

    const auto failed = std::count_if(results.begin(), results.end(), [](auto& r) { return !r.second.pass; });
    std::cout << (failed ? "FAIL" : "PASS") << "  " << results.size() - failed << "/" << results.size()
              << " criteria\n";
    return failed ? 1 : 0;
}
