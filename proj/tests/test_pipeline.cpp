#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jamguard/commands.hpp"
#include "jamguard/error.hpp"
#include "jamguard/pipeline.hpp"

using namespace jamguard;
namespace fs = std::filesystem;

namespace {

std::string error_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("jamguard_test_" + name);
    fs::remove_all(p);
    return p;
}

PipelineConfig small_config(const fs::path& out) {
    PipelineConfig cfg;
    cfg.generator.samples_per_scenario = 60;
    cfg.models = {"logistic_regression", "gaussian_nb", kEsnName};
    cfg.cross_validate = false;
    cfg.weak_train_fraction = 0.3;
    cfg.output_dir = out.string();
    return cfg;
}

double log_odds(double p) { return std::log(p / (1 - p)); }

// Default pipeline data and the network fitted on the hardest scenario, built once.
const BnmResult& default_bnm() {
    static const BnmResult r = [] {
        PipelineConfig cfg;
        const auto data = prepare(cfg, generate(cfg));
        return fit_default_bnm(cfg, data, cfg.hardest_scenario);
    }();
    return r;
}

Evidence kpis(double snr, double cqi, double dl, double ul) {
    return {{kSnrNode, EvidenceValue::of_value(snr)},
            {kCqiNode, EvidenceValue::of_value(cqi)},
            {kDlMcsNode, EvidenceValue::of_value(dl)},
            {kUlMcsNode, EvidenceValue::of_value(ul)}};
}

}  // namespace

TEST_CASE("config: unknown fields name their path") {
    auto msg = error_of([] { PipelineConfig::from_json({{"esn", {{"leak", 0.3}}}}); });
    CHECK(msg.find("esn.leak") != std::string::npos);
    msg = error_of([] { PipelineConfig::from_json({{"instant", {{"forest", {{"trees", 3}}}}}}); });
    CHECK(msg.find("instant.forest.trees") != std::string::npos);
    msg = error_of([] { PipelineConfig::from_json({{"generator", {{"samples_per_scenario", -4}}}}); });
    CHECK(msg.find("samples_per_scenario") != std::string::npos);
    CHECK_THROWS_AS(PipelineConfig::from_json({{"models", {"svm"}}}), ConfigError);
}

TEST_CASE("config: JSON round trip, hash and seeds") {
    PipelineConfig a;
    a.set_seed(7);
    a.esn.reservoir_size = 30;
    const auto b = PipelineConfig::from_json(a.to_json());
    CHECK(b.to_json() == a.to_json());
    CHECK(b.hash() == a.hash());

    PipelineConfig c = a;
    c.output_dir = "/somewhere/else";
    CHECK(c.hash() == a.hash());
    c.esn.ridge = 0.5;
    CHECK(c.hash() != a.hash());
    PipelineConfig d;
    d.set_seed(8);
    CHECK(d.generator.seed == 8);
    CHECK(d.esn.seed != a.esn.seed);

    std::ifstream in(JAMGUARD_SOURCE_DIR "/configs/default.json");
    REQUIRE(in);
    const auto shipped = PipelineConfig::from_json(nlohmann::json::parse(in));
    CHECK(shipped.hash() == PipelineConfig().hash());
}

TEST_CASE("commands: missing artifacts and mixed hashes") {
    const auto dir = scratch("cmds");
    auto cfg = small_config(dir);
    auto msg = error_of([&] { cmd_eval(cfg); });
    CHECK(msg.find((dir / "models").string()) != std::string::npos);
    CHECK_THROWS_AS(cmd_train(cfg), StateError);

    CHECK(cmd_gen(cfg) == 0);
    CHECK(cmd_train(cfg) == 0);
    CHECK(cmd_eval(cfg) == 0);
    CHECK(cmd_bnm(cfg) == 0);
    CHECK(cmd_correct(cfg) == 0);
    CHECK(cmd_report(cfg) == 0);
    for (const char* f : {"dataset.csv", "eval.json", "eval.md", "bnm.json", "bnm.md", "correction.json",
                          "correction.md", "report.json", "report.md", "roc/gaussian_nb.svg", "models/esn.bin"})
        CHECK_MESSAGE(fs::exists(dir / f), f);

    std::ifstream rin(dir / "report.json");
    const auto report = nlohmann::json::parse(rin);
    CHECK(report["format"] == "jamguard.report");
    CHECK(report["models"].size() == 3);

    // A correction artifact from another configuration poisons the report.
    auto other = cfg;
    other.correction.delta = 0.2;
    CHECK(cmd_correct(other) == 0);
    msg = error_of([&] { cmd_report(cfg); });
    CHECK(msg.find("--force") != std::string::npos);
    CHECK(cmd_report(cfg, true) == 0);

    std::ofstream(dir / "evidence.json") << R"({"PUSCH_SNR": 9.0, "CQI": 8})";
    CHECK(cmd_bnm(cfg, (dir / "evidence.json").string()) == 0);
    std::ifstream pin(dir / "posterior.json");
    const auto post = nlohmann::json::parse(pin);
    CHECK(post["posterior"]["present"].get<double>() + post["posterior"]["absent"].get<double>() ==
          doctest::Approx(1.0));
    fs::remove_all(dir);
}

TEST_CASE("command options resolve flags over the config file") {
    const auto dir = scratch("opts");
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << R"({"seed": 5, "esn": {"reservoir_size": 20}})";
    CommandOptions opt;
    opt.config_path = (dir / "cfg.json").string();
    opt.seed = 9;
    opt.models = {"logistic_regression", "logistic_regression", "esn"};
    const auto cfg = opt.resolve();
    CHECK(cfg.seed == 9);
    CHECK(cfg.esn.reservoir_size == 20);
    CHECK(cfg.models.size() == 2);
    fs::remove_all(dir);
}

TEST_CASE("fitted network: downstream KPI is no more informative than its parent") {
    const auto& net = default_bnm().net;
    const auto j = net.index_of(kJammingNode);
    const auto cqi = net.index_of(kCqiNode), dl = net.index_of(kDlMcsNode);
    auto alone = [&](std::size_t node, std::size_t state) {
        ResolvedEvidence ev;
        ev.states.assign(net.size(), std::nullopt);
        ev.states[node] = state;
        return log_odds(posterior(net, j, ev)[1]);
    };
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t c = 0; c < net.node(cqi).cardinality(); ++c) {
        lo = std::min(lo, alone(cqi, c));
        hi = std::max(hi, alone(cqi, c));
    }
    for (std::size_t d = 0; d < net.node(dl).cardinality(); ++d) {
        const double v = alone(dl, d);
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("fitted network: error-cluster evidence points the right way") {
    const auto& bnm = default_bnm();
    CHECK(bnm.cell == Cell::LTE);
    CHECK(bnm.rows_used > 0);
    // Missed detections look degraded; false alarms look clean.
    CHECK(jamming_posterior(bnm.net, kpis(12.66, 15, 25.88, 19.07)) > 0.5);
    CHECK(jamming_posterior(bnm.net, kpis(15.31, 11.54, 21.34, 18.66)) < 0.5);
}
