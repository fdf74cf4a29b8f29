#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <sstream>

#include "jamguard/commands.hpp"
#include "jamguard/error.hpp"
#include "jamguard/pipeline.hpp"

namespace py = pybind11;
using namespace jamguard;
using Json = nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python side parses it.
PipelineConfig config_from(const std::string& config_json, const std::string& base_dir) {
    return config_json.empty() ? PipelineConfig{} : PipelineConfig::from_json(Json::parse(config_json), base_dir);
}

py::dict dataset_arrays(const LabeledDataset& ds) {
    FeatureMatrix X(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(kPairedFeatureCount));
    std::vector<std::string> scenario(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto f = ds.rows[i].features();
        for (std::size_t c = 0; c < f.size(); ++c) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = f[c];
        scenario[i] = ds.rows[i].scenario_id;
    }
    std::vector<std::string> columns;
    for (const char* cell : {"nr_", "lte_"})
        for (auto n : kKpiNames) columns.push_back(cell + std::string(n));
    py::dict out;
    out["features"] = X;
    out["labels"] = ds.labels();
    out["scenario_id"] = scenario;
    out["columns"] = columns;
    return out;
}

int run_command(const std::string& name, const std::string& config_json, const std::string& out_dir,
                const std::optional<std::string>& evidence_path, bool force, bool quiet) {
    auto cfg = config_from(config_json, ".");
    cfg.output_dir = out_dir;
    cfg.validate();
    std::ostringstream sink;
    std::streambuf* old = quiet ? std::cout.rdbuf(sink.rdbuf()) : nullptr;
    struct Restore {
        std::streambuf* old;
        ~Restore() {
            if (old) std::cout.rdbuf(old);
        }
    } restore{old};
    py::gil_scoped_release release;
    if (name == "gen") return cmd_gen(cfg);
    if (name == "train") return cmd_train(cfg);
    if (name == "eval") return cmd_eval(cfg);
    if (name == "bnm") return cmd_bnm(cfg, evidence_path);
    if (name == "correct") return cmd_correct(cfg);
    if (name == "bench") return cmd_bench(cfg);
    if (name == "report") return cmd_report(cfg, force);
    if (name == "all") return cmd_all(cfg);
    throw ConfigError("unknown command '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Jamming detection core";

    auto base = py::register_exception<Error>(m, "JamguardError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    auto parse = py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", parse.ptr());
    py::register_exception<StateError>(m, "StateError", base.ptr());

    m.attr("version") = std::string(kToolVersion);

    m.def("snr_to_spectral_efficiency", &snr_to_spectral_efficiency, py::arg("snr_db"));
    m.def(
        "efficiency_to_mcs",
        [](double eta, const std::string& rule) {
            if (rule != "nearest" && rule != "floor") throw ConfigError("rule must be 'nearest' or 'floor'");
            return efficiency_to_mcs(eta, MappingTables::standard(),
                                     rule == "floor" ? LookupRule::Floor : LookupRule::Nearest)
                .index;
        },
        py::arg("eta"), py::arg("rule") = "nearest");
    m.def(
        "efficiency_to_cqi",
        [](double eta) {
            const auto c = efficiency_to_cqi(eta, MappingTables::standard());
            py::dict d;
            d["floor"] = c.floor;
            d["bracket"] = py::make_tuple(c.bracket_low, c.bracket_high);
            d["saturated"] = c.saturated;
            return d;
        },
        py::arg("eta"));

    m.def(
        "roc_auc",
        [](const std::vector<double>& scores, const std::vector<int>& labels) {
            const auto roc = roc_auc(scores, labels);
            const auto y = youden_threshold(roc);
            py::dict d;
            d["auc"] = roc.auc;
            std::vector<double> fpr, tpr, thr;
            for (const auto& p : roc.points) {
                fpr.push_back(p.fpr);
                tpr.push_back(p.tpr);
                thr.push_back(p.threshold);
            }
            d["fpr"] = fpr;
            d["tpr"] = tpr;
            d["thresholds"] = thr;
            d["youden"] = py::dict(py::arg("threshold") = y.threshold, py::arg("j") = y.j, py::arg("tpr") = y.tpr,
                                   py::arg("fpr") = y.fpr);
            return d;
        },
        py::arg("scores"), py::arg("labels"));

    m.def("default_config_json", [] { return PipelineConfig().to_json().dump(); });
    m.def("config_hash", [](const std::string& config_json) { return config_from(config_json, ".").hash(); },
          py::arg("config_json"));
    m.def(
        "generate",
        [](const std::string& config_json) { return dataset_arrays(generate(config_from(config_json, "."))); },
        py::arg("config_json") = "");

    m.def(
        "jamming_posterior",
        [](const std::string& network_json, const std::string& evidence_json) {
            const auto net = DiscreteBayesNet::from_json(Json::parse(network_json));
            return jamming_posterior(net, evidence_from_json(Json::parse(evidence_json)));
        },
        py::arg("network_json"), py::arg("evidence_json"));
    m.def("rules_network_json", [] { return build_dag_from_rules().to_json().dump(); });

    m.def("run_command", &run_command, py::arg("name"), py::arg("config_json"), py::arg("out_dir"),
          py::arg("evidence_path") = std::nullopt, py::arg("force") = false, py::arg("quiet") = true);
}
