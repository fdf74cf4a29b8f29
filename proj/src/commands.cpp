#include "jamguard/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "jamguard/error.hpp"
#include "jamguard/log.hpp"

namespace jamguard {

namespace fs = std::filesystem;
using Json = nlohmann::json;

PipelineConfig CommandOptions::resolve() const {
    PipelineConfig cfg = config_path ? PipelineConfig::load(*config_path) : PipelineConfig{};
    if (seed) cfg.set_seed(*seed);
    if (out_dir) cfg.output_dir = *out_dir;
    if (!models.empty()) {
        cfg.models.clear();
        for (const auto& m : models) {
            const auto name = canonical_model_name(m);
            if (std::find(cfg.models.begin(), cfg.models.end(), name) == cfg.models.end()) cfg.models.push_back(name);
        }
    }
    if (scenario) cfg.hardest_scenario = *scenario;
    cfg.validate();
    return cfg;
}

namespace {

std::string join(const std::string& a, const std::string& b) { return (fs::path(a) / b).string(); }

}  // namespace

std::string ArtifactPaths::dataset() const { return join(root, "dataset.csv"); }
std::string ArtifactPaths::models_dir() const { return join(root, "models"); }
std::string ArtifactPaths::model(const std::string& name) const {
    return join(models_dir(), name + (name == kEsnName ? ".bin" : ".json"));
}
std::string ArtifactPaths::scaler() const { return join(models_dir(), "scaler.json"); }
std::string ArtifactPaths::split() const { return join(root, "split.json"); }
std::string ArtifactPaths::manifest() const { return join(models_dir(), "manifest.json"); }
std::string ArtifactPaths::eval_json() const { return join(root, "eval.json"); }
std::string ArtifactPaths::eval_md() const { return join(root, "eval.md"); }
std::string ArtifactPaths::roc_dir() const { return join(root, "roc"); }
std::string ArtifactPaths::bnm_json() const { return join(root, "bnm.json"); }
std::string ArtifactPaths::bnm_md() const { return join(root, "bnm.md"); }
std::string ArtifactPaths::posterior_json() const { return join(root, "posterior.json"); }
std::string ArtifactPaths::correction_json() const { return join(root, "correction.json"); }
std::string ArtifactPaths::correction_md() const { return join(root, "correction.md"); }
std::string ArtifactPaths::bench_json() const { return join(root, "bench.json"); }
std::string ArtifactPaths::bench_md() const { return join(root, "bench.md"); }
std::string ArtifactPaths::report_md() const { return join(root, "report.md"); }
std::string ArtifactPaths::report_json() const { return join(root, "report.json"); }

namespace {

void require_file(const std::string& path, const std::string& hint) {
    if (!fs::exists(path)) throw StateError("missing artifact " + path + " (" + hint + ")");
}

void write_text(const std::string& path, const std::string& text) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StateError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void check_stamp(const ArtifactStamp& found, const PipelineConfig& cfg, const std::string& path) {
    if (found.config_hash != cfg.hash())
        log_warn(path + " was produced with config " + found.config_hash + ", current config is " + cfg.hash());
}

LabeledDataset load_dataset(const PipelineConfig& cfg, const ArtifactPaths& p) {
    require_file(p.dataset(), "run 'jamguard gen' first");
    std::optional<ArtifactStamp> stamp;
    auto ds = read_dataset(p.dataset(), &stamp);
    if (stamp) check_stamp(*stamp, cfg, p.dataset());
    return ds;
}

PreparedData load_prepared(const PipelineConfig& cfg, const ArtifactPaths& p) { return prepare(cfg, load_dataset(cfg, p)); }

}  // namespace

int cmd_gen(const PipelineConfig& cfg) {
    const ArtifactPaths p{cfg.output_dir};
    auto ds = generate(cfg);
    fs::create_directories(p.root);
    write_dataset(p.dataset(), ds, cfg.stamp());
    std::cout << "wrote " << ds.size() << " rows to " << p.dataset() << "\n";
    return 0;
}

int cmd_train(const PipelineConfig& cfg) {
    const ArtifactPaths p{cfg.output_dir};
    const auto data = load_prepared(cfg, p);
    const auto models = train_models(cfg, data);
    const auto stamp = cfg.stamp();
    fs::create_directories(p.models_dir());
    Json manifest = {{"format", "jamguard.models"}, {"stamp", stamp.to_json()}, {"models", Json::array()}};
    for (const auto& name : cfg.models) {
        if (name == kEsnName) {
            save_esn(p.model(name), *models.esn, {{"stamp", stamp.to_json()}, {"window", cfg.window}});
        } else {
            Json doc = save_detector(*models.instant.at(name));
            doc["stamp"] = stamp.to_json();
            write_json(p.model(name), doc);
        }
        manifest["models"].push_back({{"name", name}, {"file", fs::path(p.model(name)).filename().string()}});
    }
    write_json(p.scaler(), {{"stamp", stamp.to_json()}, {"scaler", data.scaler.to_json()}});
    write_json(p.split(), {{"stamp", stamp.to_json()}, {"split", data.split.to_json()}});
    write_json(p.manifest(), manifest);
    std::cout << "trained " << cfg.models.size() << " model(s) on " << data.split.train.size() << " rows into "
              << p.models_dir() << "\n";
    return 0;
}

int cmd_eval(const PipelineConfig& cfg) {
    const ArtifactPaths p{cfg.output_dir};
    TrainedModels models;
    for (const auto& name : cfg.models) {
        const auto path = p.model(name);
        require_file(path, "run 'jamguard train' first");
        if (name == kEsnName) {
            Json header;
            models.esn = load_esn(path, &header);
            if (header.contains("stamp")) check_stamp(ArtifactStamp::from_json(header["stamp"]), cfg, path);
        } else {
            const Json doc = read_json(path);
            if (doc.contains("stamp")) check_stamp(ArtifactStamp::from_json(doc["stamp"]), cfg, path);
            models.instant[name] = load_detector(doc);
        }
    }
    require_file(p.scaler(), "run 'jamguard train' first");
    const auto scaler = FeatureScaler::from_json(read_json(p.scaler()).at("scaler"));
    const auto data = prepare(cfg, load_dataset(cfg, p), scaler);
    const auto report = evaluate(cfg, data, models);

    write_json(p.eval_json(), report.to_json());
    write_text(p.eval_md(), report.markdown());
    fs::create_directories(p.roc_dir());
    for (const auto& m : report.models) {
        std::ostringstream csv;
        write_roc_csv(csv, m.pooled);
        write_text(join(p.roc_dir(), m.model + ".csv"), csv.str());
        std::vector<std::pair<std::string, const RocCurve*>> curves{{"pooled", &m.pooled}};
        for (const auto& s : m.per_scenario) {
            std::ostringstream sc;
            write_roc_csv(sc, s.roc);
            write_text(join(join(p.roc_dir(), m.model), s.scenario_id + ".csv"), sc.str());
            curves.emplace_back(s.scenario_id, &s.roc);
        }
        write_text(join(p.roc_dir(), m.model + ".svg"), roc_svg(curves, display_model_name(m.model) + " ROC"));
    }
    std::cout << report.markdown();
    return 0;
}

int cmd_bnm(const PipelineConfig& cfg, const std::optional<std::string>& evidence_path) {
    const ArtifactPaths p{cfg.output_dir};
    const auto data = load_prepared(cfg, p);
    const auto bnm = fit_default_bnm(cfg, data, cfg.hardest_scenario);
    write_json(p.bnm_json(), bnm.to_json(cfg.stamp()));
    write_text(p.bnm_md(), bn_summary_table(bnm.net));
    std::cout << "fitted network on " << bnm.rows_used << " training rows of " << bnm.scenario_id << " ("
              << to_string(bnm.cell) << " cell) into " << p.bnm_json() << "\n";
    if (evidence_path) {
        require_file(*evidence_path, "evidence file");
        const Json ej = read_json(*evidence_path);
        const auto ev = evidence_from_json(ej);
        const auto resolved = resolve_evidence(bnm.net, ev);
        const auto dist = posterior(bnm.net, bnm.net.index_of(kJammingNode), resolved);
        for (const auto& c : resolved.clamped) log_warn("evidence for " + c + " lies outside the bins, clamped");
        write_json(p.posterior_json(), {{"stamp", cfg.stamp().to_json()},
                                        {"evidence", ej},
                                        {"clamped", resolved.clamped},
                                        {"posterior", {{"absent", dist[0]}, {"present", dist[1]}}}});
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", dist[1]);
        std::cout << "Pr(jamming | evidence) = " << buf << "\n";
    }
    return 0;
}

int cmd_correct(const PipelineConfig& cfg) {
    const ArtifactPaths p{cfg.output_dir};
    require_file(p.bnm_json(), "run 'jamguard bnm' first");
    const Json bj = read_json(p.bnm_json());
    BnmResult bnm;
    try {
        bnm.net = DiscreteBayesNet::from_json(bj.at("network"));
        bnm.scenario_id = bj.at("scenario_id").get<std::string>();
        bnm.cell = parse_cell(bj.at("cell").get<std::string>());
        bnm.rows_used = bj.at("rows_used").get<std::size_t>();
        check_stamp(ArtifactStamp::from_json(bj.at("stamp")), cfg, p.bnm_json());
    } catch (const Json::exception& e) {
        throw SchemaError(p.bnm_json() + ": " + e.what());
    }
    const auto data = load_prepared(cfg, p);
    const auto run = run_correction(cfg, data, bnm);
    write_json(p.correction_json(), run.to_json(cfg.stamp()));
    std::ostringstream md;
    char buf[160];
    std::snprintf(buf, sizeof buf, "Weakened ESN on %s: %zu training windows, test AUC %.4f, threshold %.4f.\n\n",
                  run.scenario_id.c_str(), run.weak_train_windows, run.weak_auc, run.report.threshold);
    md << buf << run.report.markdown(bnm.net);
    write_text(p.correction_md(), md.str());
    std::cout << md.str();
    return 0;
}

int cmd_bench(const PipelineConfig& cfg) {
    const ArtifactPaths p{cfg.output_dir};
    const auto data = load_prepared(cfg, p);
    const auto records = run_bench(cfg, data);
    write_json(p.bench_json(), bench_to_json(records, cfg.stamp()));
    write_text(p.bench_md(), bench_markdown(records));
    std::cout << bench_markdown(records);
    return 0;
}

int cmd_report(const PipelineConfig& cfg, bool force) {
    const ArtifactPaths p{cfg.output_dir};
    struct Part {
        std::string path;
        bool required;
        Json doc;
    };
    std::vector<Part> parts{{p.eval_json(), true, {}},
                            {p.bnm_json(), true, {}},
                            {p.correction_json(), true, {}},
                            {p.bench_json(), false, {}}};
    std::optional<std::string> hash;
    for (auto& part : parts) {
        if (!fs::exists(part.path)) {
            if (part.required) require_file(part.path, "run the upstream command first");
            continue;
        }
        part.doc = read_json(part.path);
        const auto stamp = ArtifactStamp::from_json(part.doc.at("stamp"));
        if (!hash) hash = stamp.config_hash;
        else if (*hash != stamp.config_hash) {
            if (!force)
                throw StateError(part.path + " has config hash " + stamp.config_hash + " but earlier artifacts have " +
                                 *hash + "; rerun the pipeline or pass --force");
            log_warn("mixing config hashes " + *hash + " and " + stamp.config_hash);
        }
    }
    const Json& ev = parts[0].doc;
    const Json& bn = parts[1].doc;
    const Json& co = parts[2].doc;

    Json summary = {{"format", "jamguard.report"}, {"stamp", ev.at("stamp")}, {"models", Json::array()}};
    for (const auto& m : ev.at("models")) {
        Json per = Json::object();
        for (const auto& s : m.at("per_scenario")) per[s.at("scenario_id").get<std::string>()] = s.at("auc");
        summary["models"].push_back({{"model", m.at("model")},
                                     {"test_auc", m.at("test_auc")},
                                     {"cv_mean_auc", m.at("cv_mean_auc")},
                                     {"youden_threshold", m.at("youden").at("threshold")},
                                     {"confusion", m.at("confusion")},
                                     {"per_scenario_auc", per}});
    }
    summary["bnm"] = {{"scenario_id", bn.at("scenario_id")}, {"cell", bn.at("cell")}, {"rows_used", bn.at("rows_used")}};
    const Json& cr = co.at("report");
    summary["correction"] = {{"scenario_id", co.at("scenario_id")},
                             {"weak_esn_auc", co.at("weak_esn_auc")},
                             {"before", cr.at("before")},
                             {"after", cr.at("after")},
                             {"fn_fixed_fraction", cr.at("fn_fixed_fraction")},
                             {"fp_fixed_fraction", cr.at("fp_fixed_fraction")},
                             {"combined_fixed_fraction", cr.at("combined_fixed_fraction")},
                             {"newly_broken_count", cr.at("newly_broken_count")},
                             {"group_mean", cr.at("group_mean")}};
    write_json(p.report_json(), summary);

    auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    };
    std::ostringstream md;
    md << "# Jamming detection report\n\n";
    md << "Config hash `" << ev.at("stamp").at("config_hash").get<std::string>() << "`, seed "
       << ev.at("stamp").at("seed").get<std::uint64_t>() << ", tool version "
       << ev.at("stamp").at("tool_version").get<std::string>() << ".\n\n";
    md << "## Detection\n\n" << (fs::exists(p.eval_md()) ? slurp(p.eval_md()) : std::string("(eval.md missing)\n"));
    md << "\n## Bayesian network (" << bn.at("scenario_id").get<std::string>() << ", "
       << bn.at("cell").get<std::string>() << " cell)\n\n"
       << (fs::exists(p.bnm_md()) ? slurp(p.bnm_md()) : std::string("(bnm.md missing)\n"));
    md << "\n## Correction\n\n"
       << (fs::exists(p.correction_md()) ? slurp(p.correction_md()) : std::string("(correction.md missing)\n"));
    if (!parts[3].doc.is_null())
        md << "\n## Run times\n\n" << (fs::exists(p.bench_md()) ? slurp(p.bench_md()) : std::string());
    write_text(p.report_md(), md.str());
    std::cout << "wrote " << p.report_md() << " and " << p.report_json() << "\n";
    return 0;
}

int cmd_all(const PipelineConfig& cfg) {
    cmd_gen(cfg);
    cmd_train(cfg);
    cmd_eval(cfg);
    cmd_bnm(cfg);
    cmd_correct(cfg);
    cmd_bench(cfg);
    return cmd_report(cfg);
}

}  // namespace jamguard
