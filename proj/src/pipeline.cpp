#include "jamguard/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "jamguard/error.hpp"
#include "jamguard/log.hpp"

namespace jamguard {

namespace {

using Json = nlohmann::json;

// Stream ids for seeds derived from the master seed.
enum : std::uint64_t { kSplitStream = 101, kForestStream, kTreeStream, kEsnStream, kWeakSubsetStream };

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
}

std::size_t count(const Json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(path + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

bool boolean(const Json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
    return v.get<bool>();
}

const Json& object(const Json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path + ": expected an object");
    return v;
}

[[noreturn]] void unknown(const std::string& path) { throw ConfigError(path + ": unknown field"); }

Json instant_to_json(const InstantHyperparams& hp) {
    return {{"logreg",
             {{"learning_rate", hp.logreg.learning_rate},
              {"iterations", hp.logreg.iterations},
              {"l2", hp.logreg.l2},
              {"checkpoint_every", hp.logreg.checkpoint_every}}},
            {"tree", {{"max_depth", hp.tree.max_depth}, {"min_leaf", hp.tree.min_leaf}}},
            {"forest",
             {{"n_trees", hp.forest.n_trees},
              {"max_depth", hp.forest.max_depth},
              {"min_leaf", hp.forest.min_leaf},
              {"feature_frac", hp.forest.feature_frac},
              {"bootstrap", hp.forest.bootstrap}}},
            {"knn_k", hp.knn_k},
            {"adaboost_stumps", hp.adaboost_stumps}};
}

void instant_from_json(const Json& j, InstantHyperparams& hp) {
    for (const auto& [k, v] : object(j, "instant").items()) {
        const std::string p = "instant." + k;
        if (k == "logreg") {
            for (const auto& [a, b] : object(v, p).items()) {
                const std::string q = p + "." + a;
                if (a == "learning_rate") hp.logreg.learning_rate = number(b, q);
                else if (a == "iterations") hp.logreg.iterations = static_cast<int>(count(b, q));
                else if (a == "l2") hp.logreg.l2 = number(b, q);
                else if (a == "checkpoint_every") hp.logreg.checkpoint_every = static_cast<int>(count(b, q));
                else unknown(q);
            }
        } else if (k == "tree") {
            for (const auto& [a, b] : object(v, p).items()) {
                const std::string q = p + "." + a;
                if (a == "max_depth") hp.tree.max_depth = static_cast<int>(count(b, q));
                else if (a == "min_leaf") hp.tree.min_leaf = count(b, q);
                else unknown(q);
            }
        } else if (k == "forest") {
            for (const auto& [a, b] : object(v, p).items()) {
                const std::string q = p + "." + a;
                if (a == "n_trees") hp.forest.n_trees = count(b, q);
                else if (a == "max_depth") hp.forest.max_depth = static_cast<int>(count(b, q));
                else if (a == "min_leaf") hp.forest.min_leaf = count(b, q);
                else if (a == "feature_frac") hp.forest.feature_frac = number(b, q);
                else if (a == "bootstrap") hp.forest.bootstrap = boolean(b, q);
                else unknown(q);
            }
        } else if (k == "knn_k") hp.knn_k = count(v, p);
        else if (k == "adaboost_stumps") hp.adaboost_stumps = count(v, p);
        else unknown(p);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

PipelineConfig::PipelineConfig() {
    models = instantaneous_model_names();
    models.push_back(kEsnName);
    set_seed(seed);
}

void PipelineConfig::set_seed(std::uint64_t s) {
    seed = s;
    generator.seed = s;
    instant.tree.seed = stream_seed(kTreeStream);
    instant.forest.seed = stream_seed(kForestStream);
    esn.seed = stream_seed(kEsnStream);
}

void PipelineConfig::validate() const {
    generator.validate();
    esn.validate();
    correction.validate();
    if (models.empty()) throw ConfigError("models: at least one model is required");
    if (window < 1) throw ConfigError("esn.window must be >= 1");
    if (!(bnm_alpha >= 0)) throw ConfigError("bnm.alpha must be >= 0");
    if (!(weak_train_fraction > 0 && weak_train_fraction <= 1))
        throw ConfigError("correction.weak_train_fraction must be in (0,1]");
    if (!(test_fraction > 0 && test_fraction < 1)) throw ConfigError("eval.test_fraction must be in (0,1)");
    if (folds < 2) throw ConfigError("eval.folds must be >= 2");
    if (bench_repetitions < 3) throw ConfigError("bench.repetitions must be >= 3");
    if (bench_windows < 1) throw ConfigError("bench.windows must be >= 1");
    find_scenario(hardest_scenario);
}

Json PipelineConfig::to_json() const {
    Json gen = generator.to_json();
    return {{"seed", seed},
            {"tool_version", kToolVersion},
            {"generator", gen},
            {"models", models},
            {"instant", instant_to_json(instant)},
            {"esn",
             {{"reservoir_size", esn.reservoir_size},
              {"spectral_radius", esn.spectral_radius},
              {"density", esn.density},
              {"input_scale", esn.input_scale},
              {"feedback", esn.feedback},
              {"feedback_scale", esn.feedback_scale},
              {"activation", esn.activation == Activation::Tanh ? "tanh" : "identity"},
              {"ridge", esn.ridge},
              {"window", window}}},
            {"bnm", {{"bins", bins.to_json()}, {"alpha", bnm_alpha}}},
            {"correction",
             {{"band", correction.band},
              {"delta", correction.delta},
              {"weak_train_fraction", weak_train_fraction},
              {"scenario", hardest_scenario}}},
            {"eval", {{"test_fraction", test_fraction}, {"folds", folds}, {"cross_validate", cross_validate}}},
            {"bench", {{"repetitions", bench_repetitions}, {"windows", bench_windows}}}};
}

PipelineConfig PipelineConfig::from_json(const Json& j, const std::string& base_dir) {
    PipelineConfig cfg;
    object(j, "config");
    std::optional<std::uint64_t> seed;
    for (const auto& [k, v] : j.items()) {
        if (k == "seed") seed = count(v, "seed");
        else if (k == "tool_version") continue;
        else if (k == "generator") cfg.generator = GeneratorConfig::from_json(v);
        else if (k == "generator_config") {
            if (!v.is_string()) throw ConfigError("generator_config: expected a path");
            std::filesystem::path p(v.get<std::string>());
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            std::ifstream in(p);
            if (!in) throw ConfigError("generator_config: cannot open '" + p.string() + "'");
            Json g;
            try {
                g = Json::parse(in);
            } catch (const Json::exception& e) {
                throw ConfigError("generator_config: " + p.string() + ": " + e.what());
            }
            cfg.generator = GeneratorConfig::from_json(g);
            cfg.generator_config_path = p.string();
        } else if (k == "models") {
            if (!v.is_array()) throw ConfigError("models: expected a list of names");
            cfg.models.clear();
            for (const auto& m : v) {
                if (!m.is_string()) throw ConfigError("models: expected a list of names");
                const auto name = canonical_model_name(m.get<std::string>());
                if (std::find(cfg.models.begin(), cfg.models.end(), name) == cfg.models.end()) cfg.models.push_back(name);
            }
        } else if (k == "instant") instant_from_json(v, cfg.instant);
        else if (k == "esn") {
            for (const auto& [a, b] : object(v, "esn").items()) {
                const std::string q = "esn." + a;
                if (a == "reservoir_size") cfg.esn.reservoir_size = static_cast<Eigen::Index>(count(b, q));
                else if (a == "spectral_radius") cfg.esn.spectral_radius = number(b, q);
                else if (a == "density") cfg.esn.density = number(b, q);
                else if (a == "input_scale") cfg.esn.input_scale = number(b, q);
                else if (a == "feedback") cfg.esn.feedback = boolean(b, q);
                else if (a == "feedback_scale") cfg.esn.feedback_scale = number(b, q);
                else if (a == "ridge") cfg.esn.ridge = number(b, q);
                else if (a == "window") cfg.window = count(b, q);
                else if (a == "activation") {
                    const auto s = b.is_string() ? b.get<std::string>() : "";
                    if (s == "tanh") cfg.esn.activation = Activation::Tanh;
                    else if (s == "identity") cfg.esn.activation = Activation::Identity;
                    else throw ConfigError(q + ": expected \"tanh\" or \"identity\"");
                } else unknown(q);
            }
        } else if (k == "bnm") {
            for (const auto& [a, b] : object(v, "bnm").items()) {
                if (a == "bins") cfg.bins = BnBins::from_json(object(b, "bnm.bins"));
                else if (a == "alpha") cfg.bnm_alpha = number(b, "bnm.alpha");
                else unknown("bnm." + a);
            }
        } else if (k == "correction") {
            for (const auto& [a, b] : object(v, "correction").items()) {
                const std::string q = "correction." + a;
                if (a == "band") cfg.correction.band = number(b, q);
                else if (a == "delta") cfg.correction.delta = number(b, q);
                else if (a == "weak_train_fraction") cfg.weak_train_fraction = number(b, q);
                else if (a == "scenario") {
                    if (!b.is_string()) throw ConfigError(q + ": expected a scenario id");
                    cfg.hardest_scenario = b.get<std::string>();
                } else unknown(q);
            }
        } else if (k == "eval") {
            for (const auto& [a, b] : object(v, "eval").items()) {
                const std::string q = "eval." + a;
                if (a == "test_fraction") cfg.test_fraction = number(b, q);
                else if (a == "folds") cfg.folds = count(b, q);
                else if (a == "cross_validate") cfg.cross_validate = boolean(b, q);
                else unknown(q);
            }
        } else if (k == "bench") {
            for (const auto& [a, b] : object(v, "bench").items()) {
                const std::string q = "bench." + a;
                if (a == "repetitions") cfg.bench_repetitions = static_cast<int>(count(b, q));
                else if (a == "windows") cfg.bench_windows = count(b, q);
                else unknown(q);
            }
        } else if (k == "output_dir") {
            if (!v.is_string()) throw ConfigError("output_dir: expected a path");
            cfg.output_dir = v.get<std::string>();
        } else unknown(k);
    }
    cfg.set_seed(seed.value_or(cfg.generator.seed));
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const auto base = std::filesystem::path(path).parent_path().string();
    return from_json(j, base.empty() ? "." : base);
}

std::string PipelineConfig::hash() const { return config_hash(to_json()); }

ArtifactStamp PipelineConfig::stamp() const { return {hash(), seed, std::string(kToolVersion)}; }

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

std::vector<std::size_t> PreparedData::rows_of(const std::string& scenario_id, std::span<const std::size_t> subset) const {
    std::vector<std::size_t> out;
    for (auto r : subset)
        if (dataset.rows[r].scenario_id == scenario_id) out.push_back(r);
    return out;
}

LabeledDataset generate(const PipelineConfig& cfg) {
    const auto scenarios = testbed_scenarios();
    return generate_dataset(cfg.generator, scenarios);
}

namespace {

SplitAssignment make_split(const PipelineConfig& cfg, const LabeledDataset& ds) {
    std::vector<std::string> strata;
    strata.reserve(ds.size());
    for (const auto& r : ds.rows) strata.push_back(r.scenario_id);
    const auto labels = ds.labels();
    return split_and_cv(labels, strata, cfg.test_fraction, cfg.folds, cfg.stream_seed(kSplitStream));
}

}  // namespace

PreparedData prepare(const PipelineConfig& cfg, LabeledDataset dataset) {
    PreparedData d;
    d.split = make_split(cfg, dataset);
    d.labels = dataset.labels();
    auto norm = normalize_features(dataset, d.split.train);
    d.features = std::move(norm.matrix);
    d.scaler = std::move(norm.scaler);
    d.dataset = std::move(dataset);
    return d;
}

PreparedData prepare(const PipelineConfig& cfg, LabeledDataset dataset, FeatureScaler scaler) {
    PreparedData d;
    d.split = make_split(cfg, dataset);
    d.labels = dataset.labels();
    d.features = scaler.transform(raw_feature_matrix(dataset));
    dataset.feature_stats = scaler.stats();
    d.scaler = std::move(scaler);
    d.dataset = std::move(dataset);
    return d;
}

// ---------------------------------------------------------------------------
// Training and scoring
// ---------------------------------------------------------------------------

std::optional<std::size_t> TrainedModels::trainable_parameters(const std::string& name) const {
    if (name == kEsnName) return esn ? std::optional<std::size_t>(esn->trainable_parameters()) : std::nullopt;
    auto it = instant.find(name);
    return it == instant.end() ? std::nullopt : it->second->trainable_parameters();
}

namespace {

FeatureMatrix select_rows(const FeatureMatrix& X, std::span<const std::size_t> rows) {
    FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

std::vector<int> select_labels(const std::vector<int>& y, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(y[r]);
    return out;
}

}  // namespace

EsnModel fit_esn(const EsnParams& params, const PreparedData& data, std::span<const std::size_t> rows,
                 std::size_t window) {
    EsnModel m = init_esn(params);
    if (m.reservoir_resamples) log_warn("esn: reservoir resampled " + std::to_string(m.reservoir_resamples) + " time(s)");
    const auto windows = build_windows(data.dataset, data.features, rows, window);
    train_esn(m, windows);
    return m;
}

TrainedModels train_models(const PipelineConfig& cfg, const PreparedData& data, std::span<const std::size_t> rows) {
    TrainedModels out;
    const FeatureMatrix X = select_rows(data.features, rows);
    const auto y = select_labels(data.labels, rows);
    for (const auto& name : cfg.models) {
        log_info("training " + name + " on " + std::to_string(rows.size()) + " rows");
        if (name == kEsnName) out.esn = fit_esn(cfg.esn, data, rows, cfg.window);
        else out.instant[name] = fit_detector(name, X, y, cfg.instant);
    }
    return out;
}

TrainedModels train_models(const PipelineConfig& cfg, const PreparedData& data) {
    return train_models(cfg, data, data.split.train);
}

std::vector<double> score_rows(const std::string& model, const TrainedModels& m, const PreparedData& data,
                               std::span<const std::size_t> rows, std::size_t window) {
    std::vector<double> out;
    out.reserve(rows.size());
    if (model == kEsnName) {
        if (!m.esn) throw StateError("no trained ESN");
        for (const auto& w : build_windows(data.dataset, data.features, rows, window)) out.push_back(m.esn->score(w.steps));
        return out;
    }
    auto it = m.instant.find(model);
    if (it == m.instant.end()) throw StateError("no trained model '" + model + "'");
    for (auto r : rows) {
        const auto row = data.features.row(static_cast<Eigen::Index>(r));
        out.push_back(it->second->score(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

const ScenarioAuc* ModelEval::scenario(const std::string& id) const {
    for (const auto& s : per_scenario)
        if (s.scenario_id == id) return &s;
    return nullptr;
}

const ModelEval* EvalReport::find(const std::string& model) const {
    for (const auto& m : models)
        if (m.model == model) return &m;
    return nullptr;
}

EvalReport evaluate(const PipelineConfig& cfg, const PreparedData& data, const TrainedModels& models) {
    EvalReport rep;
    rep.stamp = cfg.stamp();
    const auto& test = data.split.test;
    const auto test_labels = select_labels(data.labels, test);
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < test.size(); ++i)
        if (!test_labels[i]) negatives.push_back(i);

    // Fold data: renormalized on each fold's training complement.
    std::vector<PreparedData> fold_data;
    std::vector<TrainedModels> fold_models;
    if (cfg.cross_validate) {
        for (std::size_t f = 0; f < data.split.folds; ++f) {
            PreparedData d;
            d.dataset = data.dataset;
            d.split = data.split;
            d.labels = data.labels;
            const auto train_rows = data.split.fold_complement(f);
            auto norm = normalize_features(d.dataset, train_rows);
            d.features = std::move(norm.matrix);
            d.scaler = std::move(norm.scaler);
            log_info("cross-validation fold " + std::to_string(f));
            fold_models.push_back(train_models(cfg, d, train_rows));
            fold_data.push_back(std::move(d));
        }
    }

    for (const auto& name : cfg.models) {
        ModelEval me;
        me.model = name;
        me.trainable_parameters = models.trainable_parameters(name);
        const auto scores = score_rows(name, models, data, test, cfg.window);
        me.pooled = roc_auc(scores, test_labels);
        me.youden = youden_threshold(me.pooled);
        me.confusion = confusion(scores, test_labels, me.youden.threshold);
        for (const auto& sc : testbed_scenarios()) {
            std::vector<double> s;
            std::vector<int> l;
            for (auto i : negatives) {
                s.push_back(scores[i]);
                l.push_back(0);
            }
            for (std::size_t i = 0; i < test.size(); ++i)
                if (test_labels[i] && data.dataset.rows[test[i]].scenario_id == sc.scenario_id) {
                    s.push_back(scores[i]);
                    l.push_back(1);
                }
            if (s.size() == negatives.size()) continue;
            me.per_scenario.push_back({sc.scenario_id, roc_auc(s, l)});
        }
        if (cfg.cross_validate) {
            double sum = 0;
            for (std::size_t f = 0; f < fold_data.size(); ++f) {
                const auto rows = data.split.fold_rows(f);
                const auto fs = score_rows(name, fold_models[f], fold_data[f], rows, cfg.window);
                me.fold_aucs.push_back(roc_auc(fs, select_labels(data.labels, rows)).auc);
                sum += me.fold_aucs.back();
            }
            me.cv_mean_auc = sum / static_cast<double>(fold_data.size());
        }
        rep.models.push_back(std::move(me));
    }
    return rep;
}

Json EvalReport::to_json() const {
    Json models_j = Json::array();
    for (const auto& m : models) {
        Json per = Json::array();
        for (const auto& s : m.per_scenario)
            per.push_back({{"scenario_id", s.scenario_id},
                           {"auc", s.roc.auc},
                           {"positives", s.roc.positives},
                           {"negatives", s.roc.negatives}});
        models_j.push_back(
            {{"model", m.model},
             {"display_name", display_model_name(m.model)},
             {"test_auc", m.pooled.auc},
             {"cv_mean_auc", m.cv_mean_auc ? Json(*m.cv_mean_auc) : Json()},
             {"fold_aucs", m.fold_aucs},
             {"youden", {{"threshold", m.youden.threshold}, {"j", m.youden.j}, {"tpr", m.youden.tpr}, {"fpr", m.youden.fpr}}},
             {"confusion", m.confusion.to_json()},
             {"trainable_parameters", m.trainable_parameters ? Json(*m.trainable_parameters) : Json()},
             {"per_scenario", per},
             {"roc", m.pooled.to_json()}});
    }
    return {{"format", "jamguard.eval"}, {"stamp", stamp.to_json()}, {"models", models_j}};
}

std::string EvalReport::markdown() const {
    std::ostringstream s;
    char buf[256];
    s << "| Model | Test AUC (pooled) | CV AUC (fold mean) | Youden threshold | TP | TN | FP | FN |\n";
    s << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& m : models) {
        char cv[32] = "-";
        if (m.cv_mean_auc) std::snprintf(cv, sizeof cv, "%.4f", *m.cv_mean_auc);
        std::snprintf(buf, sizeof buf, "| %s | %.4f | %s | %.4f | %zu | %zu | %zu | %zu |\n",
                      display_model_name(m.model).c_str(), m.pooled.auc, cv, m.youden.threshold, m.confusion.tp,
                      m.confusion.tn, m.confusion.fp, m.confusion.fn);
        s << buf;
    }
    if (models.empty()) return s.str();
    s << "\nPer-scenario test AUC (scenario positives against all clean test rows):\n\n| Scenario |";
    for (const auto& m : models) s << " " << display_model_name(m.model) << " |";
    s << "\n|---|";
    for (std::size_t i = 0; i < models.size(); ++i) s << "---:|";
    s << "\n";
    for (const auto& sc : models.front().per_scenario) {
        s << "| " << sc.scenario_id << " |";
        for (const auto& m : models) {
            const auto* p = m.scenario(sc.scenario_id);
            if (p) std::snprintf(buf, sizeof buf, " %.4f |", p->roc.auc);
            else std::snprintf(buf, sizeof buf, " - |");
            s << buf;
        }
        s << "\n";
    }
    return s.str();
}

// ---------------------------------------------------------------------------
// Network and correction
// ---------------------------------------------------------------------------

const JammingScenario& find_scenario(const std::string& id) {
    static const auto all = testbed_scenarios();
    for (const auto& s : all)
        if (s.scenario_id == id) return s;
    throw ConfigError("unknown scenario '" + id + "'");
}

Json BnmResult::to_json(const ArtifactStamp& stamp) const {
    return {{"stamp", stamp.to_json()},
            {"scenario_id", scenario_id},
            {"cell", to_string(cell)},
            {"rows_used", rows_used},
            {"network", net.to_json()}};
}

BnmResult fit_default_bnm(const PipelineConfig& cfg, const PreparedData& data, const std::string& scenario_id) {
    BnmResult r;
    r.scenario_id = scenario_id;
    r.cell = affected_cell(find_scenario(scenario_id).band);
    const auto rows = data.rows_of(scenario_id, data.split.train);
    if (rows.empty()) throw ConfigError("no training rows for scenario '" + scenario_id + "'");
    r.net = build_dag_from_rules(cfg.bins);
    fit_cpts(r.net, data.dataset, rows, r.cell, cfg.bnm_alpha);
    r.rows_used = rows.size();
    return r;
}

Json CorrectionRun::to_json(const ArtifactStamp& stamp, bool include_audit) const {
    return {{"format", "jamguard.correction"},
            {"stamp", stamp.to_json()},
            {"scenario_id", scenario_id},
            {"weak_train_windows", weak_train_windows},
            {"weak_esn_auc", weak_auc},
            {"report", report.to_json(include_audit)}};
}

CorrectionRun run_correction(const PipelineConfig& cfg, const PreparedData& data, const BnmResult& bnm) {
    CorrectionRun run;
    run.scenario_id = bnm.scenario_id;
    const auto train_rows = data.rows_of(bnm.scenario_id, data.split.train);
    const auto test_rows = data.rows_of(bnm.scenario_id, data.split.test);
    if (train_rows.empty() || test_rows.empty())
        throw ConfigError("scenario '" + bnm.scenario_id + "' has no train or test rows");

    // Per-label subsample so that both classes reach the weakened readout.
    Rng rng(cfg.stream_seed(kWeakSubsetStream));
    std::vector<std::size_t> subset;
    for (int label : {0, 1}) {
        std::vector<std::size_t> rows;
        for (auto r : train_rows)
            if (data.labels[r] == label) rows.push_back(r);
        std::shuffle(rows.begin(), rows.end(), rng.engine());
        const auto take = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(cfg.weak_train_fraction * static_cast<double>(rows.size()))));
        subset.insert(subset.end(), rows.begin(), rows.begin() + static_cast<long>(std::min(take, rows.size())));
    }
    std::sort(subset.begin(), subset.end());
    run.weak_train_windows = subset.size();

    TrainedModels weak;
    weak.esn = fit_esn(cfg.esn, data, subset, cfg.window);
    const auto scores = score_rows(kEsnName, weak, data, test_rows, cfg.window);
    const auto labels = select_labels(data.labels, test_rows);
    const auto roc = roc_auc(scores, labels);
    run.weak_auc = roc.auc;
    const double threshold = youden_threshold(roc).threshold;

    std::vector<std::optional<Evidence>> evidence;
    std::vector<KpiSample> samples;
    for (auto r : test_rows) {
        const auto& s = data.dataset.rows[r].cell(bnm.cell);
        evidence.emplace_back(evidence_from_sample(s));
        samples.push_back(s);
    }
    run.report = correct_predictions(scores, labels, threshold, evidence, bnm.net, cfg.correction, samples).report;
    return run;
}

// ---------------------------------------------------------------------------
// Bench
// ---------------------------------------------------------------------------

std::vector<TimingRecord> run_bench(const PipelineConfig& cfg, const PreparedData& data) {
    std::vector<TimingRecord> out;
    const auto& train = data.split.train;
    const std::size_t n = std::min(cfg.bench_windows, data.split.test.size());
    const std::vector<std::size_t> rows(data.split.test.begin(), data.split.test.begin() + static_cast<long>(n));
    const FeatureMatrix X = select_rows(data.features, train);
    const auto y = select_labels(data.labels, train);
    const auto windows = build_windows(data.dataset, data.features, rows, cfg.window);

    for (const auto& name : cfg.models) {
        log_info("benchmarking " + name);
        BenchFit fit;
        std::function<std::optional<std::size_t>()> params;
        if (name == kEsnName) {
            auto model = std::make_shared<EsnModel>();
            fit = [&, model]() -> std::function<double(std::size_t)> {
                *model = fit_esn(cfg.esn, data, train, cfg.window);
                return [&windows, model](std::size_t i) { return model->score(windows[i].steps); };
            };
            params = [model] { return std::optional<std::size_t>(model->trainable_parameters()); };
        } else {
            auto model = std::make_shared<std::unique_ptr<Detector>>();
            fit = [&, model, name]() -> std::function<double(std::size_t)> {
                *model = fit_detector(name, X, y, cfg.instant);
                return [&, model](std::size_t i) {
                    const auto row = data.features.row(static_cast<Eigen::Index>(rows[i]));
                    return (*model)->score(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
                };
            };
            params = [model] { return (*model)->trainable_parameters(); };
        }
        auto rec = bench(display_model_name(name), fit, n, cfg.bench_repetitions);
        rec.trainable_parameters = params();
        out.push_back(rec);
    }
    return out;
}

Json bench_to_json(const std::vector<TimingRecord>& records, const ArtifactStamp& stamp) {
    Json rows = Json::array();
    for (const auto& r : records) rows.push_back(r.to_json());
    return {{"format", "jamguard.bench"}, {"stamp", stamp.to_json()}, {"records", rows}};
}

std::string bench_markdown(const std::vector<TimingRecord>& records) {
    std::ostringstream s;
    s << "| Model | Avg. training time (s) | Avg. inference time (ms) | Trainable parameters |\n";
    s << "|---|---:|---:|---:|\n";
    char buf[200];
    for (const auto& r : records) {
        const std::string params = r.trainable_parameters ? std::to_string(*r.trainable_parameters) : "-";
        std::snprintf(buf, sizeof buf, "| %s | %.4f | %.4f | %s |\n", r.model.c_str(), r.train_seconds,
                      1e3 * r.inference_seconds, params.c_str());
        s << buf;
    }
    return s.str();
}

}  // namespace jamguard
