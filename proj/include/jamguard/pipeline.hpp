#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamguard/artifact.hpp"
#include "jamguard/bayesnet.hpp"
#include "jamguard/correction.hpp"
#include "jamguard/datagen.hpp"
#include "jamguard/detectors.hpp"
#include "jamguard/esn.hpp"
#include "jamguard/eval.hpp"

namespace jamguard {

inline constexpr const char* kEsnName = "esn";

struct PipelineConfig {
    GeneratorConfig generator = GeneratorConfig::defaults();
    std::optional<std::string> generator_config_path;  // generator section read from this file
    std::vector<std::string> models;                   // canonical names; the ESN is "esn"
    InstantHyperparams instant;
    EsnParams esn;
    std::size_t window = 2;
    BnBins bins;
    double bnm_alpha = 1.0;
    CorrectionParams correction;
    double weak_train_fraction = 0.1;
    std::string hardest_scenario = "lte_dl_2140_m13dbm";
    double test_fraction = 0.25;
    std::size_t folds = 5;
    bool cross_validate = true;
    int bench_repetitions = 3;
    std::size_t bench_windows = 256;
    std::string output_dir = "jamguard_out";
    std::uint64_t seed = 42;

    PipelineConfig();

    /// Sets the master seed; the generator and every model seed derive from it.
    void set_seed(std::uint64_t s);
    void validate() const;

    /// Everything that influences results. The output directory is left out.
    nlohmann::json to_json() const;
    /// Unknown keys are a ConfigError naming their path. Relative paths resolve against `base_dir`.
    static PipelineConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
    static PipelineConfig load(const std::string& path);

    std::string hash() const;
    ArtifactStamp stamp() const;
    std::uint64_t stream_seed(std::uint64_t stream) const { return derive_seed(seed, stream); }
};

/// Dataset with its split and training-split normalization.
struct PreparedData {
    LabeledDataset dataset;
    SplitAssignment split;
    FeatureScaler scaler;
    FeatureMatrix features;  // normalized, one row per dataset row
    std::vector<int> labels;

    std::vector<std::size_t> rows_of(const std::string& scenario_id, std::span<const std::size_t> subset) const;
};

LabeledDataset generate(const PipelineConfig& cfg);
PreparedData prepare(const PipelineConfig& cfg, LabeledDataset dataset);
/// Same as prepare() but with a previously fitted scaler.
PreparedData prepare(const PipelineConfig& cfg, LabeledDataset dataset, FeatureScaler scaler);

struct TrainedModels {
    std::map<std::string, std::unique_ptr<Detector>> instant;
    std::optional<EsnModel> esn;

    std::optional<std::size_t> trainable_parameters(const std::string& name) const;
};

/// Scores of `rows` under `model` (an instantaneous name or "esn").
std::vector<double> score_rows(const std::string& model, const TrainedModels& m, const PreparedData& data,
                               std::span<const std::size_t> rows, std::size_t window);

EsnModel fit_esn(const EsnParams& params, const PreparedData& data, std::span<const std::size_t> rows,
                 std::size_t window);
TrainedModels train_models(const PipelineConfig& cfg, const PreparedData& data,
                           std::span<const std::size_t> rows);
TrainedModels train_models(const PipelineConfig& cfg, const PreparedData& data);

struct ScenarioAuc {
    std::string scenario_id;
    RocCurve roc;
};

struct ModelEval {
    std::string model;
    RocCurve pooled;
    YoudenPoint youden;
    Confusion confusion;
    std::vector<ScenarioAuc> per_scenario;
    std::vector<double> fold_aucs;
    std::optional<double> cv_mean_auc;
    std::optional<std::size_t> trainable_parameters;

    const ScenarioAuc* scenario(const std::string& id) const;
};

struct EvalReport {
    ArtifactStamp stamp;
    std::vector<ModelEval> models;

    const ModelEval* find(const std::string& model) const;
    nlohmann::json to_json() const;
    std::string markdown() const;
};

/// Held-out test evaluation (pooled and per scenario against the shared H0 negatives) plus
/// fold-averaged cross-validation AUC when enabled.
EvalReport evaluate(const PipelineConfig& cfg, const PreparedData& data, const TrainedModels& models);

struct BnmResult {
    DiscreteBayesNet net;
    std::string scenario_id;
    Cell cell = Cell::LTE;
    std::size_t rows_used = 0;

    nlohmann::json to_json(const ArtifactStamp& stamp) const;
};

const JammingScenario& find_scenario(const std::string& id);
/// Rule DAG fitted on the training rows of `scenario_id`, using the KPIs of the cell it targets.
BnmResult fit_default_bnm(const PipelineConfig& cfg, const PreparedData& data, const std::string& scenario_id);

struct CorrectionRun {
    CorrectionReport report;
    std::string scenario_id;
    std::size_t weak_train_windows = 0;
    double weak_auc = 0;

    nlohmann::json to_json(const ArtifactStamp& stamp, bool include_audit = true) const;
};

/// Weakened ESN (trained on `weak_train_fraction` of the scenario's training rows) scored on the
/// scenario's test rows, thresholded at its Youden point and corrected by `bnm`.
CorrectionRun run_correction(const PipelineConfig& cfg, const PreparedData& data, const BnmResult& bnm);

std::vector<TimingRecord> run_bench(const PipelineConfig& cfg, const PreparedData& data);
nlohmann::json bench_to_json(const std::vector<TimingRecord>& records, const ArtifactStamp& stamp);
/// Run-time table: model, median training time, median per-window inference time, parameters.
std::string bench_markdown(const std::vector<TimingRecord>& records);

}  // namespace jamguard
