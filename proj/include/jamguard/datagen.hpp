#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "jamguard/artifact.hpp"
#include "jamguard/kpi.hpp"
#include "jamguard/rng.hpp"

namespace jamguard {

/// Row-major so that a row is a contiguous feature vector.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Label { H0 = 0, H1 = 1 };

inline constexpr std::size_t kPairedFeatureCount = 2 * kKpiCount;

/// Mean and jamming response of a KPI drawn directly rather than derived along the causal chain.
struct FeatureConditional {
    double mean = 0;
    double effect_per_db = 0;  // mean shift per dB of SNR degradation
};

/// Parameters of the causal generator.
///
/// Jamming enters as an SNR degradation `shift` (dB) on the cell it targets and
/// `cross_cell_coupling * shift` on the other cell. Everything downstream follows the
/// causal chain SNR -> efficiency -> CQI -> MCS -> bitrate, plus a direct jamming term on
/// the CQI efficiency. Noise standard deviations are in each KPI's own unit, except CQI and
/// MCS (efficiency units, bit/s/Hz) and bit/packet rates (relative).
struct GeneratorConfig {
    double baseline_snr_mean_db = 18.0;
    double baseline_snr_std_db = 2.5;
    std::map<std::string, double> snr_degradation_db_per_scenario;
    double retx_logistic_slope = 0.6;         // 1/dB
    double retx_logistic_midpoint_db = 6.0;   // dB
    double bitrate_per_efficiency = 10.0e6;   // bit/s per bit/s/Hz
    std::array<double, kKpiCount> feature_noise_std{};
    std::size_t samples_per_scenario = 400;
    std::int64_t sampling_period_ms = 180;
    std::uint64_t seed = 42;

    double cross_cell_coupling = 0.2;
    double cqi_efficiency_shift_per_db = 0.05;  // direct jamming effect on reported CQI
    double ul_efficiency_backoff = 1.0;         // bit/s/Hz
    double ul_bitrate_fraction = 0.4;
    double packet_size_bits = 12000.0;
    double rank2_snr_threshold_db = 16.0;
    std::array<FeatureConditional, kKpiCount> conditionals{};  // read for headroom, EPRE, path loss, turbo rates

    /// Default degradation shifts for the testbed scenarios; all noise terms enabled.
    static GeneratorConfig defaults();

    void validate() const;
    nlohmann::json to_json() const;
    /// Missing keys take their default values; unknown keys are a ConfigError naming the path.
    static GeneratorConfig from_json(const nlohmann::json& j);
};

/// Degradation in dB for a scenario on the targeted cell. Throws ConfigError if unconfigured.
double degradation_shift(const GeneratorConfig& cfg, const JammingScenario& scenario);

/// Draw one KPI snapshot for `cell` along the causal chain, under H1 if `jamming` is set.
KpiSample causal_sample(const std::optional<JammingScenario>& jamming, Cell cell, const GeneratorConfig& cfg,
                        Rng& rng, const MappingTables& tables = MappingTables::standard());

struct FeatureStat {
    double mean = 0;
    double stddev = 1;
    bool zero_variance = false;
    bool operator==(const FeatureStat&) const = default;
};

/// One timestamp: the NR and LTE cell snapshots, label and originating recording session.
struct DatasetRow {
    KpiSample nr;
    KpiSample lte;
    Label label = Label::H0;
    std::string scenario_id;  // session id; H0 rows carry the session they were recorded in

    const KpiSample& cell(Cell c) const { return c == Cell::NR ? nr : lte; }
    /// [NR features | LTE features]
    std::array<double, kPairedFeatureCount> features() const;
    bool operator==(const DatasetRow&) const = default;
};

struct LabeledDataset {
    std::vector<DatasetRow> rows;
    std::vector<FeatureStat> feature_stats;  // filled by normalize_features

    std::size_t size() const { return rows.size(); }
    std::vector<int> labels() const;
    bool operator==(const LabeledDataset&) const = default;
};

/// For each scenario: samples_per_scenario H0 rows then as many H1 rows, timestamps advancing
/// by the sampling period. Each scenario uses its own stream seeded from (seed, position).
LabeledDataset generate_dataset(const GeneratorConfig& cfg, std::span<const JammingScenario> scenarios,
                                const MappingTables& tables = MappingTables::standard());

/// z-score transform fitted on a subset of rows.
class FeatureScaler {
public:
    FeatureScaler() = default;
    explicit FeatureScaler(std::vector<FeatureStat> stats) : stats_(std::move(stats)) {}

    /// Population statistics over `rows` of `raw`. A zero-variance column passes through unscaled.
    static FeatureScaler fit(const FeatureMatrix& raw, std::span<const std::size_t> rows);

    void apply(std::span<double> x) const;
    FeatureMatrix transform(const FeatureMatrix& raw) const;
    const std::vector<FeatureStat>& stats() const { return stats_; }

    nlohmann::json to_json() const;
    static FeatureScaler from_json(const nlohmann::json& j);

private:
    std::vector<FeatureStat> stats_;
};

FeatureMatrix raw_feature_matrix(const LabeledDataset& ds);

struct NormalizedFeatures {
    FeatureMatrix matrix;  // one 34-dimensional row per dataset row
    FeatureScaler scaler;
};

/// Standardize every row with statistics of `train_rows` only; records them in dataset.feature_stats.
NormalizedFeatures normalize_features(LabeledDataset& dataset, std::span<const std::size_t> train_rows);

/// CSV with one line per (timestamp, cell). An optional stamp is written as a leading '#' comment.
void write_dataset(std::ostream& out, const LabeledDataset& ds, const std::optional<ArtifactStamp>& stamp = {});
void write_dataset(const std::string& path, const LabeledDataset& ds,
                   const std::optional<ArtifactStamp>& stamp = {});
LabeledDataset read_dataset(std::istream& in, std::optional<ArtifactStamp>* stamp = nullptr);
LabeledDataset read_dataset(const std::string& path, std::optional<ArtifactStamp>* stamp = nullptr);

std::vector<std::string> dataset_csv_header();

}  // namespace jamguard
