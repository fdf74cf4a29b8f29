#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamguard/bayesnet.hpp"
#include "jamguard/eval.hpp"
#include "jamguard/kpi.hpp"

namespace jamguard {

struct CorrectionParams {
    double delta = 0.1;  // posterior margin beyond 0.5 required to flip
    double band = 0.2;   // |score - threshold| <= band marks a prediction as uncertain

    void validate() const;
};

enum class CorrectionAction { OutOfBand, Kept, FlippedToJamming, FlippedToClean, Skipped };
std::string_view to_string(CorrectionAction a);

struct AuditRow {
    std::size_t sample = 0;
    int label = 0;
    double score = 0;
    int before = 0;
    int after = 0;
    std::optional<double> posterior;  // Pr(jamming | KPIs), absent when not consulted
    CorrectionAction action = CorrectionAction::OutOfBand;
};

/// Mean of the four network KPIs over one confusion quadrant.
struct QuadrantMeans {
    std::size_t count = 0;
    double pusch_snr_db = 0;
    double cqi = 0;
    double dl_mcs = 0;
    double ul_mcs = 0;
};

/// Indexed by quadrant: TP, TN, FP, FN. Empty quadrants have no means.
struct ClusterSummary {
    std::array<std::optional<QuadrantMeans>, 4> quadrants;
    static constexpr std::array<const char*, 4> kNames{"TP", "TN", "FP", "FN"};

    const std::optional<QuadrantMeans>& tp() const { return quadrants[0]; }
    const std::optional<QuadrantMeans>& tn() const { return quadrants[1]; }
    const std::optional<QuadrantMeans>& fp() const { return quadrants[2]; }
    const std::optional<QuadrantMeans>& fn() const { return quadrants[3]; }
};

ClusterSummary error_cluster_summary(std::span<const int> predictions, std::span<const int> labels,
                                     std::span<const KpiSample> samples);

/// Post hoc reading: one posterior per error quadrant evaluated at its KPI means; a quadrant
/// counts as fixed when that posterior contradicts the prediction by more than delta.
struct GroupMeanReading {
    std::optional<double> fn_posterior;
    std::optional<double> fp_posterior;
    std::size_t fn_fixed = 0;
    std::size_t fp_fixed = 0;
    double combined_fixed_fraction = 0;
};

struct CorrectionReport {
    Confusion before;
    Confusion after;
    std::size_t fn_fixed = 0;
    std::size_t fp_fixed = 0;
    double fn_fixed_fraction = 0;
    double fp_fixed_fraction = 0;
    double combined_fixed_fraction = 0;
    std::size_t newly_broken_count = 0;
    std::size_t in_band_count = 0;
    std::size_t skipped_count = 0;
    double threshold = 0.5;
    CorrectionParams params;
    std::vector<AuditRow> audit;
    ClusterSummary clusters;  // of the uncorrected predictions
    GroupMeanReading group_mean;

    nlohmann::json to_json(bool include_audit = true) const;
    /// Quadrant table: prediction type, count, four KPI means, Pr(jamming) at the means.
    std::string markdown(const DiscreteBayesNet& net) const;
};

struct CorrectionResult {
    std::vector<int> corrected;
    CorrectionReport report;
};

/// Per-sample correction of thresholded detector scores. `evidence[i]` empty or lacking a KPI
/// node skips that sample. `samples` (optional, same length) feeds the quadrant summary.
CorrectionResult correct_predictions(std::span<const double> scores, std::span<const int> labels, double threshold,
                                     std::span<const std::optional<Evidence>> evidence, const DiscreteBayesNet& net,
                                     const CorrectionParams& params = {},
                                     std::span<const KpiSample> samples = {});

}  // namespace jamguard
