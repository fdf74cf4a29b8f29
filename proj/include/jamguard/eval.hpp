#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace jamguard {

struct Confusion {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    std::size_t errors() const { return fp + fn; }
    double tpr() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
    double fpr() const { return fp + tn ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0; }
    double accuracy() const { return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0; }
    void add(int label, int prediction);
    nlohmann::json to_json() const;
    bool operator==(const Confusion&) const = default;
};

Confusion confusion(std::span<const double> scores, std::span<const int> labels, double threshold);
Confusion confusion_from_predictions(std::span<const int> predictions, std::span<const int> labels);

struct RocPoint {
    double threshold = 0;  // predict positive iff score > threshold
    double fpr = 0;
    double tpr = 0;
    std::size_t fp = 0;
    std::size_t tp = 0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // thresholds descending, from (0,0) to (1,1)
    double auc = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;

    nlohmann::json to_json() const;
};

/// One point per distinct score used as threshold, plus a final sentinel just below the minimum.
/// AUC by the trapezoid rule. Throws DomainError when only one class is present.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

struct YoudenPoint {
    double threshold = 0;
    double j = 0;
    double tpr = 0;
    double fpr = 0;
};

/// Maximizer of TPR - FPR over the curve points; ties resolve to the lower threshold.
YoudenPoint youden_threshold(const RocCurve& roc);

struct SplitAssignment {
    std::vector<std::size_t> train;  // ascending row indices
    std::vector<std::size_t> test;   // ascending row indices
    std::vector<int> fold;           // per dataset row, -1 for test rows
    std::size_t folds = 0;

    std::vector<std::size_t> fold_rows(std::size_t f) const;
    std::vector<std::size_t> fold_complement(std::size_t f) const;  // training rows outside fold f
    nlohmann::json to_json() const;
    static SplitAssignment from_json(const nlohmann::json& j);
};

/// Stratified by (label, stratum key). Within each stratum rows are shuffled by a seeded stream,
/// strata are concatenated in key order, every 1/test_frac-th position goes to the test set and
/// training positions are dealt round-robin into folds.
SplitAssignment split_and_cv(std::span<const int> labels, std::span<const std::string> strata, double test_frac = 0.25,
                             std::size_t folds = 5, std::uint64_t seed = 0);

struct TimingRecord {
    std::string model;
    double train_seconds = 0;      // median over repetitions
    double inference_seconds = 0;  // median per-window time
    double max_inference_seconds = 0;  // slowest single window seen
    std::optional<std::size_t> trainable_parameters;
    int repetitions = 0;

    nlohmann::json to_json() const;
};

/// Train-and-return-scorer callback for bench(): the returned function scores test window i.
using BenchFit = std::function<std::function<double(std::size_t)>()>;

/// Median wall-clock training time and per-window inference time over `repetitions` runs.
TimingRecord bench(const std::string& model, const BenchFit& fit, std::size_t windows, int repetitions,
                   std::optional<std::size_t> trainable_parameters = std::nullopt);

double median(std::vector<double> v);

void write_roc_csv(std::ostream& out, const RocCurve& roc);
/// Minimal standalone SVG with one polyline per labelled curve and the chance diagonal.
std::string roc_svg(const std::vector<std::pair<std::string, const RocCurve*>>& curves, const std::string& title);

}  // namespace jamguard
