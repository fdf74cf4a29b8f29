#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamguard/datagen.hpp"

namespace jamguard {

/// Uniform contract of every detector: a jamming score in [0,1] compared against a threshold.
/// The decision is H1 iff score > threshold.
class Detector {
public:
    virtual ~Detector() = default;

    virtual double score(std::span<const double> x) const = 0;
    virtual std::string_view type_name() const = 0;
    /// Trainable parameter count, or nullopt for non-parametric models.
    virtual std::optional<std::size_t> trainable_parameters() const { return std::nullopt; }
    virtual nlohmann::json to_json() const = 0;

    bool predict(std::span<const double> x) const { return score(x) > threshold; }
    std::vector<double> score_rows(const FeatureMatrix& X) const;

    double threshold = 0.5;
};

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LogRegParams {
    double learning_rate = 0.1;
    int iterations = 500;
    double l2 = 1e-4;
    int checkpoint_every = 25;
};

/// Mean cross-entropy + (l2/2)|w|^2 (bias unpenalized) and its gradient [dw..., db].
struct LossAndGradient {
    double loss = 0;
    std::vector<double> gradient;
};
LossAndGradient logreg_objective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                                 std::span<const int> y, double l2);

class LogRegModel final : public Detector {
public:
    std::vector<double> weights;
    double bias = 0;
    std::vector<double> loss_history;  // objective at each checkpoint, starting before the first step

    double score(std::span<const double> x) const override;
    std::string_view type_name() const override { return "logistic_regression"; }
    std::optional<std::size_t> trainable_parameters() const override { return weights.size() + 1; }
    nlohmann::json to_json() const override;
    static LogRegModel from_json(const nlohmann::json& j);
};

/// Batch gradient descent from w = 0 and the clipped prior log-odds as bias.
LogRegModel fit_logreg(const FeatureMatrix& X, std::span<const int> y, const LogRegParams& params = {});

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

class GnbModel final : public Detector {
public:
    std::array<std::vector<double>, 2> means;
    std::array<std::vector<double>, 2> variances;
    std::array<double, 2> priors{0.5, 0.5};
    std::vector<std::size_t> floored_features;  // features whose variance hit the floor

    double score(std::span<const double> x) const override;
    std::string_view type_name() const override { return "gaussian_nb"; }
    nlohmann::json to_json() const override;
    static GnbModel from_json(const nlohmann::json& j);
};

/// Per-class population mean/variance; variances below `variance_floor` are raised to it.
GnbModel fit_gnb(const FeatureMatrix& X, std::span<const int> y, double variance_floor = 1e-9);

// ---------------------------------------------------------------------------
// CART tree and random forest
// ---------------------------------------------------------------------------

struct TreeNode {
    int feature = -1;  // -1 for a leaf
    double threshold = 0;  // go left iff x[feature] <= threshold
    int left = -1;
    int right = -1;
    double value = 0;  // weighted positive fraction
    double gini = 0;
    double weight = 0;  // total sample weight reaching the node
    bool is_leaf() const { return feature < 0; }
};

struct TreeParams {
    int max_depth = 8;
    std::size_t min_leaf = 1;
    /// Features examined per split; 0 means all of them, in index order.
    std::size_t features_per_split = 0;
    std::uint64_t seed = 0;
};

class TreeModel final : public Detector {
public:
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t n_features = 0;

    double score(std::span<const double> x) const override;
    std::string_view type_name() const override { return "tree"; }
    nlohmann::json to_json() const override;
    static TreeModel from_json(const nlohmann::json& j);

    int depth() const;
    /// Total weighted Gini decrease per feature, normalized to sum 1 (all zeros for a stump-free tree).
    std::vector<double> feature_importance() const;
};

struct BestSplit {
    int feature = -1;
    double threshold = 0;
    double child_impurity = 0;  // weighted sum of child Gini impurities
};

/// Exhaustive search over all features and midpoints between consecutive distinct values.
/// Ties resolve to the lowest feature index, then the lowest threshold.
BestSplit find_best_split(const FeatureMatrix& X, std::span<const int> y, std::span<const double> w,
                          std::span<const std::size_t> rows, std::span<const std::size_t> features,
                          std::size_t min_leaf);

/// Weighted CART on Gini impurity. `weights` empty means unit weights.
TreeModel fit_tree(const FeatureMatrix& X, std::span<const int> y, const TreeParams& params = {},
                   std::span<const double> weights = {}, std::span<const std::size_t> rows = {});

struct ForestParams {
    std::size_t n_trees = 100;
    int max_depth = 8;
    std::size_t min_leaf = 1;
    /// Fraction of features examined per split; <= 0 selects sqrt(n_features).
    double feature_frac = -1.0;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

class ForestModel final : public Detector {
public:
    std::vector<TreeModel> trees;

    double score(std::span<const double> x) const override;
    std::string_view type_name() const override { return "random_forest"; }
    nlohmann::json to_json() const override;
    static ForestModel from_json(const nlohmann::json& j);
    std::vector<double> feature_importance() const;
};

ForestModel fit_forest(const FeatureMatrix& X, std::span<const int> y, const ForestParams& params = {});

// ---------------------------------------------------------------------------
// k-nearest neighbours and AdaBoost
// ---------------------------------------------------------------------------

class KnnModel final : public Detector {
public:
    FeatureMatrix train;
    std::vector<int> labels;
    std::size_t k = 5;

    double score(std::span<const double> x) const override;
    std::string_view type_name() const override { return "k_neighbors"; }
    nlohmann::json to_json() const override;
    static KnnModel from_json(const nlohmann::json& j);

    /// Training row indices of the k nearest points, nearest first; distance ties keep lower index.
    std::vector<std::size_t> neighbours(std::span<const double> x) const;
};

KnnModel fit_knn(const FeatureMatrix& X, std::span<const int> y, std::size_t k = 5);

struct Stump {
    int feature = 0;
    double threshold = 0;
    int left_vote = 1;   // +1 jamming, -1 clean
    int right_vote = 1;
    double alpha = 0;
};

class AdaBoostModel final : public Detector {
public:
    std::vector<Stump> stages;

    /// Additive margin sum(alpha_m * h_m(x)).
    double margin(std::span<const double> x) const;
    /// Logistic link 1 / (1 + exp(-2 F(x))).
    double score(std::span<const double> x) const override;
    std::string_view type_name() const override { return "adaboost"; }
    nlohmann::json to_json() const override;
    static AdaBoostModel from_json(const nlohmann::json& j);
};

/// Discrete two-class AdaBoost on depth-1 trees. Stops early on a perfect or no-better-than-chance stump.
AdaBoostModel fit_adaboost(const FeatureMatrix& X, std::span<const int> y, std::size_t n_stumps = 50);

// ---------------------------------------------------------------------------
// Lookup by name
// ---------------------------------------------------------------------------

/// Canonical names accepted by make/load: logistic_regression, gaussian_nb, tree, random_forest,
/// k_neighbors, adaboost. The display names of the run-time table ("Random Forest",
/// "K-Neighbors", "Tree-based", ...) are accepted too, case-insensitively.
std::string canonical_model_name(std::string_view name);
std::string display_model_name(std::string_view canonical);
const std::vector<std::string>& instantaneous_model_names();

struct InstantHyperparams {
    LogRegParams logreg;
    TreeParams tree;
    ForestParams forest;
    std::size_t knn_k = 5;
    std::size_t adaboost_stumps = 50;
};

std::unique_ptr<Detector> fit_detector(std::string_view name, const FeatureMatrix& X, std::span<const int> y,
                                       const InstantHyperparams& hp = {});

/// Versioned JSON document: {"format": "jamguard.model", "version": 1, "type": ..., ...}.
nlohmann::json save_detector(const Detector& d);
std::unique_ptr<Detector> load_detector(const nlohmann::json& j);

}  // namespace jamguard
