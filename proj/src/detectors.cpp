#include "jamguard/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "jamguard/error.hpp"
#include "jamguard/rng.hpp"

namespace jamguard {

namespace {

using Json = nlohmann::json;

void check_training_set(const FeatureMatrix& X, std::span<const int> y) {
    if (X.rows() == 0) throw ConfigError("training set is empty");
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("feature rows and labels differ in length");
    for (int v : y)
        if (v != 0 && v != 1) throw ConfigError("labels must be 0 or 1");
    if (!X.allFinite()) throw DomainError("training features contain non-finite values");
}

std::span<const double> row_span(const FeatureMatrix& X, Eigen::Index i) {
    return {X.row(i).data(), static_cast<std::size_t>(X.cols())};
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Weighted Gini impurity times node weight: 2 P (W - P) / W.
double node_impurity(double w, double p) { return w > 0 ? 2.0 * p * (w - p) / w : 0.0; }

Json matrix_to_json(const FeatureMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto r = row_span(m, i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

FeatureMatrix matrix_from_json(const Json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    const auto d = n ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    FeatureMatrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(r.size()) != d) throw SchemaError("ragged matrix in model file");
        for (Eigen::Index c = 0; c < d; ++c) m(i, c) = r.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

}  // namespace

std::vector<double> Detector::score_rows(const FeatureMatrix& X) const {
    std::vector<double> out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[static_cast<std::size_t>(i)] = score(row_span(X, i));
    return out;
}

// ---------------------------------------------------------------------------

LossAndGradient logreg_objective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                                 std::span<const int> y, double l2) {
    const auto n = X.rows();
    const auto d = static_cast<std::size_t>(X.cols());
    LossAndGradient out;
    out.gradient.assign(d + 1, 0.0);
    Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(d));
    Eigen::VectorXd z = (X * w).array() + bias;
    Eigen::VectorXd residual(n);
    double loss = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yi = y[static_cast<std::size_t>(i)];
        loss += softplus(z[i]) - yi * z[i];
        residual[i] = sigmoid(z[i]) - yi;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::VectorXd gw = X.transpose() * residual * inv_n + l2 * w;
    for (std::size_t j = 0; j < d; ++j) out.gradient[j] = gw[static_cast<Eigen::Index>(j)];
    out.gradient[d] = residual.sum() * inv_n;
    out.loss = loss * inv_n + 0.5 * l2 * w.squaredNorm();
    return out;
}

double LogRegModel::score(std::span<const double> x) const {
    if (x.size() != weights.size()) throw DomainError("logistic regression: input dimension mismatch");
    double z = bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += weights[j] * x[j];
    return sigmoid(z);
}

LogRegModel fit_logreg(const FeatureMatrix& X, std::span<const int> y, const LogRegParams& params) {
    check_training_set(X, y);
    if (params.iterations < 0 || !(params.learning_rate > 0) || !(params.l2 >= 0))
        throw ConfigError("logistic regression: invalid hyperparameters");
    LogRegModel m;
    m.weights.assign(static_cast<std::size_t>(X.cols()), 0.0);
    const double prior = std::clamp(std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size()),
                                    1e-3, 1.0 - 1e-3);
    m.bias = std::log(prior / (1.0 - prior));
    const int every = std::max(1, params.checkpoint_every);
    for (int it = 0; it < params.iterations; ++it) {
        auto lg = logreg_objective(m.weights, m.bias, X, y, params.l2);
        if (it % every == 0) m.loss_history.push_back(lg.loss);
        for (std::size_t j = 0; j < m.weights.size(); ++j) m.weights[j] -= params.learning_rate * lg.gradient[j];
        m.bias -= params.learning_rate * lg.gradient.back();
    }
    m.loss_history.push_back(logreg_objective(m.weights, m.bias, X, y, params.l2).loss);
    return m;
}

Json LogRegModel::to_json() const {
    return {{"weights", weights}, {"bias", bias}, {"loss_history", loss_history}};
}

LogRegModel LogRegModel::from_json(const Json& j) {
    LogRegModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.loss_history = j.value("loss_history", std::vector<double>{});
    return m;
}

// ---------------------------------------------------------------------------

GnbModel fit_gnb(const FeatureMatrix& X, std::span<const int> y, double variance_floor) {
    check_training_set(X, y);
    const auto d = static_cast<std::size_t>(X.cols());
    std::array<double, 2> count{0, 0};
    GnbModel m;
    for (int c = 0; c < 2; ++c) {
        m.means[c].assign(d, 0.0);
        m.variances[c].assign(d, 0.0);
    }
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        int c = y[static_cast<std::size_t>(i)];
        count[c] += 1;
        for (std::size_t j = 0; j < d; ++j) m.means[c][j] += X(i, static_cast<Eigen::Index>(j));
    }
    if (count[0] == 0 || count[1] == 0) throw ConfigError("gaussian naive Bayes needs samples of both classes");
    for (int c = 0; c < 2; ++c)
        for (double& v : m.means[c]) v /= count[c];
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        int c = y[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < d; ++j) {
            double diff = X(i, static_cast<Eigen::Index>(j)) - m.means[c][j];
            m.variances[c][j] += diff * diff;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        bool floored = false;
        for (int c = 0; c < 2; ++c) {
            double& v = m.variances[c][j];
            v /= count[c];
            if (v < variance_floor) {
                v = variance_floor;
                floored = true;
            }
        }
        if (floored) m.floored_features.push_back(j);
    }
    const double n = count[0] + count[1];
    m.priors = {count[0] / n, count[1] / n};
    return m;
}

double GnbModel::score(std::span<const double> x) const {
    if (x.size() != means[0].size()) throw DomainError("gaussian naive Bayes: input dimension mismatch");
    std::array<double, 2> ll{};
    for (int c = 0; c < 2; ++c) {
        double s = std::log(priors[c]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            double diff = x[j] - means[c][j];
            s -= 0.5 * std::log(2.0 * std::numbers::pi * variances[c][j]) + diff * diff / (2.0 * variances[c][j]);
        }
        ll[c] = s;
    }
    return sigmoid(ll[1] - ll[0]);
}

Json GnbModel::to_json() const {
    return {{"means", {means[0], means[1]}},
            {"variances", {variances[0], variances[1]}},
            {"priors", {priors[0], priors[1]}},
            {"floored_features", floored_features}};
}

GnbModel GnbModel::from_json(const Json& j) {
    GnbModel m;
    for (int c = 0; c < 2; ++c) {
        m.means[c] = j.at("means").at(c).get<std::vector<double>>();
        m.variances[c] = j.at("variances").at(c).get<std::vector<double>>();
        m.priors[c] = j.at("priors").at(c).get<double>();
    }
    m.floored_features = j.value("floored_features", std::vector<std::size_t>{});
    return m;
}

// ---------------------------------------------------------------------------

BestSplit find_best_split(const FeatureMatrix& X, std::span<const int> y, std::span<const double> w,
                          std::span<const std::size_t> rows, std::span<const std::size_t> features,
                          std::size_t min_leaf) {
    BestSplit best;
    best.child_impurity = std::numeric_limits<double>::infinity();
    double total_w = 0, total_p = 0;
    for (std::size_t r : rows) {
        total_w += w[r];
        total_p += w[r] * y[r];
    }
    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (std::size_t f : features) {
        const auto fi = static_cast<Eigen::Index>(f);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double va = X(static_cast<Eigen::Index>(a), fi), vb = X(static_cast<Eigen::Index>(b), fi);
            return va < vb || (va == vb && a < b);
        });
        double left_w = 0, left_p = 0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            const std::size_t r = order[k];
            left_w += w[r];
            left_p += w[r] * y[r];
            const double v = X(static_cast<Eigen::Index>(r), fi);
            const double next = X(static_cast<Eigen::Index>(order[k + 1]), fi);
            if (v == next) continue;
            if (k + 1 < min_leaf || order.size() - (k + 1) < min_leaf) continue;
            const double imp = node_impurity(left_w, left_p) + node_impurity(total_w - left_w, total_p - left_p);
            if (imp < best.child_impurity) {
                best.child_impurity = imp;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (v + next);
            }
        }
    }
    return best;
}

namespace {

struct TreeBuilder {
    const FeatureMatrix& X;
    std::span<const int> y;
    std::span<const double> w;
    const TreeParams& params;
    Rng rng;
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> all_features;

    std::vector<std::size_t> candidate_features() {
        const std::size_t n = all_features.size();
        if (params.features_per_split == 0 || params.features_per_split >= n) return all_features;
        std::vector<std::size_t> pool = all_features;
        for (std::size_t i = 0; i < params.features_per_split; ++i) std::swap(pool[i], pool[i + rng.index(n - i)]);
        pool.resize(params.features_per_split);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    int build(std::vector<std::size_t>& rows, int depth) {
        TreeNode node;
        double tw = 0, tp = 0;
        for (std::size_t r : rows) {
            tw += w[r];
            tp += w[r] * y[r];
        }
        node.weight = tw;
        node.value = tw > 0 ? tp / tw : 0.0;
        const double impurity = node_impurity(tw, tp);
        node.gini = tw > 0 ? impurity / tw : 0.0;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(node);

        if (depth >= params.max_depth || impurity <= 0.0 || rows.size() < 2 * std::max<std::size_t>(1, params.min_leaf))
            return id;
        auto features = candidate_features();
        BestSplit split = find_best_split(X, y, w, rows, features, std::max<std::size_t>(1, params.min_leaf));
        if (split.feature < 0 || !(split.child_impurity < impurity * (1.0 - 1e-12))) return id;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows)
            (X(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        nodes[id].feature = split.feature;
        nodes[id].threshold = split.threshold;
        int l = build(left, depth + 1);
        int r = build(right, depth + 1);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }
};

}  // namespace

TreeModel fit_tree(const FeatureMatrix& X, std::span<const int> y, const TreeParams& params,
                   std::span<const double> weights, std::span<const std::size_t> rows) {
    check_training_set(X, y);
    if (params.max_depth < 0) throw ConfigError("tree: max_depth must be >= 0");
    std::vector<double> unit;
    if (weights.empty()) {
        unit.assign(y.size(), 1.0);
        weights = unit;
    } else if (weights.size() != y.size()) {
        throw ConfigError("tree: weights and labels differ in length");
    }
    TreeBuilder b{X, y, weights, params, Rng(params.seed), {}, {}};
    b.all_features.resize(static_cast<std::size_t>(X.cols()));
    std::iota(b.all_features.begin(), b.all_features.end(), std::size_t{0});
    std::vector<std::size_t> active;
    if (rows.empty()) {
        active.resize(y.size());
        std::iota(active.begin(), active.end(), std::size_t{0});
    } else {
        active.assign(rows.begin(), rows.end());
    }
    b.build(active, 0);
    TreeModel m;
    m.nodes = std::move(b.nodes);
    m.n_features = static_cast<std::size_t>(X.cols());
    return m;
}

double TreeModel::score(std::span<const double> x) const {
    if (x.size() != n_features) throw DomainError("tree: input dimension mismatch");
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

int TreeModel::depth() const {
    std::function<int(int)> rec = [&](int i) -> int {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        return n.is_leaf() ? 0 : 1 + std::max(rec(n.left), rec(n.right));
    };
    return nodes.empty() ? 0 : rec(0);
}

std::vector<double> TreeModel::feature_importance() const {
    std::vector<double> imp(n_features, 0.0);
    for (const auto& n : nodes) {
        if (n.is_leaf()) continue;
        const auto& l = nodes[static_cast<std::size_t>(n.left)];
        const auto& r = nodes[static_cast<std::size_t>(n.right)];
        imp[static_cast<std::size_t>(n.feature)] += n.weight * n.gini - l.weight * l.gini - r.weight * r.gini;
    }
    double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0)
        for (double& v : imp) v /= total;
    return imp;
}

Json TreeModel::to_json() const {
    Json arr = Json::array();
    for (const auto& n : nodes)
        arr.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                       {"value", n.value}, {"gini", n.gini}, {"weight", n.weight}});
    return {{"n_features", n_features}, {"nodes", arr}};
}

TreeModel TreeModel::from_json(const Json& j) {
    TreeModel m;
    m.n_features = j.at("n_features").get<std::size_t>();
    for (const auto& e : j.at("nodes")) {
        TreeNode n;
        n.feature = e.at("feature").get<int>();
        n.threshold = e.at("threshold").get<double>();
        n.left = e.at("left").get<int>();
        n.right = e.at("right").get<int>();
        n.value = e.at("value").get<double>();
        n.gini = e.value("gini", 0.0);
        n.weight = e.value("weight", 0.0);
        m.nodes.push_back(n);
    }
    if (m.nodes.empty()) throw SchemaError("tree without nodes");
    const int count = static_cast<int>(m.nodes.size());
    for (const auto& n : m.nodes)
        if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count ||
                             static_cast<std::size_t>(n.feature) >= m.n_features))
            throw SchemaError("tree node references out of range");
    return m;
}

// ---------------------------------------------------------------------------

ForestModel fit_forest(const FeatureMatrix& X, std::span<const int> y, const ForestParams& params) {
    check_training_set(X, y);
    if (params.n_trees < 1) throw ConfigError("random forest: n_trees must be >= 1");
    const auto d = static_cast<std::size_t>(X.cols());
    std::size_t per_split;
    if (params.feature_frac <= 0)
        per_split = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
    else
        per_split = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(params.feature_frac * static_cast<double>(d))),
                                            1, d);
    ForestModel m;
    m.trees.reserve(params.n_trees);
    const std::size_t n = y.size();
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(params.seed, t);
        std::vector<std::size_t> rows(n);
        if (params.bootstrap) {
            Rng rng(mix_seed(tree_seed));
            for (auto& r : rows) r = rng.index(n);
            std::sort(rows.begin(), rows.end());
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        TreeParams tp{params.max_depth, params.min_leaf, per_split >= d ? 0 : per_split, tree_seed};
        m.trees.push_back(fit_tree(X, y, tp, {}, rows));
    }
    return m;
}

double ForestModel::score(std::span<const double> x) const {
    double s = 0;
    for (const auto& t : trees) s += t.score(x);
    return s / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::feature_importance() const {
    std::vector<double> imp;
    for (const auto& t : trees) {
        auto ti = t.feature_importance();
        if (imp.empty()) imp.assign(ti.size(), 0.0);
        for (std::size_t j = 0; j < ti.size(); ++j) imp[j] += ti[j] / static_cast<double>(trees.size());
    }
    return imp;
}

Json ForestModel::to_json() const {
    Json arr = Json::array();
    for (const auto& t : trees) arr.push_back(t.to_json());
    return {{"trees", arr}};
}

ForestModel ForestModel::from_json(const Json& j) {
    ForestModel m;
    for (const auto& t : j.at("trees")) m.trees.push_back(TreeModel::from_json(t));
    if (m.trees.empty()) throw SchemaError("random forest without trees");
    return m;
}

// ---------------------------------------------------------------------------

KnnModel fit_knn(const FeatureMatrix& X, std::span<const int> y, std::size_t k) {
    check_training_set(X, y);
    if (k < 1 || k % 2 == 0) throw ConfigError("k-neighbors: k must be odd and >= 1");
    if (k > y.size()) throw ConfigError("k-neighbors: k exceeds the number of training samples");
    KnnModel m;
    m.train = X;
    m.labels.assign(y.begin(), y.end());
    m.k = k;
    return m;
}

std::vector<std::size_t> KnnModel::neighbours(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(train.cols())) throw DomainError("k-neighbors: input dimension mismatch");
    Eigen::Map<const Eigen::RowVectorXd> q(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd dist = (train.rowwise() - q).rowwise().squaredNorm();
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto closer = [&](std::size_t a, std::size_t b) {
        double da = dist[static_cast<Eigen::Index>(a)], db = dist[static_cast<Eigen::Index>(b)];
        return da < db || (da == db && a < b);
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
    idx.resize(k);
    return idx;
}

double KnnModel::score(std::span<const double> x) const {
    std::size_t pos = 0;
    for (std::size_t i : neighbours(x)) pos += static_cast<std::size_t>(labels[i]);
    return static_cast<double>(pos) / static_cast<double>(k);
}

Json KnnModel::to_json() const { return {{"k", k}, {"labels", labels}, {"train", matrix_to_json(train)}}; }

KnnModel KnnModel::from_json(const Json& j) {
    KnnModel m;
    m.k = j.at("k").get<std::size_t>();
    m.labels = j.at("labels").get<std::vector<int>>();
    m.train = matrix_from_json(j.at("train"));
    if (static_cast<std::size_t>(m.train.rows()) != m.labels.size() || m.k < 1 || m.k > m.labels.size())
        throw SchemaError("k-neighbors model is inconsistent");
    return m;
}

// ---------------------------------------------------------------------------

namespace {

int stump_vote(const Stump& s, std::span<const double> x) {
    if (s.feature < 0) return s.left_vote;
    return x[static_cast<std::size_t>(s.feature)] <= s.threshold ? s.left_vote : s.right_vote;
}

}  // namespace

AdaBoostModel fit_adaboost(const FeatureMatrix& X, std::span<const int> y, std::size_t n_stumps) {
    check_training_set(X, y);
    if (n_stumps < 1) throw ConfigError("adaboost: n_stumps must be >= 1");
    const std::size_t n = y.size();
    std::vector<double> w(n, 1.0);
    AdaBoostModel m;
    constexpr double kMinError = 1e-10;
    for (std::size_t stage = 0; stage < n_stumps; ++stage) {
        TreeModel t = fit_tree(X, y, TreeParams{1, 1, 0, 0}, w);
        Stump s;
        const auto& root = t.nodes[0];
        if (root.is_leaf()) {
            s.feature = -1;
            s.left_vote = s.right_vote = root.value > 0.5 ? 1 : -1;
        } else {
            s.feature = root.feature;
            s.threshold = root.threshold;
            s.left_vote = t.nodes[static_cast<std::size_t>(root.left)].value > 0.5 ? 1 : -1;
            s.right_vote = t.nodes[static_cast<std::size_t>(root.right)].value > 0.5 ? 1 : -1;
        }
        double err = 0, total = 0;
        std::vector<int> h(n);
        for (std::size_t i = 0; i < n; ++i) {
            h[i] = stump_vote(s, row_span(X, static_cast<Eigen::Index>(i)));
            const int target = y[i] ? 1 : -1;
            if (h[i] != target) err += w[i];
            total += w[i];
        }
        err /= total;
        if (err >= 0.5) {
            if (m.stages.empty()) {
                s.alpha = 0.0;
                m.stages.push_back(s);
            }
            break;
        }
        const bool perfect = err < kMinError;
        err = std::max(err, kMinError);
        s.alpha = 0.5 * std::log((1.0 - err) / err);
        m.stages.push_back(s);
        if (perfect) break;
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const int target = y[i] ? 1 : -1;
            w[i] *= std::exp(-s.alpha * target * h[i]);
            sum += w[i];
        }
        for (double& v : w) v *= static_cast<double>(n) / sum;
    }
    return m;
}

double AdaBoostModel::margin(std::span<const double> x) const {
    double f = 0;
    for (const auto& s : stages) f += s.alpha * stump_vote(s, x);
    return f;
}

double AdaBoostModel::score(std::span<const double> x) const { return sigmoid(2.0 * margin(x)); }

Json AdaBoostModel::to_json() const {
    Json arr = Json::array();
    for (const auto& s : stages)
        arr.push_back({{"feature", s.feature}, {"threshold", s.threshold}, {"left_vote", s.left_vote},
                       {"right_vote", s.right_vote}, {"alpha", s.alpha}});
    return {{"stages", arr}};
}

AdaBoostModel AdaBoostModel::from_json(const Json& j) {
    AdaBoostModel m;
    for (const auto& e : j.at("stages"))
        m.stages.push_back({e.at("feature").get<int>(), e.at("threshold").get<double>(), e.at("left_vote").get<int>(),
                            e.at("right_vote").get<int>(), e.at("alpha").get<double>()});
    for (const auto& s : m.stages)
        if (!std::isfinite(s.alpha)) throw SchemaError("adaboost stage weight is not finite");
    return m;
}

// ---------------------------------------------------------------------------

namespace {

struct NameEntry {
    std::string canonical;
    std::string display;
};

const std::vector<NameEntry>& name_table() {
    static const std::vector<NameEntry> t{{"logistic_regression", "Logistic Regression"},
                                          {"k_neighbors", "K-Neighbors"},
                                          {"gaussian_nb", "Gaussian NB"},
                                          {"random_forest", "Random Forest"},
                                          {"adaboost", "AdaBoost"},
                                          {"tree", "Tree-based"},
                                          {"esn", "ESN"}};
    return t;
}

std::string fold(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '-' || c == '_') continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

std::string canonical_model_name(std::string_view name) {
    const std::string key = fold(name);
    for (const auto& e : name_table())
        if (fold(e.canonical) == key || fold(e.display) == key) return e.canonical;
    if (key == "decisiontree" || key == "treebased") return "tree";
    if (key == "knn") return "k_neighbors";
    if (key == "logreg") return "logistic_regression";
    if (key == "gnb") return "gaussian_nb";
    throw ConfigError("unknown model name '" + std::string(name) + "'");
}

std::string display_model_name(std::string_view canonical) {
    for (const auto& e : name_table())
        if (e.canonical == canonical) return e.display;
    return std::string(canonical);
}

const std::vector<std::string>& instantaneous_model_names() {
    static const std::vector<std::string> names{"logistic_regression", "k_neighbors", "gaussian_nb",
                                                "random_forest",       "adaboost",    "tree"};
    return names;
}

std::unique_ptr<Detector> fit_detector(std::string_view name, const FeatureMatrix& X, std::span<const int> y,
                                       const InstantHyperparams& hp) {
    const std::string n = canonical_model_name(name);
    if (n == "logistic_regression") return std::make_unique<LogRegModel>(fit_logreg(X, y, hp.logreg));
    if (n == "gaussian_nb") return std::make_unique<GnbModel>(fit_gnb(X, y));
    if (n == "tree") return std::make_unique<TreeModel>(fit_tree(X, y, hp.tree));
    if (n == "random_forest") return std::make_unique<ForestModel>(fit_forest(X, y, hp.forest));
    if (n == "k_neighbors") return std::make_unique<KnnModel>(fit_knn(X, y, hp.knn_k));
    if (n == "adaboost") return std::make_unique<AdaBoostModel>(fit_adaboost(X, y, hp.adaboost_stumps));
    throw ConfigError("model '" + n + "' is not an instantaneous detector");
}

Json save_detector(const Detector& d) {
    return {{"format", "jamguard.model"},
            {"version", 1},
            {"type", d.type_name()},
            {"threshold", d.threshold},
            {"model", d.to_json()}};
}

std::unique_ptr<Detector> load_detector(const Json& j) {
    try {
        if (j.at("format").get<std::string>() != "jamguard.model") throw SchemaError("not a jamguard model document");
        if (j.at("version").get<int>() != 1) throw SchemaError("unsupported model document version");
        const std::string type = j.at("type").get<std::string>();
        const Json& body = j.at("model");
        std::unique_ptr<Detector> d;
        if (type == "logistic_regression") d = std::make_unique<LogRegModel>(LogRegModel::from_json(body));
        else if (type == "gaussian_nb") d = std::make_unique<GnbModel>(GnbModel::from_json(body));
        else if (type == "tree") d = std::make_unique<TreeModel>(TreeModel::from_json(body));
        else if (type == "random_forest") d = std::make_unique<ForestModel>(ForestModel::from_json(body));
        else if (type == "k_neighbors") d = std::make_unique<KnnModel>(KnnModel::from_json(body));
        else if (type == "adaboost") d = std::make_unique<AdaBoostModel>(AdaBoostModel::from_json(body));
        else throw SchemaError("unknown model type '" + type + "'");
        d->threshold = j.at("threshold").get<double>();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("model document: ") + e.what());
    }
}

}  // namespace jamguard
