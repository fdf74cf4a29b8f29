#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "jamguard/detectors.hpp"
#include "jamguard/error.hpp"

using namespace jamguard;

namespace {

struct Data {
    FeatureMatrix X;
    std::vector<int> y;
};

// Two Gaussian blobs centred at -/+ offset on every axis.
Data blobs(std::size_t n_per_class, Eigen::Index dims, double offset, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z;
    Data d;
    d.X.resize(static_cast<Eigen::Index>(2 * n_per_class), dims);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int label = i % 2 ? 1 : 0;
        for (Eigen::Index j = 0; j < dims; ++j)
            d.X(static_cast<Eigen::Index>(i), j) = (label ? offset : -offset) + z(g);
        d.y.push_back(label);
    }
    return d;
}

std::span<const double> row(const FeatureMatrix& X, Eigen::Index i) {
    return {X.data() + i * X.cols(), static_cast<std::size_t>(X.cols())};
}

double accuracy(const Detector& d, const Data& data) {
    std::size_t ok = 0;
    for (Eigen::Index i = 0; i < data.X.rows(); ++i)
        ok += d.predict(row(data.X, i)) == (data.y[static_cast<std::size_t>(i)] == 1);
    return static_cast<double>(ok) / static_cast<double>(data.y.size());
}

double gini(double pos, double n) {
    if (n == 0) return 0;
    const double p = pos / n;
    return 1 - p * p - (1 - p) * (1 - p);
}

}  // namespace

TEST_CASE("logistic regression: separable data, monotone loss, gradient oracle") {
    Data d;
    d.X.resize(20, 1);
    for (int i = 0; i < 20; ++i) {
        d.X(i, 0) = i < 10 ? -1.0 - 0.1 * i : 1.0 + 0.1 * i;
        d.y.push_back(i < 10 ? 0 : 1);
    }
    const auto m = fit_logreg(d.X, d.y);
    CHECK(accuracy(m, d) == 1.0);
    for (std::size_t i = 1; i < m.loss_history.size(); ++i) CHECK(m.loss_history[i] <= m.loss_history[i - 1] + 1e-9);

    auto blob = blobs(40, 3, 1.0, 3);
    LogRegParams p;
    p.iterations = 3000;
    const auto fit = fit_logreg(blob.X, blob.y, p);
    const auto an = logreg_objective(fit.weights, fit.bias, blob.X, blob.y, p.l2);
    const double h = 1e-5;
    double max_diff = 0;
    for (std::size_t j = 0; j <= fit.weights.size(); ++j) {
        auto wp = fit.weights, wm = fit.weights;
        double bp = fit.bias, bm = fit.bias;
        if (j < wp.size()) {
            wp[j] += h;
            wm[j] -= h;
        } else {
            bp += h;
            bm -= h;
        }
        const double fd = (logreg_objective(wp, bp, blob.X, blob.y, p.l2).loss -
                           logreg_objective(wm, bm, blob.X, blob.y, p.l2).loss) / (2 * h);
        max_diff = std::max(max_diff, std::abs(fd - an.gradient[j]));
    }
    CHECK(max_diff <= 1e-6);
}

TEST_CASE("logistic regression: single-label input scores the clipped prior") {
    FeatureMatrix X(6, 1);
    X << -1, -0.5, 0, 0, 0.5, 1;
    const std::vector<int> y(6, 1);
    const auto m = fit_logreg(X, y);
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(m.score(row(X, i)) == doctest::Approx(m.score(row(X, 0))).epsilon(1e-3));
    CHECK(m.score(row(X, 2)) > 0.99);
    FeatureMatrix bad = X;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(fit_logreg(bad, std::vector<int>{0, 1, 0, 1, 0, 1}), DomainError);
}

TEST_CASE("gaussian naive Bayes against the closed-form posterior") {
    FeatureMatrix X(4, 1);
    X << -2, 0, 0, 2;  // class 0 at {-2, 0}: mean -1 var 1, class 1 at {0, 2}: mean 1 var 1
    const std::vector<int> y{0, 0, 1, 1};
    const auto m = fit_gnb(X, y);
    CHECK(m.means[0][0] == doctest::Approx(-1));
    CHECK(m.variances[1][0] == doctest::Approx(1));
    const double zero = 0.0;
    CHECK(m.score({&zero, 1}) == doctest::Approx(0.5).epsilon(1e-12));

    FeatureMatrix Z(5, 1);
    Z << 0, 1, 4, 5, 9;
    const std::vector<int> yz{0, 0, 0, 1, 1};
    const auto g = fit_gnb(Z, yz);
    // Population statistics: class 0 {0,1,4}, class 1 {5,9}.
    const double m0 = 5.0 / 3, v0 = (m0 * m0 + (1 - m0) * (1 - m0) + (4 - m0) * (4 - m0)) / 3;
    const double m1 = 7, v1 = 4;
    for (double x : {-1.0, 2.0, 4.5, 6.0}) {
        const double l0 = 0.6 * std::exp(-(x - m0) * (x - m0) / (2 * v0)) / std::sqrt(v0);
        const double l1 = 0.4 * std::exp(-(x - m1) * (x - m1) / (2 * v1)) / std::sqrt(v1);
        CHECK(std::abs(g.score({&x, 1}) - l1 / (l0 + l1)) <= 1e-10);
    }

    auto far = blobs(50, 2, 10.0, 1);
    const auto f = fit_gnb(far.X, far.y);
    std::vector<double> at_pos(2, 10.0);
    CHECK(f.score(at_pos) > 1 - 1e-12);

    FeatureMatrix c(4, 2);
    c << 1, 0, 1, 1, 1, 2, 1, 3;
    const auto fl = fit_gnb(c, std::vector<int>{0, 0, 1, 1});
    CHECK(fl.floored_features == std::vector<std::size_t>{0});
    CHECK(fl.variances[0][0] >= 1e-9);
}

TEST_CASE("tree: XOR at depth 2, pure leaves, respects max depth") {
    // XOR corners with unequal multiplicities: the x split lowers Gini, the y split does not.
    // With four equal quadrants no single split helps and the greedy root stays a leaf.
    const std::array<std::array<int, 3>, 4> quad{{{1, 1, 12}, {-1, -1, 4}, {1, -1, 4}, {-1, 1, 12}}};
    FeatureMatrix X(32, 2);
    std::vector<int> y;
    Eigen::Index r = 0;
    for (const auto& q : quad)
        for (int i = 0; i < q[2]; ++i, ++r) {
            X(r, 0) = q[0];
            X(r, 1) = q[1];
            y.push_back(q[0] != q[1]);
        }
    TreeParams stump;
    stump.max_depth = 1;
    CHECK(accuracy(fit_tree(X, y, stump), {X, y}) < 1.0);
    TreeParams p;
    p.max_depth = 2;
    const auto t = fit_tree(X, y, p);
    CHECK(accuracy(t, {X, y}) == 1.0);
    CHECK(t.depth() <= 2);

    FeatureMatrix P(3, 1);
    P << 1, 2, 3;
    const auto pure = fit_tree(P, std::vector<int>{1, 1, 1});
    CHECK(pure.nodes.size() == 1);
    CHECK(pure.nodes[0].is_leaf());
    CHECK(pure.nodes[0].value == 1.0);
}

TEST_CASE("tree root split equals brute-force best split on 20 points") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 g(seed);
        std::normal_distribution<double> z;
        FeatureMatrix X(20, 3);
        std::vector<int> y;
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 3; ++j) X(i, j) = z(g);
            y.push_back(X(i, 1) + 0.5 * z(g) > 0);
        }
        if (std::count(y.begin(), y.end(), 1) % 20 == 0) continue;
        int best_f = -1;
        double best_t = 0, best_imp = 1e300;
        for (int f = 0; f < 3; ++f) {
            std::vector<double> v(20);
            for (int i = 0; i < 20; ++i) v[static_cast<std::size_t>(i)] = X(i, f);
            std::sort(v.begin(), v.end());
            for (std::size_t k = 0; k + 1 < v.size(); ++k) {
                if (v[k] == v[k + 1]) continue;
                const double thr = 0.5 * (v[k] + v[k + 1]);
                double nl = 0, pl = 0, nr = 0, pr = 0;
                for (int i = 0; i < 20; ++i) {
                    if (X(i, f) <= thr) {
                        ++nl;
                        pl += y[static_cast<std::size_t>(i)];
                    } else {
                        ++nr;
                        pr += y[static_cast<std::size_t>(i)];
                    }
                }
                const double imp = (nl * gini(pl, nl) + nr * gini(pr, nr)) / 20.0;
                if (imp < best_imp - 1e-12) {
                    best_imp = imp;
                    best_f = f;
                    best_t = thr;
                }
            }
        }
        TreeParams p;
        p.max_depth = 3;
        const auto t = fit_tree(X, y, p);
        CAPTURE(seed);
        CHECK(t.nodes[0].feature == best_f);
        CHECK(t.nodes[0].threshold == doctest::Approx(best_t).epsilon(1e-12));
    }
}

TEST_CASE("forest reductions, determinism and scale equivariance") {
    auto d = blobs(60, 4, 0.6, 21);
    TreeParams tp;
    tp.max_depth = 5;
    ForestParams fp;
    fp.n_trees = 1;
    fp.max_depth = 5;
    fp.feature_frac = 1.0;
    fp.bootstrap = false;
    const auto tree = fit_tree(d.X, d.y, tp);
    const auto single = fit_forest(d.X, d.y, fp);
    auto test = blobs(30, 4, 0.6, 22);
    for (Eigen::Index i = 0; i < test.X.rows(); ++i) CHECK(single.score(row(test.X, i)) == tree.score(row(test.X, i)));

    ForestParams fp2;
    fp2.n_trees = 15;
    fp2.seed = 5;
    const auto a = fit_forest(d.X, d.y, fp2), b = fit_forest(d.X, d.y, fp2);
    CHECK(a.to_json() == b.to_json());

    auto scaled = d, scaled_test = test;
    scaled.X.col(2) *= 3.75;
    scaled_test.X.col(2) *= 3.75;
    const auto fs = fit_forest(scaled.X, scaled.y, fp2);
    const auto ts = fit_tree(scaled.X, scaled.y, tp);
    for (Eigen::Index i = 0; i < test.X.rows(); ++i) {
        CHECK(fs.predict(row(scaled_test.X, i)) == a.predict(row(test.X, i)));
        CHECK(ts.predict(row(scaled_test.X, i)) == tree.predict(row(test.X, i)));
    }
    for (Eigen::Index i = 0; i < test.X.rows(); ++i) {
        const double s = a.score(row(test.X, i));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("k-NN matches a brute-force distance sort") {
    auto d = blobs(15, 3, 0.5, 8);
    const auto m = fit_knn(d.X, d.y, 5);
    auto q = blobs(10, 3, 0.5, 9);
    for (Eigen::Index i = 0; i < q.X.rows(); ++i) {
        std::vector<std::pair<double, std::size_t>> dist;
        for (Eigen::Index r = 0; r < d.X.rows(); ++r)
            dist.push_back({(d.X.row(r) - q.X.row(i)).squaredNorm(), static_cast<std::size_t>(r)});
        std::sort(dist.begin(), dist.end());
        std::vector<std::size_t> expect;
        double pos = 0;
        for (int k = 0; k < 5; ++k) {
            expect.push_back(dist[static_cast<std::size_t>(k)].second);
            pos += d.y[dist[static_cast<std::size_t>(k)].second];
        }
        CHECK(m.neighbours(row(q.X, i)) == expect);
        CHECK(m.score(row(q.X, i)) == doctest::Approx(pos / 5));
    }
    const auto one = fit_knn(d.X, d.y, 1);
    for (Eigen::Index i = 0; i < d.X.rows(); ++i)
        CHECK(one.score(row(d.X, i)) == static_cast<double>(d.y[static_cast<std::size_t>(i)]));
    CHECK_THROWS_AS(fit_knn(d.X, d.y, 31), ConfigError);
    CHECK_THROWS_AS(fit_knn(d.X, d.y, 4), ConfigError);
}

TEST_CASE("AdaBoost first stump equals a depth-1 tree") {
    for (std::uint64_t seed = 30; seed < 35; ++seed) {
        auto d = blobs(40, 3, 0.4, seed);
        const auto ada = fit_adaboost(d.X, d.y, 10);
        TreeParams p;
        p.max_depth = 1;
        const auto stump = fit_tree(d.X, d.y, p);
        REQUIRE_FALSE(ada.stages.empty());
        CHECK(ada.stages[0].feature == stump.nodes[0].feature);
        CHECK(ada.stages[0].threshold == stump.nodes[0].threshold);
        for (const auto& s : ada.stages) CHECK(std::isfinite(s.alpha));
    }
}

TEST_CASE("every detector separates well-separated blobs") {
    auto d = blobs(100, 2, 3.0, 77);
    for (const auto& name : instantaneous_model_names()) {
        CAPTURE(name);
        const auto m = fit_detector(name, d.X, d.y);
        const double acc = accuracy(*m, d);
        if (name == "gaussian_nb") CHECK(acc >= 0.99);
        else CHECK(acc == 1.0);
    }
}

TEST_CASE("model documents round trip") {
    auto d = blobs(30, 3, 0.7, 4);
    auto q = blobs(10, 3, 0.7, 5);
    for (const auto& name : instantaneous_model_names()) {
        CAPTURE(name);
        auto m = fit_detector(name, d.X, d.y);
        m->threshold = 0.37;
        const auto doc = save_detector(*m);
        const auto back = load_detector(nlohmann::json::parse(doc.dump()));
        CHECK(back->type_name() == m->type_name());
        CHECK(back->threshold == 0.37);
        for (Eigen::Index i = 0; i < q.X.rows(); ++i) CHECK(back->score(row(q.X, i)) == m->score(row(q.X, i)));
    }
    CHECK_THROWS_AS(load_detector({{"format", "other"}}), SchemaError);
}

TEST_CASE("model names") {
    CHECK(canonical_model_name("Random Forest") == "random_forest");
    CHECK(canonical_model_name("k-neighbors") == "k_neighbors");
    CHECK(canonical_model_name("Tree-based") == "tree");
    CHECK(display_model_name("adaboost") == "AdaBoost");
    CHECK_THROWS_AS(canonical_model_name("lstm"), ConfigError);
    CHECK(instantaneous_model_names().size() == 6);
    auto d = blobs(10, 2, 1, 1);
    CHECK(fit_detector("logistic_regression", d.X, d.y)->trainable_parameters() == 3u);
}
