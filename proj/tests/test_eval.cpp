#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "jamguard/error.hpp"
#include "jamguard/eval.hpp"
#include "oracles.hpp"

using namespace jamguard;

namespace {

std::pair<std::vector<double>, std::vector<int>> random_scores(std::mt19937_64& g, std::size_t n, int levels) {
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(g() % 2);
        // coarse levels force ties
        s[i] = static_cast<double>(g() % static_cast<unsigned>(levels)) + 0.7 * y[i];
    }
    y[0] = 0;
    y[1] = 1;
    return {s, y};
}

}  // namespace

TEST_CASE("AUC extremes") {
    const std::vector<int> y{0, 0, 0, 1, 1};
    CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.3, 0.8, 0.9}, y).auc == 1.0);
    CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.7, 0.1, 0.0}, y).auc == 0.0);
    const auto tied = roc_auc(std::vector<double>(5, 0.4), y);
    CHECK(tied.auc == 0.5);
    CHECK(youden_threshold(tied).j == 0.0);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), DomainError);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{1, NAN}, std::vector<int>{0, 1}), DomainError);
}

TEST_CASE("AUC and Youden match brute force on random tied sets") {
    std::mt19937_64 g(11);
    for (int t = 0; t < 100; ++t) {
        auto [s, y] = random_scores(g, 5 + g() % 60, 2 + static_cast<int>(g() % 8));
        const auto roc = roc_auc(s, y);
        CHECK(std::abs(roc.auc - oracle::concordance_auc(s, y)) <= 1e-12);
        const auto yp = youden_threshold(roc);
        CHECK(std::abs(yp.j - oracle::exhaustive_youden(s, y)) <= 1e-12);
        CHECK(roc.points.front().fpr == 0.0);
        CHECK(roc.points.back().tpr == 1.0);

        // Confusion at the Youden threshold reproduces the curve point.
        const auto c = confusion(s, y, yp.threshold);
        CHECK(c.tpr() == doctest::Approx(yp.tpr).epsilon(1e-14));
        CHECK(c.fpr() == doctest::Approx(yp.fpr).epsilon(1e-14));
    }
}

TEST_CASE("AUC invariances") {
    std::mt19937_64 g(12);
    for (int t = 0; t < 20; ++t) {
        auto [s, y] = random_scores(g, 40, 6);
        const double base = roc_auc(s, y).auc;
        std::vector<double> e(s.size()), a(s.size());
        std::vector<int> flipped(y.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            e[i] = std::exp(s[i]);
            a[i] = 3.0 * s[i] - 7.0;
            flipped[i] = 1 - y[i];
        }
        CHECK(roc_auc(e, y).auc == doctest::Approx(base).epsilon(1e-14));
        CHECK(roc_auc(a, y).auc == doctest::Approx(base).epsilon(1e-14));
        CHECK(roc_auc(s, flipped).auc == doctest::Approx(1.0 - base).epsilon(1e-12));
    }
}

TEST_CASE("stratified split sizes, folds and determinism") {
    std::vector<int> y(100);
    std::vector<std::string> strata(100, "a");
    for (int i = 0; i < 100; ++i) y[i] = i % 2;
    const auto s = split_and_cv(y, strata, 0.25, 5, 7);
    CHECK(s.test.size() == 25);
    CHECK(s.train.size() == 75);
    for (std::size_t f = 0; f < 5; ++f) {
        const auto rows = s.fold_rows(f);
        CHECK(rows.size() == 15);
        std::size_t pos = 0;
        for (auto r : rows) pos += static_cast<std::size_t>(y[r]);
        // each fold holds its proportional share of positives, within one
        CHECK(std::abs(static_cast<double>(pos) - 0.5 * 15) <= 1.0);
        CHECK(s.fold_complement(f).size() == 60);
    }
    for (auto r : s.test) CHECK(s.fold[r] == -1);

    const auto again = split_and_cv(y, strata, 0.25, 5, 7);
    CHECK(again.train == s.train);
    CHECK(again.fold == s.fold);
    CHECK(split_and_cv(y, strata, 0.25, 5, 8).test != s.test);
    CHECK(SplitAssignment::from_json(s.to_json()).fold == s.fold);

    std::vector<int> rare(100, 0);
    rare[3] = rare[9] = 1;
    CHECK_THROWS_AS(split_and_cv(rare, strata, 0.25, 5, 1), ConfigError);
    CHECK_THROWS_AS(split_and_cv(y, strata, 1.0, 5, 1), ConfigError);
}

TEST_CASE("split keeps strata proportions") {
    std::vector<int> y;
    std::vector<std::string> strata;
    for (int i = 0; i < 400; ++i) {
        y.push_back(i < 200 ? 0 : 1);
        strata.push_back(i < 200 ? "h0" : (i % 2 ? "s1" : "s2"));
    }
    const auto s = split_and_cv(y, strata, 0.25, 5, 3);
    std::map<std::string, int> test_count;
    for (auto r : s.test) ++test_count[strata[r]];
    CHECK(test_count["h0"] == 50);
    CHECK(test_count["s1"] == 25);
    CHECK(test_count["s2"] == 25);
}

TEST_CASE("bench median and parameter count") {
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    int fits = 0;
    const auto rec = bench(
        "toy",
        [&] {
            ++fits;
            return std::function<double(std::size_t)>([](std::size_t i) { return static_cast<double>(i); });
        },
        10, 3, 42);
    CHECK(fits == 3);
    CHECK(rec.repetitions == 3);
    CHECK(rec.trainable_parameters == 42u);
    CHECK(rec.train_seconds >= 0);
    CHECK(rec.max_inference_seconds >= rec.inference_seconds);
    CHECK(rec.to_json()["trainable_parameters"] == 42);
    CHECK_THROWS_AS(bench("toy", [] { return std::function<double(std::size_t)>(); }, 1, 2), ConfigError);
}

TEST_CASE("ROC export") {
    const auto roc = roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1});
    CHECK(roc.auc == 0.75);
    std::ostringstream csv;
    write_roc_csv(csv, roc);
    CHECK(csv.str().rfind("threshold,fpr,tpr", 0) == 0);
    const auto svg = roc_svg({{"toy", &roc}}, "ROC");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
