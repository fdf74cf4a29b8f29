#include "jamguard/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "jamguard/error.hpp"
#include "jamguard/rng.hpp"

namespace jamguard {

void Confusion::add(int label, int prediction) {
    if (label) prediction ? ++tp : ++fn;
    else prediction ? ++fp : ++tn;
}

nlohmann::json Confusion::to_json() const { return {{"tp", tp}, {"tn", tn}, {"fp", fp}, {"fn", fn}}; }

Confusion confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
    if (scores.size() != labels.size()) throw ConfigError("confusion: scores and labels differ in length");
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) c.add(labels[i], scores[i] > threshold);
    return c;
}

Confusion confusion_from_predictions(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) throw ConfigError("confusion: predictions and labels differ in length");
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i) c.add(labels[i], predictions[i]);
    return c;
}

nlohmann::json RocCurve::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : points) pts.push_back({p.threshold, p.fpr, p.tpr});
    return {{"auc", auc}, {"positives", positives}, {"negatives", negatives},
            {"points_columns", {"threshold", "fpr", "tpr"}}, {"points", pts}};
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ConfigError("roc: scores and labels differ in length");
    RocCurve roc;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!std::isfinite(scores[i])) throw DomainError("roc: non-finite score at index " + std::to_string(i));
        labels[i] ? ++roc.positives : ++roc.negatives;
    }
    if (roc.positives == 0 || roc.negatives == 0) throw DomainError("roc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    const double P = static_cast<double>(roc.positives), N = static_cast<double>(roc.negatives);
    std::size_t tp = 0, fp = 0;
    // threshold = s means "score > s": positives counted so far are those strictly above s
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        roc.points.push_back({s, fp / N, tp / P, fp, tp});
        while (i < order.size() && scores[order[i]] == s) {
            labels[order[i]] ? ++tp : ++fp;
            ++i;
        }
    }
    const double lowest = scores[order.back()];
    roc.points.push_back({std::nextafter(lowest, -std::numeric_limits<double>::infinity()), 1.0, 1.0, fp, tp});

    double area = 0;
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
        const auto& a = roc.points[i - 1];
        const auto& b = roc.points[i];
        area += static_cast<double>(b.fp - a.fp) * static_cast<double>(a.tp + b.tp);
    }
    roc.auc = area / (2.0 * P * N);
    return roc;
}

YoudenPoint youden_threshold(const RocCurve& roc) {
    if (roc.points.empty()) throw DomainError("youden: empty curve");
    const auto P = static_cast<long double>(roc.positives), N = static_cast<long double>(roc.negatives);
    std::size_t best = 0;
    long double best_j = -1;
    for (std::size_t i = 0; i < roc.points.size(); ++i) {
        // J * P * N in exact integer arithmetic
        const long double j = static_cast<long double>(roc.points[i].tp) * N - static_cast<long double>(roc.points[i].fp) * P;
        if (j >= best_j) {  // later points have lower thresholds
            best_j = j;
            best = i;
        }
    }
    const auto& p = roc.points[best];
    return {p.threshold, p.tpr - p.fpr, p.tpr, p.fpr};
}

// ---------------------------------------------------------------------------
// Split
// ---------------------------------------------------------------------------

std::vector<std::size_t> SplitAssignment::fold_rows(std::size_t f) const {
    std::vector<std::size_t> out;
    for (auto r : train)
        if (fold[r] == static_cast<int>(f)) out.push_back(r);
    return out;
}

std::vector<std::size_t> SplitAssignment::fold_complement(std::size_t f) const {
    std::vector<std::size_t> out;
    for (auto r : train)
        if (fold[r] != static_cast<int>(f)) out.push_back(r);
    return out;
}

nlohmann::json SplitAssignment::to_json() const {
    return {{"folds", folds}, {"train", train}, {"test", test}, {"fold", fold}};
}

SplitAssignment SplitAssignment::from_json(const nlohmann::json& j) {
    SplitAssignment s;
    try {
        s.folds = j.at("folds").get<std::size_t>();
        s.train = j.at("train").get<std::vector<std::size_t>>();
        s.test = j.at("test").get<std::vector<std::size_t>>();
        s.fold = j.at("fold").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("split document: ") + e.what());
    }
    return s;
}

SplitAssignment split_and_cv(std::span<const int> labels, std::span<const std::string> strata, double test_frac,
                             std::size_t folds, std::uint64_t seed) {
    if (labels.size() != strata.size()) throw ConfigError("split: labels and strata differ in length");
    if (!(test_frac >= 0 && test_frac < 1)) throw ConfigError("split: test fraction must be in [0,1)");
    if (folds < 1) throw ConfigError("split: need at least one fold");
    std::map<std::pair<int, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[{labels[i], strata[i]}].push_back(i);

    std::vector<std::size_t> sequence;
    sequence.reserve(labels.size());
    std::uint64_t stream = 0;
    for (auto& [key, rows] : groups) {
        Rng rng(derive_seed(seed, stream++));
        std::shuffle(rows.begin(), rows.end(), rng.engine());
        sequence.insert(sequence.end(), rows.begin(), rows.end());
    }

    SplitAssignment s;
    s.folds = folds;
    s.fold.assign(labels.size(), -1);
    std::size_t train_pos = 0;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const bool is_test = std::floor(static_cast<double>(i + 1) * test_frac) > std::floor(static_cast<double>(i) * test_frac);
        if (is_test) s.test.push_back(sequence[i]);
        else {
            s.train.push_back(sequence[i]);
            s.fold[sequence[i]] = static_cast<int>(train_pos++ % folds);
        }
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());

    for (std::size_t f = 0; f < folds; ++f) {
        bool seen[2] = {false, false};
        for (auto r : s.train)
            if (s.fold[r] == static_cast<int>(f)) seen[labels[r] ? 1 : 0] = true;
        if (!seen[0] || !seen[1])
            throw ConfigError("split: fold " + std::to_string(f) + " is missing a class; use fewer folds");
    }
    return s;
}

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json TimingRecord::to_json() const {
    nlohmann::json j = {{"model", model},
                        {"train_seconds", train_seconds},
                        {"inference_seconds", inference_seconds},
                        {"max_inference_seconds", max_inference_seconds},
                        {"repetitions", repetitions}};
    j["trainable_parameters"] = trainable_parameters ? nlohmann::json(*trainable_parameters) : nlohmann::json();
    return j;
}

TimingRecord bench(const std::string& model, const BenchFit& fit, std::size_t windows, int repetitions,
                   std::optional<std::size_t> trainable_parameters) {
    if (repetitions < 3) throw ConfigError("bench: at least 3 repetitions are required");
    if (windows == 0) throw ConfigError("bench: no inference windows");
    using clock = std::chrono::steady_clock;
    std::vector<double> train_times, infer_times;
    double slowest = 0;
    volatile double sink = 0;
    for (int r = 0; r < repetitions; ++r) {
        auto t0 = clock::now();
        auto scorer = fit();
        auto t1 = clock::now();
        train_times.push_back(std::chrono::duration<double>(t1 - t0).count());
        double total = 0;
        for (std::size_t i = 0; i < windows; ++i) {
            auto a = clock::now();
            sink = sink + scorer(i);
            auto b = clock::now();
            const double dt = std::chrono::duration<double>(b - a).count();
            total += dt;
            slowest = std::max(slowest, dt);
        }
        infer_times.push_back(total / static_cast<double>(windows));
    }
    TimingRecord rec;
    rec.model = model;
    rec.train_seconds = median(train_times);
    rec.inference_seconds = median(infer_times);
    rec.max_inference_seconds = slowest;
    rec.trainable_parameters = trainable_parameters;
    rec.repetitions = repetitions;
    return rec;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

void write_roc_csv(std::ostream& out, const RocCurve& roc) {
    out << "threshold,fpr,tpr\n";
    char buf[96];
    for (const auto& p : roc.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.threshold, p.fpr, p.tpr);
        out << buf;
    }
}

std::string roc_svg(const std::vector<std::pair<std::string, const RocCurve*>>& curves, const std::string& title) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    const double left = 50, top = 30, size = 300;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"380\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">" << title << "</text>\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top + size << "\" x2=\"" << left + size << "\" y2=\"" << top
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = t / 4.0;
        s << "<text x=\"" << left + v * size - 8 << "\" y=\"" << top + size + 14 << "\">" << v << "</text>\n";
        s << "<text x=\"" << left - 28 << "\" y=\"" << top + size - v * size + 4 << "\">" << v << "</text>\n";
    }
    s << "<text x=\"" << left + size / 2 - 40 << "\" y=\"" << top + size + 30 << "\">False positive rate</text>\n";
    s << "<text transform=\"translate(14," << top + size / 2 + 40 << ") rotate(-90)\">True positive rate</text>\n";
    char buf[64];
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* colour = palette[c % 10];
        s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : curves[c].second->points) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", left + p.fpr * size, top + size - p.tpr * size);
            s << buf;
        }
        s << "\"/>\n";
        std::snprintf(buf, sizeof buf, "%.3f", curves[c].second->auc);
        const double y = top + 10 + 14.0 * static_cast<double>(c);
        s << "<line x1=\"" << left + size + 15 << "\" y1=\"" << y - 4 << "\" x2=\"" << left + size + 35 << "\" y2=\""
          << y - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        s << "<text x=\"" << left + size + 40 << "\" y=\"" << y << "\">" << curves[c].first << " (AUC " << buf
          << ")</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace jamguard
