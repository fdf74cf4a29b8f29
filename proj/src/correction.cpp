#include "jamguard/correction.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "jamguard/error.hpp"
#include "jamguard/log.hpp"

namespace jamguard {

void CorrectionParams::validate() const {
    if (!(delta >= 0 && delta < 0.5)) throw ConfigError("correction.delta must be in [0, 0.5)");
    if (!(band > 0 && band <= 0.5)) throw ConfigError("correction.band must be in (0, 0.5]");
}

std::string_view to_string(CorrectionAction a) {
    switch (a) {
        case CorrectionAction::OutOfBand: return "out_of_band";
        case CorrectionAction::Kept: return "kept";
        case CorrectionAction::FlippedToJamming: return "flipped_to_jamming";
        case CorrectionAction::FlippedToClean: return "flipped_to_clean";
        case CorrectionAction::Skipped: return "skipped";
    }
    return "?";
}

namespace {

int quadrant(int label, int prediction) {
    if (label) return prediction ? 0 : 3;
    return prediction ? 2 : 1;
}

Evidence means_evidence(const QuadrantMeans& m) {
    return {{kSnrNode, EvidenceValue::of_value(m.pusch_snr_db)},
            {kCqiNode, EvidenceValue::of_value(m.cqi)},
            {kDlMcsNode, EvidenceValue::of_value(m.dl_mcs)},
            {kUlMcsNode, EvidenceValue::of_value(m.ul_mcs)}};
}

double fraction(std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; }

}  // namespace

ClusterSummary error_cluster_summary(std::span<const int> predictions, std::span<const int> labels,
                                     std::span<const KpiSample> samples) {
    if (predictions.empty()) throw ConfigError("error_cluster_summary: no predictions");
    if (predictions.size() != labels.size() || predictions.size() != samples.size())
        throw ConfigError("error_cluster_summary: inputs differ in length");
    std::array<QuadrantMeans, 4> acc{};
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        auto& q = acc[static_cast<std::size_t>(quadrant(labels[i], predictions[i]))];
        ++q.count;
        q.pusch_snr_db += samples[i].pusch_snr_db;
        q.cqi += samples[i].cqi;
        q.dl_mcs += samples[i].dl_mcs;
        q.ul_mcs += samples[i].ul_mcs;
    }
    ClusterSummary out;
    for (std::size_t k = 0; k < 4; ++k) {
        if (!acc[k].count) continue;
        auto m = acc[k];
        const double n = static_cast<double>(m.count);
        m.pusch_snr_db /= n;
        m.cqi /= n;
        m.dl_mcs /= n;
        m.ul_mcs /= n;
        out.quadrants[k] = m;
    }
    return out;
}

CorrectionResult correct_predictions(std::span<const double> scores, std::span<const int> labels, double threshold,
                                     std::span<const std::optional<Evidence>> evidence, const DiscreteBayesNet& net,
                                     const CorrectionParams& params, std::span<const KpiSample> samples) {
    params.validate();
    if (scores.size() != labels.size() || scores.size() != evidence.size())
        throw ConfigError("correct_predictions: inputs differ in length");
    if (!samples.empty() && samples.size() != scores.size())
        throw ConfigError("correct_predictions: samples differ in length");

    CorrectionResult res;
    auto& rep = res.report;
    rep.threshold = threshold;
    rep.params = params;
    res.corrected.resize(scores.size());
    std::vector<int> before(scores.size());
    static const std::array<const char*, 4> required{kSnrNode, kCqiNode, kDlMcsNode, kUlMcsNode};

    for (std::size_t i = 0; i < scores.size(); ++i) {
        AuditRow row;
        row.sample = i;
        row.label = labels[i];
        row.score = scores[i];
        row.before = scores[i] > threshold ? 1 : 0;
        row.after = row.before;
        before[i] = row.before;
        if (std::abs(scores[i] - threshold) <= params.band) {
            ++rep.in_band_count;
            const auto& ev = evidence[i];
            bool complete = ev.has_value();
            if (complete)
                for (const char* n : required)
                    if (!ev->count(n)) complete = false;
            if (!complete) {
                row.action = CorrectionAction::Skipped;
                ++rep.skipped_count;
                log_warn("correction: sample " + std::to_string(i) + " lacks KPI evidence, skipped");
            } else {
                const double p = jamming_posterior(net, *ev);
                row.posterior = p;
                row.action = CorrectionAction::Kept;
                if (!row.before && p > 0.5 + params.delta) {
                    row.after = 1;
                    row.action = CorrectionAction::FlippedToJamming;
                } else if (row.before && p < 0.5 - params.delta) {
                    row.after = 0;
                    row.action = CorrectionAction::FlippedToClean;
                }
            }
        }
        res.corrected[i] = row.after;
        rep.before.add(row.label, row.before);
        rep.after.add(row.label, row.after);
        const bool was_right = row.before == row.label, now_right = row.after == row.label;
        if (!was_right && now_right) (row.label ? rep.fn_fixed : rep.fp_fixed)++;
        if (was_right && !now_right) ++rep.newly_broken_count;
        rep.audit.push_back(row);
    }
    rep.fn_fixed_fraction = fraction(rep.fn_fixed, rep.before.fn);
    rep.fp_fixed_fraction = fraction(rep.fp_fixed, rep.before.fp);
    rep.combined_fixed_fraction = fraction(rep.fn_fixed + rep.fp_fixed, rep.before.errors());

    if (!samples.empty()) {
        rep.clusters = error_cluster_summary(before, labels, samples);
        auto& g = rep.group_mean;
        if (rep.clusters.fn()) {
            g.fn_posterior = jamming_posterior(net, means_evidence(*rep.clusters.fn()));
            if (*g.fn_posterior > 0.5 + params.delta) g.fn_fixed = rep.clusters.fn()->count;
        }
        if (rep.clusters.fp()) {
            g.fp_posterior = jamming_posterior(net, means_evidence(*rep.clusters.fp()));
            if (*g.fp_posterior < 0.5 - params.delta) g.fp_fixed = rep.clusters.fp()->count;
        }
        g.combined_fixed_fraction = fraction(g.fn_fixed + g.fp_fixed, rep.before.errors());
    }
    return res;
}

nlohmann::json CorrectionReport::to_json(bool include_audit) const {
    nlohmann::json j = {{"threshold", threshold},
                        {"delta", params.delta},
                        {"band", params.band},
                        {"before", before.to_json()},
                        {"after", after.to_json()},
                        {"fn_fixed", fn_fixed},
                        {"fp_fixed", fp_fixed},
                        {"fn_fixed_fraction", fn_fixed_fraction},
                        {"fp_fixed_fraction", fp_fixed_fraction},
                        {"combined_fixed_fraction", combined_fixed_fraction},
                        {"newly_broken_count", newly_broken_count},
                        {"in_band_count", in_band_count},
                        {"skipped_count", skipped_count}};
    nlohmann::json quads = nlohmann::json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& q = clusters.quadrants[k];
        quads[ClusterSummary::kNames[k]] =
            q ? nlohmann::json{{"count", q->count},
                               {"pusch_snr_db", q->pusch_snr_db},
                               {"cqi", q->cqi},
                               {"dl_mcs", q->dl_mcs},
                               {"ul_mcs", q->ul_mcs}}
              : nlohmann::json();
    }
    j["quadrant_means"] = quads;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
    j["group_mean"] = {{"fn_posterior", opt(group_mean.fn_posterior)},
                       {"fp_posterior", opt(group_mean.fp_posterior)},
                       {"fn_fixed", group_mean.fn_fixed},
                       {"fp_fixed", group_mean.fp_fixed},
                       {"combined_fixed_fraction", group_mean.combined_fixed_fraction}};
    if (include_audit) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : audit)
            rows.push_back({{"sample", r.sample},
                            {"label", r.label},
                            {"score", r.score},
                            {"before", r.before},
                            {"after", r.after},
                            {"posterior", opt(r.posterior)},
                            {"action", to_string(r.action)}});
        j["audit"] = rows;
    }
    return j;
}

std::string CorrectionReport::markdown(const DiscreteBayesNet& net) const {
    std::ostringstream s;
    char buf[160];
    s << "| Prediction | Count | PUSCH SNR (dB) | CQI | DL MCS | UL MCS | Pr(jamming) (%) |\n";
    s << "|---|---:|---:|---:|---:|---:|---:|\n";
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& q = clusters.quadrants[k];
        if (!q) {
            s << "| " << ClusterSummary::kNames[k] << " | 0 | - | - | - | - | - |\n";
            continue;
        }
        const double p = jamming_posterior(net, means_evidence(*q));
        std::snprintf(buf, sizeof buf, "| %s | %zu | %.2f | %.2f | %.2f | %.2f | %.2f |\n", ClusterSummary::kNames[k],
                      q->count, q->pusch_snr_db, q->cqi, q->dl_mcs, q->ul_mcs, 100.0 * p);
        s << buf;
    }
    s << "\n";
    std::snprintf(buf, sizeof buf,
                  "Per-sample: fixed %zu of %zu FN (%.1f%%), %zu of %zu FP (%.1f%%), combined %.1f%%; "
                  "newly broken %zu.\n",
                  fn_fixed, before.fn, 100 * fn_fixed_fraction, fp_fixed, before.fp, 100 * fp_fixed_fraction,
                  100 * combined_fixed_fraction, newly_broken_count);
    s << buf;
    std::snprintf(buf, sizeof buf, "Group means: combined %.1f%% of errors on the side of the quadrant posterior.\n",
                  100 * group_mean.combined_fixed_fraction);
    s << buf;
    return s.str();
}

}  // namespace jamguard
