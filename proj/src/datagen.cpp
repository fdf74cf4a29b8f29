#include "jamguard/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "jamguard/error.hpp"
#include "text_util.hpp"

namespace jamguard {

namespace {

constexpr std::array<std::size_t, 6> kDirectlyDrawn{kpi::kPowerHeadroom, kpi::kEpre,      kpi::kPathLoss,
                                                    kpi::kTurboMin,      kpi::kTurboAvg,  kpi::kTurboMax};

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t feature_position(std::string_view name) {
    for (std::size_t i = 0; i < kKpiCount; ++i)
        if (kKpiNames[i] == name) return i;
    throw ConfigError("unknown KPI name '" + std::string(name) + "'");
}

}  // namespace

GeneratorConfig GeneratorConfig::defaults() {
    GeneratorConfig cfg;
    // Stronger jammer power -> larger SNR loss. LTE DL at -13 dBm degrades least.
    for (const auto& s : testbed_scenarios()) {
        double base = s.band == Band::LteDl2140 ? 6.0 : s.band == Band::LteUl1950 ? 7.0 : 7.5;
        cfg.snr_degradation_db_per_scenario[s.scenario_id] = base + 0.5 * (s.power_dbm + 13.0);
    }
    auto& n = cfg.feature_noise_std;
    n[kpi::kDlBitrate] = 0.05;
    n[kpi::kUlBitrate] = 0.05;
    n[kpi::kDlPacketRate] = 0.1;
    n[kpi::kUlPacketRate] = 0.1;
    n[kpi::kDlRetx] = 0.03;
    n[kpi::kUlRetx] = 0.03;
    n[kpi::kPuschSnr] = 0.5;
    n[kpi::kCqi] = 0.4;
    n[kpi::kRankIndicator] = 2.0;
    n[kpi::kPowerHeadroom] = 3.0;
    n[kpi::kEpre] = 1.0;
    n[kpi::kPathLoss] = 3.0;
    n[kpi::kDlMcs] = 0.3;
    n[kpi::kUlMcs] = 0.3;
    n[kpi::kTurboMin] = 0.08;
    n[kpi::kTurboAvg] = 0.08;
    n[kpi::kTurboMax] = 0.08;

    auto& c = cfg.conditionals;
    c[kpi::kPowerHeadroom] = {20.0, -0.25};
    c[kpi::kEpre] = {-95.0, 0.05};
    c[kpi::kPathLoss] = {100.0, 0.25};
    c[kpi::kTurboMin] = {0.25, 0.01};
    c[kpi::kTurboAvg] = {0.45, 0.01};
    c[kpi::kTurboMax] = {0.65, 0.01};
    return cfg;
}

void GeneratorConfig::validate() const {
    if (!(baseline_snr_std_db >= 0)) throw ConfigError("generator.baseline_snr_std_db must be >= 0");
    for (std::size_t i = 0; i < kKpiCount; ++i)
        if (!(feature_noise_std[i] >= 0))
            throw ConfigError("generator.feature_noise_std." + std::string(kKpiNames[i]) + " must be >= 0");
    if (sampling_period_ms <= 0) throw ConfigError("generator.sampling_period_ms must be > 0");
    for (const auto& [id, shift] : snr_degradation_db_per_scenario)
        if (!(shift >= 0)) throw ConfigError("generator.snr_degradation_db_per_scenario." + id + " must be >= 0");
    if (!(cross_cell_coupling >= 0 && cross_cell_coupling <= 1))
        throw ConfigError("generator.cross_cell_coupling must be in [0,1]");
    if (!(packet_size_bits > 0)) throw ConfigError("generator.packet_size_bits must be > 0");
    if (!(bitrate_per_efficiency >= 0)) throw ConfigError("generator.bitrate_per_efficiency must be >= 0");
}

nlohmann::json GeneratorConfig::to_json() const {
    nlohmann::json noise = nlohmann::json::object();
    for (std::size_t i = 0; i < kKpiCount; ++i) noise[std::string(kKpiNames[i])] = feature_noise_std[i];
    nlohmann::json cond = nlohmann::json::object();
    for (std::size_t i : kDirectlyDrawn)
        cond[std::string(kKpiNames[i])] = {{"mean", conditionals[i].mean},
                                           {"effect_per_db", conditionals[i].effect_per_db}};
    return {{"baseline_snr_mean_db", baseline_snr_mean_db},
            {"baseline_snr_std_db", baseline_snr_std_db},
            {"snr_degradation_db_per_scenario", snr_degradation_db_per_scenario},
            {"retx_logistic_slope", retx_logistic_slope},
            {"retx_logistic_midpoint_db", retx_logistic_midpoint_db},
            {"bitrate_per_efficiency", bitrate_per_efficiency},
            {"feature_noise_std", noise},
            {"samples_per_scenario", samples_per_scenario},
            {"sampling_period_ms", sampling_period_ms},
            {"seed", seed},
            {"cross_cell_coupling", cross_cell_coupling},
            {"cqi_efficiency_shift_per_db", cqi_efficiency_shift_per_db},
            {"ul_efficiency_backoff", ul_efficiency_backoff},
            {"ul_bitrate_fraction", ul_bitrate_fraction},
            {"packet_size_bits", packet_size_bits},
            {"rank2_snr_threshold_db", rank2_snr_threshold_db},
            {"conditionals", cond}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
    GeneratorConfig cfg = defaults();
    if (!j.is_object()) throw ConfigError("generator: expected an object");
    auto num = [](const nlohmann::json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path + ": expected a number");
        return v.get<double>();
    };
    for (const auto& [key, v] : j.items()) {
        const std::string path = "generator." + key;
        if (key == "baseline_snr_mean_db") cfg.baseline_snr_mean_db = num(v, path);
        else if (key == "baseline_snr_std_db") cfg.baseline_snr_std_db = num(v, path);
        else if (key == "retx_logistic_slope") cfg.retx_logistic_slope = num(v, path);
        else if (key == "retx_logistic_midpoint_db") cfg.retx_logistic_midpoint_db = num(v, path);
        else if (key == "bitrate_per_efficiency") cfg.bitrate_per_efficiency = num(v, path);
        else if (key == "cross_cell_coupling") cfg.cross_cell_coupling = num(v, path);
        else if (key == "cqi_efficiency_shift_per_db") cfg.cqi_efficiency_shift_per_db = num(v, path);
        else if (key == "ul_efficiency_backoff") cfg.ul_efficiency_backoff = num(v, path);
        else if (key == "ul_bitrate_fraction") cfg.ul_bitrate_fraction = num(v, path);
        else if (key == "packet_size_bits") cfg.packet_size_bits = num(v, path);
        else if (key == "rank2_snr_threshold_db") cfg.rank2_snr_threshold_db = num(v, path);
        else if (key == "samples_per_scenario") {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(path + ": expected a non-negative integer");
            cfg.samples_per_scenario = v.get<std::size_t>();
        } else if (key == "sampling_period_ms") {
            if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
            cfg.sampling_period_ms = v.get<std::int64_t>();
        } else if (key == "seed") {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(path + ": expected a non-negative integer");
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "snr_degradation_db_per_scenario") {
            if (!v.is_object()) throw ConfigError(path + ": expected an object");
            cfg.snr_degradation_db_per_scenario.clear();
            for (const auto& [id, shift] : v.items()) cfg.snr_degradation_db_per_scenario[id] = num(shift, path + "." + id);
        } else if (key == "feature_noise_std") {
            if (!v.is_object()) throw ConfigError(path + ": expected an object keyed by KPI name");
            for (const auto& [name, s] : v.items()) {
                std::size_t i;
                try {
                    i = feature_position(name);
                } catch (const ConfigError&) {
                    throw ConfigError(path + "." + name + ": unknown KPI");
                }
                cfg.feature_noise_std[i] = num(s, path + "." + name);
            }
        } else if (key == "conditionals") {
            if (!v.is_object()) throw ConfigError(path + ": expected an object keyed by KPI name");
            for (const auto& [name, c] : v.items()) {
                const std::string cpath = path + "." + name;
                std::size_t i = kKpiCount;
                for (std::size_t k : kDirectlyDrawn)
                    if (kKpiNames[k] == name) i = k;
                if (i == kKpiCount) throw ConfigError(cpath + ": KPI is not drawn from a conditional");
                if (!c.is_object()) throw ConfigError(cpath + ": expected {mean, effect_per_db}");
                for (const auto& [ck, cv] : c.items()) {
                    if (ck == "mean") cfg.conditionals[i].mean = num(cv, cpath + ".mean");
                    else if (ck == "effect_per_db") cfg.conditionals[i].effect_per_db = num(cv, cpath + ".effect_per_db");
                    else throw ConfigError(cpath + "." + ck + ": unknown field");
                }
            }
        } else {
            throw ConfigError(path + ": unknown field");
        }
    }
    cfg.validate();
    return cfg;
}

double degradation_shift(const GeneratorConfig& cfg, const JammingScenario& scenario) {
    auto it = cfg.snr_degradation_db_per_scenario.find(scenario.scenario_id);
    if (it == cfg.snr_degradation_db_per_scenario.end())
        throw ConfigError("no SNR degradation configured for scenario '" + scenario.scenario_id + "'");
    return it->second;
}

KpiSample causal_sample(const std::optional<JammingScenario>& jamming, Cell cell, const GeneratorConfig& cfg,
                        Rng& rng, const MappingTables& tables) {
    const auto& noise = cfg.feature_noise_std;
    double shift = 0.0;
    if (jamming) {
        shift = degradation_shift(cfg, *jamming);
        if (affected_cell(jamming->band) != cell) shift *= cfg.cross_cell_coupling;
    }

    // Fixed number of draws per sample keeps streams aligned regardless of configuration.
    std::array<double, 18> z;
    for (double& v : z) v = rng.normal();

    KpiSample s;
    s.cell = cell;
    s.pusch_snr_db = cfg.baseline_snr_mean_db - shift + cfg.baseline_snr_std_db * z[0] + noise[kpi::kPuschSnr] * z[1];
    const double snr_eff = snr_to_spectral_efficiency(s.pusch_snr_db);

    const double cqi_eta = snr_eff - cfg.cqi_efficiency_shift_per_db * shift + noise[kpi::kCqi] * z[2];
    s.cqi = std::clamp(efficiency_to_cqi(cqi_eta, tables).floor, 0, 15);
    const double cqi_eff = tables.cqi[static_cast<std::size_t>(s.cqi)].efficiency;

    s.dl_mcs = std::clamp(efficiency_to_mcs(cqi_eff + noise[kpi::kDlMcs] * z[3], tables).index, 0, 28);
    const double ul_eta = 0.5 * (cqi_eff + snr_eff) - cfg.ul_efficiency_backoff + noise[kpi::kUlMcs] * z[4];
    s.ul_mcs = std::clamp(efficiency_to_mcs(ul_eta, tables).index, 0, 28);

    const double dl_eff = tables.mcs[static_cast<std::size_t>(s.dl_mcs)].efficiency;
    const double ul_eff = tables.mcs[static_cast<std::size_t>(s.ul_mcs)].efficiency;
    s.dl_bitrate = std::max(0.0, cfg.bitrate_per_efficiency * dl_eff * (1.0 + noise[kpi::kDlBitrate] * z[5]));
    s.ul_bitrate = std::max(0.0, cfg.ul_bitrate_fraction * cfg.bitrate_per_efficiency * ul_eff *
                                     (1.0 + noise[kpi::kUlBitrate] * z[6]));
    s.dl_packet_rate = std::max(0.0, s.dl_bitrate / cfg.packet_size_bits * (1.0 + noise[kpi::kDlPacketRate] * z[7]));
    s.ul_packet_rate = std::max(0.0, s.ul_bitrate / cfg.packet_size_bits * (1.0 + noise[kpi::kUlPacketRate] * z[8]));

    const double retx = logistic(-cfg.retx_logistic_slope * (s.pusch_snr_db - cfg.retx_logistic_midpoint_db));
    s.dl_retx_rate = std::clamp(retx + noise[kpi::kDlRetx] * z[9], 0.0, 1.0);
    s.ul_retx_rate = std::clamp(retx + noise[kpi::kUlRetx] * z[10], 0.0, 1.0);

    s.rank_indicator = s.pusch_snr_db + noise[kpi::kRankIndicator] * z[11] >= cfg.rank2_snr_threshold_db ? 2 : 1;

    auto drawn = [&](std::size_t f, double zf) {
        return cfg.conditionals[f].mean + cfg.conditionals[f].effect_per_db * shift + noise[f] * zf;
    };
    s.power_headroom_db = drawn(kpi::kPowerHeadroom, z[12]);
    s.epre_dbm = drawn(kpi::kEpre, z[13]);
    s.ul_path_loss_db = drawn(kpi::kPathLoss, z[14]);
    std::array<double, 3> turbo{std::clamp(drawn(kpi::kTurboMin, z[15]), 0.0, 1.0),
                                std::clamp(drawn(kpi::kTurboAvg, z[16]), 0.0, 1.0),
                                std::clamp(drawn(kpi::kTurboMax, z[17]), 0.0, 1.0)};
    std::sort(turbo.begin(), turbo.end());
    s.turbo_rate_min = turbo[0];
    s.turbo_rate_avg = turbo[1];
    s.turbo_rate_max = turbo[2];
    return s;
}

std::array<double, kPairedFeatureCount> DatasetRow::features() const {
    std::array<double, kPairedFeatureCount> out;
    auto a = nr.features();
    auto b = lte.features();
    std::copy(a.begin(), a.end(), out.begin());
    std::copy(b.begin(), b.end(), out.begin() + kKpiCount);
    return out;
}

std::vector<int> LabeledDataset::labels() const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(static_cast<int>(r.label));
    return out;
}

LabeledDataset generate_dataset(const GeneratorConfig& cfg, std::span<const JammingScenario> scenarios,
                                const MappingTables& tables) {
    cfg.validate();
    if (scenarios.empty()) throw ConfigError("generate_dataset: no scenarios given");
    std::set<std::string> ids;
    for (const auto& s : scenarios) {
        s.validate();
        if (!ids.insert(s.scenario_id).second) throw ConfigError("duplicate scenario_id '" + s.scenario_id + "'");
        degradation_shift(cfg, s);
    }

    LabeledDataset ds;
    ds.rows.reserve(scenarios.size() * cfg.samples_per_scenario * 2);
    std::int64_t t = 0;
    for (std::size_t si = 0; si < scenarios.size(); ++si) {
        Rng rng(derive_seed(cfg.seed, si));
        for (Label label : {Label::H0, Label::H1}) {
            std::optional<JammingScenario> jam;
            if (label == Label::H1) jam = scenarios[si];
            for (std::size_t i = 0; i < cfg.samples_per_scenario; ++i) {
                DatasetRow row;
                row.nr = causal_sample(jam, Cell::NR, cfg, rng, tables);
                row.lte = causal_sample(jam, Cell::LTE, cfg, rng, tables);
                row.nr.timestamp_ms = row.lte.timestamp_ms = t;
                t += cfg.sampling_period_ms;
                row.label = label;
                row.scenario_id = scenarios[si].scenario_id;
                ds.rows.push_back(std::move(row));
            }
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------

FeatureMatrix raw_feature_matrix(const LabeledDataset& ds) {
    FeatureMatrix m(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(kPairedFeatureCount));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto f = ds.rows[i].features();
        for (std::size_t j = 0; j < f.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f[j];
    }
    return m;
}

FeatureScaler FeatureScaler::fit(const FeatureMatrix& raw, std::span<const std::size_t> rows) {
    if (rows.empty()) throw ConfigError("normalize_features: empty training split");
    const auto cols = static_cast<std::size_t>(raw.cols());
    std::vector<FeatureStat> stats(cols);
    const double n = static_cast<double>(rows.size());
    for (std::size_t j = 0; j < cols; ++j) {
        double mean = 0;
        for (std::size_t r : rows) mean += raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        mean /= n;
        double var = 0;
        for (std::size_t r : rows) {
            double d = raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) - mean;
            var += d * d;
        }
        var /= n;
        FeatureStat& s = stats[j];
        s.mean = mean;
        s.stddev = std::sqrt(var);
        if (!(s.stddev > 0)) {
            s.zero_variance = true;
            s.mean = 0;
            s.stddev = 1;
        }
    }
    return FeatureScaler(std::move(stats));
}

void FeatureScaler::apply(std::span<double> x) const {
    if (x.size() != stats_.size()) throw DomainError("feature vector has wrong dimension");
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - stats_[j].mean) / stats_[j].stddev;
}

FeatureMatrix FeatureScaler::transform(const FeatureMatrix& raw) const {
    FeatureMatrix out = raw;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        apply(std::span<double>(out.row(i).data(), static_cast<std::size_t>(out.cols())));
    return out;
}

nlohmann::json FeatureScaler::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : stats_) arr.push_back({{"mean", s.mean}, {"std", s.stddev}, {"zero_variance", s.zero_variance}});
    return arr;
}

FeatureScaler FeatureScaler::from_json(const nlohmann::json& j) {
    std::vector<FeatureStat> stats;
    try {
        for (const auto& e : j)
            stats.push_back({e.at("mean").get<double>(), e.at("std").get<double>(), e.at("zero_variance").get<bool>()});
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("feature scaler: ") + e.what());
    }
    return FeatureScaler(std::move(stats));
}

NormalizedFeatures normalize_features(LabeledDataset& dataset, std::span<const std::size_t> train_rows) {
    FeatureMatrix raw = raw_feature_matrix(dataset);
    for (std::size_t r : train_rows)
        if (r >= dataset.size()) throw ConfigError("normalize_features: training row out of range");
    FeatureScaler scaler = FeatureScaler::fit(raw, train_rows);
    dataset.feature_stats = scaler.stats();
    return {scaler.transform(raw), std::move(scaler)};
}

// ---------------------------------------------------------------------------

std::vector<std::string> dataset_csv_header() {
    std::vector<std::string> h{"timestamp_ms", "cell"};
    for (auto n : kKpiNames) h.emplace_back(n);
    h.emplace_back("label");
    h.emplace_back("scenario_id");
    return h;
}

namespace {

void write_sample(std::ostream& out, const KpiSample& s, const DatasetRow& row) {
    out << s.timestamp_ms << ',' << to_string(s.cell);
    auto f = s.features();
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << ',';
        if (i == kpi::kCqi || i == kpi::kRankIndicator || i == kpi::kDlMcs || i == kpi::kUlMcs)
            out << static_cast<long long>(f[i]);
        else
            out << detail::format_double(f[i]);
    }
    out << ',' << (row.label == Label::H1 ? "H1" : "H0") << ',' << row.scenario_id << '\n';
}

}  // namespace

void write_dataset(std::ostream& out, const LabeledDataset& ds, const std::optional<ArtifactStamp>& stamp) {
    if (stamp)
        out << "# jamguard-dataset config_hash=" << stamp->config_hash << " seed=" << stamp->seed
            << " tool_version=" << stamp->tool_version << '\n';
    auto header = dataset_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : ds.rows) {
        write_sample(out, row.nr, row);
        write_sample(out, row.lte, row);
    }
}

void write_dataset(const std::string& path, const LabeledDataset& ds, const std::optional<ArtifactStamp>& stamp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write dataset '" + path + "'");
    write_dataset(out, ds, stamp);
    if (!out) throw Error("failed writing dataset '" + path + "'");
}

namespace {

std::optional<ArtifactStamp> parse_stamp(std::string_view line) {
    std::istringstream in{std::string(line.substr(1))};
    std::string tag, tok;
    in >> tag;
    if (tag != "jamguard-dataset") return std::nullopt;
    ArtifactStamp st;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "config_hash") st.config_hash = val;
        else if (key == "seed") st.seed = std::stoull(val);
        else if (key == "tool_version") st.tool_version = val;
    }
    return st;
}

}  // namespace

LabeledDataset read_dataset(std::istream& in, std::optional<ArtifactStamp>* stamp) {
    const auto header = dataset_csv_header();
    LabeledDataset ds;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::optional<DatasetRow> pending;  // NR half waiting for its LTE partner
    std::size_t pending_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = detail::trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            if (stamp && !header_seen) *stamp = parse_stamp(view);
            continue;
        }
        auto cols = detail::split_csv(view);
        if (!header_seen) {
            if (cols.size() != header.size())
                throw SchemaError("dataset header has " + std::to_string(cols.size()) + " columns, expected " +
                                      std::to_string(header.size()),
                                  line_no);
            for (std::size_t i = 0; i < header.size(); ++i)
                if (detail::trim(cols[i]) != header[i])
                    throw SchemaError("dataset column " + std::to_string(i) + " is '" + std::string(cols[i]) +
                                          "', expected '" + header[i] + "'",
                                      line_no);
            header_seen = true;
            continue;
        }
        if (cols.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cols.size()),
                             line_no);
        KpiSample s;
        Label label;
        std::string scenario;
        try {
            const auto ts = detail::parse_int(cols[0], line_no);
            const Cell cell = parse_cell(detail::trim(cols[1]));
            std::array<double, kKpiCount> f;
            for (std::size_t i = 0; i < kKpiCount; ++i) f[i] = detail::parse_double(cols[2 + i], line_no);
            s = KpiSample::from_features(ts, cell, f);
            s.validate();
            auto lab = detail::trim(cols[2 + kKpiCount]);
            if (lab == "H0") label = Label::H0;
            else if (lab == "H1") label = Label::H1;
            else throw ParseError("label must be H0 or H1");
            scenario = std::string(detail::trim(cols[3 + kKpiCount]));
            if (label == Label::H1 && scenario.empty()) throw ParseError("H1 row without scenario_id");
        } catch (const ParseError& e) {
            if (e.line()) throw;
            throw ParseError(e.what(), line_no);
        } catch (const DomainError& e) {
            throw ParseError(e.what(), line_no);
        }

        if (s.cell == Cell::NR) {
            if (pending) throw ParseError("NR row without LTE partner", pending_line);
            pending.emplace();
            pending->nr = s;
            pending->label = label;
            pending->scenario_id = scenario;
            pending_line = line_no;
        } else {
            if (!pending) throw ParseError("LTE row without preceding NR row", line_no);
            if (pending->nr.timestamp_ms != s.timestamp_ms || pending->label != label ||
                pending->scenario_id != scenario)
                throw ParseError("LTE row does not match its NR partner", line_no);
            if (!ds.rows.empty() && ds.rows.back().nr.timestamp_ms > s.timestamp_ms)
                throw ParseError("rows are not ordered by timestamp", line_no);
            pending->lte = s;
            ds.rows.push_back(std::move(*pending));
            pending.reset();
        }
    }
    if (!header_seen) throw SchemaError("dataset file is missing its header");
    if (pending) throw ParseError("NR row without LTE partner", pending_line);
    return ds;
}

LabeledDataset read_dataset(const std::string& path, std::optional<ArtifactStamp>* stamp) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot open dataset '" + path + "'");
    return read_dataset(in, stamp);
}

}  // namespace jamguard
