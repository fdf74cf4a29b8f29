#include "jamguard/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "jamguard/error.hpp"
#include "text_util.hpp"

namespace jamguard {

std::string_view to_string(Cell cell) { return cell == Cell::NR ? "NR" : "LTE"; }

Cell parse_cell(std::string_view text) {
    if (text == "NR") return Cell::NR;
    if (text == "LTE") return Cell::LTE;
    throw ParseError("unknown cell '" + std::string(text) + "'");
}

std::array<double, kKpiCount> KpiSample::features() const {
    return {dl_bitrate,
            ul_bitrate,
            dl_packet_rate,
            ul_packet_rate,
            dl_retx_rate,
            ul_retx_rate,
            pusch_snr_db,
            static_cast<double>(cqi),
            static_cast<double>(rank_indicator),
            power_headroom_db,
            epre_dbm,
            ul_path_loss_db,
            static_cast<double>(dl_mcs),
            static_cast<double>(ul_mcs),
            turbo_rate_min,
            turbo_rate_avg,
            turbo_rate_max};
}

namespace {

int as_integer(double v, std::string_view name) {
    if (!std::isfinite(v) || v != std::round(v))
        throw DomainError(std::string(name) + " must be integral");
    return static_cast<int>(v);
}

}  // namespace

KpiSample KpiSample::from_features(std::int64_t timestamp_ms, Cell cell,
                                   std::span<const double, kKpiCount> v) {
    KpiSample s;
    s.timestamp_ms = timestamp_ms;
    s.cell = cell;
    s.dl_bitrate = v[kpi::kDlBitrate];
    s.ul_bitrate = v[kpi::kUlBitrate];
    s.dl_packet_rate = v[kpi::kDlPacketRate];
    s.ul_packet_rate = v[kpi::kUlPacketRate];
    s.dl_retx_rate = v[kpi::kDlRetx];
    s.ul_retx_rate = v[kpi::kUlRetx];
    s.pusch_snr_db = v[kpi::kPuschSnr];
    s.cqi = as_integer(v[kpi::kCqi], "cqi");
    s.rank_indicator = as_integer(v[kpi::kRankIndicator], "rank_indicator");
    s.power_headroom_db = v[kpi::kPowerHeadroom];
    s.epre_dbm = v[kpi::kEpre];
    s.ul_path_loss_db = v[kpi::kPathLoss];
    s.dl_mcs = as_integer(v[kpi::kDlMcs], "dl_mcs");
    s.ul_mcs = as_integer(v[kpi::kUlMcs], "ul_mcs");
    s.turbo_rate_min = v[kpi::kTurboMin];
    s.turbo_rate_avg = v[kpi::kTurboAvg];
    s.turbo_rate_max = v[kpi::kTurboMax];
    return s;
}

void KpiSample::validate() const {
    for (double f : features())
        if (!std::isfinite(f)) throw DomainError("KPI sample holds a non-finite value");
    if (cqi < 0 || cqi > 15) throw DomainError("cqi out of [0,15]");
    if (dl_mcs < 0 || dl_mcs > 28 || ul_mcs < 0 || ul_mcs > 28)
        throw DomainError("mcs out of [0,28]");
    if (rank_indicator < 1 || rank_indicator > 2) throw DomainError("rank_indicator out of {1,2}");
    auto fraction = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!fraction(dl_retx_rate) || !fraction(ul_retx_rate))
        throw DomainError("retransmission rate out of [0,1]");
    if (!(turbo_rate_min <= turbo_rate_avg && turbo_rate_avg <= turbo_rate_max))
        throw DomainError("turbo rates must satisfy min <= avg <= max");
}

std::string_view to_string(Protocol p) { return p == Protocol::WiFi ? "WiFi" : "None"; }

std::string_view to_string(Band b) {
    switch (b) {
        case Band::LteUl1950: return "LTE_UL_1950";
        case Band::LteDl2140: return "LTE_DL_2140";
        case Band::Nr3490: return "NR_3490";
    }
    return "?";
}

Band parse_band(std::string_view text) {
    if (text == "LTE_UL_1950") return Band::LteUl1950;
    if (text == "LTE_DL_2140") return Band::LteDl2140;
    if (text == "NR_3490") return Band::Nr3490;
    throw ParseError("unknown band '" + std::string(text) + "'");
}

Cell affected_cell(Band band) { return band == Band::Nr3490 ? Cell::NR : Cell::LTE; }

namespace {

double band_frequency(Band b) {
    switch (b) {
        case Band::LteUl1950: return 1950;
        case Band::LteDl2140: return 2140;
        case Band::Nr3490: return 3490;
    }
    return 0;
}

}  // namespace

void JammingScenario::validate() const {
    if (scenario_id.empty()) throw ConfigError("scenario_id must not be empty");
    if (center_frequency_mhz != band_frequency(band))
        throw ConfigError("scenario " + scenario_id + ": center frequency does not match band");
    if (protocol == Protocol::WiFi) {
        constexpr std::array<double, 5> levels{0, -5, -11, -12, -13};
        if (std::find(levels.begin(), levels.end(), power_dbm) == levels.end())
            throw ConfigError("scenario " + scenario_id + ": unsupported WiFi power level");
    }
    if (!(bandwidth_mhz > 0)) throw ConfigError("scenario " + scenario_id + ": bandwidth must be > 0");
}

std::string make_scenario_id(Band band, double power_dbm) {
    std::string id;
    switch (band) {
        case Band::LteUl1950: id = "lte_ul_1950_"; break;
        case Band::LteDl2140: id = "lte_dl_2140_"; break;
        case Band::Nr3490: id = "nr_3490_"; break;
    }
    long p = std::lround(power_dbm);
    id += p < 0 ? "m" + std::to_string(-p) : std::to_string(p);
    return id + "dbm";
}

std::vector<JammingScenario> testbed_scenarios() {
    std::vector<JammingScenario> out;
    auto add = [&](Band band, std::initializer_list<double> powers) {
        for (double p : powers)
            out.push_back({Protocol::WiFi, 80.0, band_frequency(band), p, band, make_scenario_id(band, p)});
    };
    add(Band::LteDl2140, {0, -5, -11, -12, -13});
    add(Band::LteUl1950, {0, -5, -11, -12, -13});
    add(Band::Nr3490, {-11, -12, -13});
    return out;
}

double db_to_linear(double x_db) {
    if (!std::isfinite(x_db)) throw DomainError("db_to_linear: non-finite input");
    return std::pow(10.0, x_db / 10.0);
}

double snr_to_spectral_efficiency(double snr_db) {
    return std::log1p(db_to_linear(snr_db)) / std::log(2.0);
}

// ---------------------------------------------------------------------------

EfficiencyTable::EfficiencyTable(std::vector<TableEntry> entries) : entries_(std::move(entries)) {
    const std::size_t n = entries_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (entries_[i].index != static_cast<int>(i))
            throw ConfigError("mapping table indices must be 0..n-1 in order");
        if (!std::isfinite(entries_[i].efficiency) || entries_[i].efficiency < 0)
            throw ConfigError("mapping table efficiency must be finite and >= 0");
    }
    suffix_min_.resize(n);
    prefix_max_.resize(n);
    for (std::size_t i = n; i-- > 0;)
        suffix_min_[i] = i + 1 < n ? std::min(entries_[i].efficiency, suffix_min_[i + 1]) : entries_[i].efficiency;
    for (std::size_t i = 0; i < n; ++i)
        prefix_max_[i] = i ? std::max(entries_[i].efficiency, prefix_max_[i - 1]) : entries_[i].efficiency;
    by_efficiency_.resize(n);
    std::iota(by_efficiency_.begin(), by_efficiency_.end(), std::size_t{0});
    std::stable_sort(by_efficiency_.begin(), by_efficiency_.end(), [&](std::size_t a, std::size_t b) {
        return entries_[a].efficiency < entries_[b].efficiency;
    });
}

double EfficiencyTable::max_efficiency() const { return prefix_max_.empty() ? 0.0 : prefix_max_.back(); }

int EfficiencyTable::floor_index(double eta) const {
    // suffix_min_ is non-decreasing; the last position with suffix_min_ <= eta holds the answer.
    auto it = std::upper_bound(suffix_min_.begin(), suffix_min_.end(), eta);
    return static_cast<int>(it - suffix_min_.begin()) - 1;
}

int EfficiencyTable::ceil_index(double eta) const {
    auto it = std::lower_bound(prefix_max_.begin(), prefix_max_.end(), eta);
    return it == prefix_max_.end() ? -1 : static_cast<int>(it - prefix_max_.begin());
}

int EfficiencyTable::nearest_index(double eta) const {
    if (entries_.empty()) throw StateError("empty mapping table");
    auto eff = [&](std::size_t k) { return entries_[by_efficiency_[k]].efficiency; };
    auto pos = static_cast<std::size_t>(
        std::lower_bound(by_efficiency_.begin(), by_efficiency_.end(), eta,
                         [&](std::size_t e, double v) { return entries_[e].efficiency < v; }) -
        by_efficiency_.begin());

    double best = std::numeric_limits<double>::infinity();
    if (pos < entries_.size()) best = eff(pos) - eta;
    if (pos > 0) best = std::min(best, eta - eff(pos - 1));

    int chosen = std::numeric_limits<int>::max();
    // Equal efficiencies are contiguous in by_efficiency_, so scan the runs next to pos.
    for (std::size_t k = pos; k < entries_.size() && eff(k) - eta == best; ++k)
        chosen = std::min(chosen, static_cast<int>(by_efficiency_[k]));
    for (std::size_t k = pos; k > 0 && eta - eff(k - 1) == best; --k)
        chosen = std::min(chosen, static_cast<int>(by_efficiency_[k - 1]));
    return chosen;
}

namespace {

std::vector<TableEntry> build(std::initializer_list<std::array<double, 3>> rows) {
    std::vector<TableEntry> out;
    int i = 0;
    for (const auto& r : rows) out.push_back({i++, static_cast<int>(r[0]), r[1], r[2]});
    return out;
}

}  // namespace

const MappingTables& MappingTables::standard() {
    // {modulation order, code rate x 1024, efficiency}
    static const MappingTables tables{
        EfficiencyTable(build({{0, 0, 0.0},
                               {2, 78, 0.1523},
                               {2, 120, 0.2344},
                               {2, 193, 0.3770},
                               {2, 308, 0.6016},
                               {2, 449, 0.8770},
                               {2, 602, 1.1758},
                               {4, 378, 1.4766},
                               {4, 490, 1.9141},
                               {4, 616, 2.4063},
                               {6, 466, 2.7305},
                               {6, 567, 3.3223},
                               {6, 666, 3.9023},
                               {6, 772, 4.5234},
                               {6, 873, 5.1152},
                               {6, 948, 5.5547}})),
        EfficiencyTable(build({{2, 120, 0.2344}, {2, 157, 0.3066}, {2, 193, 0.3770}, {2, 251, 0.4902},
                               {2, 308, 0.6016}, {2, 379, 0.7402}, {2, 449, 0.8770}, {2, 526, 1.0273},
                               {2, 602, 1.1758}, {2, 679, 1.3262}, {4, 340, 1.3281}, {4, 378, 1.4766},
                               {4, 434, 1.6953}, {4, 490, 1.9141}, {4, 553, 2.1602}, {4, 616, 2.4063},
                               {4, 658, 2.5703}, {6, 438, 2.5664}, {6, 466, 2.7305}, {6, 517, 3.0293},
                               {6, 567, 3.3223}, {6, 616, 3.6094}, {6, 666, 3.9023}, {6, 719, 4.2129},
                               {6, 772, 4.5234}, {6, 822, 4.8164}, {6, 873, 5.1152}, {6, 910, 5.3320},
                               {6, 948, 5.5547}}))};
    return tables;
}

EfficiencyTable parse_table_csv(std::istream& in, std::size_t expected_rows) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<TableEntry> rows;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto cols = detail::split_csv(view);
        if (!header_seen) {
            const std::array<std::string_view, 4> expected{"index", "modulation_order", "code_rate_x1024",
                                                           "efficiency"};
            if (cols.size() != expected.size())
                throw SchemaError("mapping table header must have 4 columns", line_no);
            for (std::size_t i = 0; i < expected.size(); ++i)
                if (detail::trim(cols[i]) != expected[i])
                    throw SchemaError("unexpected column '" + std::string(cols[i]) + "'", line_no);
            header_seen = true;
            continue;
        }
        if (cols.size() != 4) throw ParseError("expected 4 fields", line_no);
        TableEntry e;
        e.index = static_cast<int>(detail::parse_int(cols[0], line_no));
        e.modulation_order = static_cast<int>(detail::parse_int(cols[1], line_no));
        e.code_rate_x1024 = detail::parse_double(cols[2], line_no);
        e.efficiency = detail::parse_double(cols[3], line_no);
        rows.push_back(e);
    }
    if (!header_seen) throw SchemaError("mapping table is missing its header");
    if (expected_rows && rows.size() != expected_rows)
        throw SchemaError("mapping table has " + std::to_string(rows.size()) + " rows, expected " +
                          std::to_string(expected_rows));
    try {
        return EfficiencyTable(std::move(rows));
    } catch (const ConfigError& e) {
        throw SchemaError(e.what());
    }
}

void write_table_csv(std::ostream& out, const EfficiencyTable& table) {
    out << "index,modulation_order,code_rate_x1024,efficiency\n";
    for (const auto& e : table.entries())
        out << e.index << ',' << e.modulation_order << ',' << detail::format_double(e.code_rate_x1024) << ','
            << detail::format_double(e.efficiency) << '\n';
}

MappingTables MappingTables::from_csv(const std::string& cqi_path, const std::string& mcs_path) {
    auto load = [](const std::string& path, std::size_t rows) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open mapping table '" + path + "'");
        return parse_table_csv(in, rows);
    };
    return {load(cqi_path, 16), load(mcs_path, 29)};
}

McsLookup efficiency_to_mcs(double eta, const MappingTables& tables, LookupRule rule) {
    if (!std::isfinite(eta)) throw DomainError("efficiency_to_mcs: non-finite efficiency");
    const auto& t = tables.mcs;
    if (rule == LookupRule::Nearest) return {t.nearest_index(eta), false};
    int idx = t.floor_index(eta);
    if (idx < 0) return {0, true};
    return {idx, false};
}

CqiLookup efficiency_to_cqi(double eta, const MappingTables& tables) {
    if (!std::isfinite(eta)) throw DomainError("efficiency_to_cqi: non-finite efficiency");
    const auto& t = tables.cqi;
    const int top = static_cast<int>(t.size()) - 1;
    CqiLookup out;
    int lo = t.floor_index(eta);
    if (lo < 0) {
        out.saturated = true;
        lo = 0;
    }
    int hi = t.ceil_index(eta);
    if (hi < 0) hi = top;
    out.floor = lo;
    out.bracket_low = lo;
    out.bracket_high = std::max(hi, lo);
    return out;
}

}  // namespace jamguard
