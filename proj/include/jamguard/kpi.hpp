#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jamguard {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Cell { NR, LTE };

std::string_view to_string(Cell cell);
Cell parse_cell(std::string_view text);

inline constexpr std::size_t kKpiCount = 17;

/// Feature order used everywhere a KpiSample is flattened (CSV columns, model inputs).
inline constexpr std::array<std::string_view, kKpiCount> kKpiNames{
    "dl_bitrate",      "ul_bitrate",     "dl_packet_rate",    "ul_packet_rate", "dl_retx_rate",
    "ul_retx_rate",    "pusch_snr_db",   "cqi",               "rank_indicator", "power_headroom_db",
    "epre_dbm",        "ul_path_loss_db", "dl_mcs",           "ul_mcs",         "turbo_rate_min",
    "turbo_rate_avg",  "turbo_rate_max"};

/// Positions of the KPIs that other modules address directly.
namespace kpi {
inline constexpr std::size_t kDlBitrate = 0;
inline constexpr std::size_t kUlBitrate = 1;
inline constexpr std::size_t kDlPacketRate = 2;
inline constexpr std::size_t kUlPacketRate = 3;
inline constexpr std::size_t kDlRetx = 4;
inline constexpr std::size_t kUlRetx = 5;
inline constexpr std::size_t kPuschSnr = 6;
inline constexpr std::size_t kCqi = 7;
inline constexpr std::size_t kRankIndicator = 8;
inline constexpr std::size_t kPowerHeadroom = 9;
inline constexpr std::size_t kEpre = 10;
inline constexpr std::size_t kPathLoss = 11;
inline constexpr std::size_t kDlMcs = 12;
inline constexpr std::size_t kUlMcs = 13;
inline constexpr std::size_t kTurboMin = 14;
inline constexpr std::size_t kTurboAvg = 15;
inline constexpr std::size_t kTurboMax = 16;
}  // namespace kpi

/// One 180 ms cross-layer KPI snapshot of a single cell.
struct KpiSample {
    std::int64_t timestamp_ms = 0;
    Cell cell = Cell::NR;

    double dl_bitrate = 0;      // bit/s
    double ul_bitrate = 0;      // bit/s
    double dl_packet_rate = 0;  // packet/s
    double ul_packet_rate = 0;  // packet/s
    double dl_retx_rate = 0;    // [0,1]
    double ul_retx_rate = 0;    // [0,1]
    double pusch_snr_db = 0;
    int cqi = 0;                // [0,15]
    int rank_indicator = 1;     // {1,2}
    double power_headroom_db = 0;
    double epre_dbm = 0;
    double ul_path_loss_db = 0;
    int dl_mcs = 0;             // [0,28]
    int ul_mcs = 0;             // [0,28]
    double turbo_rate_min = 0;
    double turbo_rate_avg = 0;
    double turbo_rate_max = 0;

    std::array<double, kKpiCount> features() const;

    /// Inverse of features(). Integer-valued KPIs must hold integral values.
    static KpiSample from_features(std::int64_t timestamp_ms, Cell cell,
                                   std::span<const double, kKpiCount> values);

    /// Throws DomainError when an invariant (ranges, turbo ordering) is violated.
    void validate() const;

    bool operator==(const KpiSample&) const = default;
};

enum class Protocol { WiFi, None };
enum class Band { LteUl1950, LteDl2140, Nr3490 };

std::string_view to_string(Protocol p);
std::string_view to_string(Band b);
Band parse_band(std::string_view text);

/// The cell whose link a jammer in `band` degrades directly.
Cell affected_cell(Band band);

struct JammingScenario {
    Protocol protocol = Protocol::WiFi;
    double bandwidth_mhz = 80;
    double center_frequency_mhz = 2140;
    double power_dbm = 0;
    Band band = Band::LteDl2140;
    std::string scenario_id;

    void validate() const;
    bool operator==(const JammingScenario&) const = default;
};

/// Builds the canonical id, e.g. "lte_dl_2140_m13dbm".
std::string make_scenario_id(Band band, double power_dbm);

/// The 13 WiFi interference conditions recorded on the testbed: 2140 and 1950 MHz at
/// {0,-5,-11,-12,-13} dBm, 3490 MHz at {-11,-12,-13} dBm.
std::vector<JammingScenario> testbed_scenarios();

// ---------------------------------------------------------------------------
// Unit conversions
// ---------------------------------------------------------------------------

double db_to_linear(double x_db);

/// Shannon efficiency log2(1 + SNR) with the PUSCH SNR taken as the linear SNR argument.
double snr_to_spectral_efficiency(double snr_db);

// ---------------------------------------------------------------------------
// CQI / MCS mapping tables
// ---------------------------------------------------------------------------

struct TableEntry {
    int index = 0;
    int modulation_order = 0;
    double code_rate_x1024 = 0;
    double efficiency = 0;  // bit/s/Hz
    bool operator==(const TableEntry&) const = default;
};

/// One lookup table with precomputed search structures.
class EfficiencyTable {
public:
    EfficiencyTable() = default;
    explicit EfficiencyTable(std::vector<TableEntry> entries);

    std::span<const TableEntry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    const TableEntry& operator[](std::size_t i) const { return entries_[i]; }
    double min_efficiency() const { return suffix_min_.empty() ? 0.0 : suffix_min_.front(); }
    double max_efficiency() const;

    /// Largest index whose efficiency is <= eta, or -1 when none is.
    int floor_index(double eta) const;
    /// Smallest index whose efficiency is >= eta, or -1 when none is.
    int ceil_index(double eta) const;
    /// Index with efficiency closest to eta; equal distances resolve to the lower index.
    int nearest_index(double eta) const;

private:
    std::vector<TableEntry> entries_;
    std::vector<double> suffix_min_;  // min efficiency over [i, n)
    std::vector<double> prefix_max_;  // max efficiency over [0, i]
    std::vector<std::size_t> by_efficiency_;  // entry positions sorted by (efficiency, index)
};

struct MappingTables {
    EfficiencyTable cqi;  // 4-bit CQI table, 16 entries
    EfficiencyTable mcs;  // 64QAM PDSCH MCS table, 29 entries

    /// Compiled-in TS 38.214 Table 5.2.2.1-2 and Table 5.1.3.1-1.
    static const MappingTables& standard();

    /// Load from CSV files with header `index,modulation_order,code_rate_x1024,efficiency`.
    static MappingTables from_csv(const std::string& cqi_path, const std::string& mcs_path);
};

/// Parse one table in the CSV layout above. Throws ParseError / SchemaError.
EfficiencyTable parse_table_csv(std::istream& in, std::size_t expected_rows);
void write_table_csv(std::ostream& out, const EfficiencyTable& table);

enum class LookupRule { Nearest, Floor };

struct McsLookup {
    int index = 0;
    bool saturated = false;  // eta below the table minimum under the floor rule
};

struct CqiLookup {
    int floor = 0;
    int bracket_low = 0;
    int bracket_high = 0;
    bool saturated = false;  // eta below the table minimum
};

McsLookup efficiency_to_mcs(double eta, const MappingTables& tables,
                            LookupRule rule = LookupRule::Nearest);
CqiLookup efficiency_to_cqi(double eta, const MappingTables& tables);

}  // namespace jamguard
