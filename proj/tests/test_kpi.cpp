#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "jamguard/error.hpp"
#include "jamguard/kpi.hpp"

using namespace jamguard;

namespace {

const MappingTables& T() { return MappingTables::standard(); }

// Linear scans used as oracles for the indexed lookups.
int scan_nearest(const EfficiencyTable& t, double eta) {
    int best = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs(t[i].efficiency - eta) < std::abs(t[static_cast<std::size_t>(best)].efficiency - eta))
            best = static_cast<int>(i);
    return best;
}

int scan_floor(const EfficiencyTable& t, double eta) {
    int best = -1;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i].efficiency <= eta) best = static_cast<int>(i);
    return best;
}

int scan_ceil(const EfficiencyTable& t, double eta) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i].efficiency >= eta) return static_cast<int>(i);
    return -1;
}

}  // namespace

TEST_CASE("spectral efficiency of the worked example and limits") {
    CHECK(std::abs(snr_to_spectral_efficiency(15.0) - 5.0278) <= 1e-3);
    CHECK(snr_to_spectral_efficiency(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(snr_to_spectral_efficiency(-300.0) >= 0.0);
    CHECK(snr_to_spectral_efficiency(-300.0) < 1e-20);
    CHECK_THROWS_AS(snr_to_spectral_efficiency(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("spectral efficiency strictly increasing on a sorted grid") {
    double prev = -1;
    for (double s = -30; s <= 40; s += 0.01) {
        const double e = snr_to_spectral_efficiency(s);
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("db_to_linear is a homomorphism") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(-60, 60);
    for (int i = 0; i < 500; ++i) {
        const double a = u(g), b = u(g);
        const double lhs = db_to_linear(a + b), rhs = db_to_linear(a) * db_to_linear(b);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    }
}

TEST_CASE("worked mapping: 5.0278 bit/s/Hz") {
    const double eta = 5.0278;
    CHECK(efficiency_to_mcs(eta, T()).index == 26);
    const auto c = efficiency_to_cqi(eta, T());
    CHECK(c.floor == 13);
    CHECK(c.bracket_low <= 14);
    CHECK(c.bracket_high >= 14);
    CHECK_FALSE(c.saturated);
}

TEST_CASE("table sizes and exact hits") {
    REQUIRE(T().cqi.size() == 16);
    REQUIRE(T().mcs.size() == 29);
    for (std::size_t i = 0; i < T().mcs.size(); ++i)
        CHECK(efficiency_to_mcs(T().mcs[i].efficiency, T()).index == static_cast<int>(i));
    for (std::size_t i = 0; i < T().cqi.size(); ++i) CHECK(efficiency_to_cqi(T().cqi[i].efficiency, T()).floor == static_cast<int>(i));
}

TEST_CASE("floor round trip holds except where a later MCS entry is less efficient") {
    // MCS 17 (64QAM) is slightly less efficient than MCS 16 (16QAM), so the largest index at or
    // below 16's efficiency is 17.
    const auto& m = T().mcs;
    for (std::size_t i = 0; i < m.size(); ++i) {
        bool later_lower = false;
        for (std::size_t j = i + 1; j < m.size(); ++j) later_lower |= m[j].efficiency <= m[i].efficiency;
        const int got = efficiency_to_mcs(m[i].efficiency, T(), LookupRule::Floor).index;
        if (later_lower) CHECK(got != static_cast<int>(i));
        else CHECK(got == static_cast<int>(i));
    }
    CHECK(efficiency_to_mcs(m[16].efficiency, T(), LookupRule::Floor).index == 17);
}

TEST_CASE("top saturation of the CQI table") {
    const double top = T().cqi[15].efficiency;
    auto c = efficiency_to_cqi(top, T());
    CHECK(c.floor == 15);
    CHECK(c.bracket_low == 15);
    CHECK(c.bracket_high == 15);
    c = efficiency_to_cqi(top + 3.0, T());
    CHECK(c.bracket_low == 15);
    CHECK(c.bracket_high == 15);
}

TEST_CASE("floor rule below the table minimum saturates") {
    const auto r = efficiency_to_mcs(0.1, T(), LookupRule::Floor);
    CHECK(r.index == 0);
    CHECK(r.saturated);
}

TEST_CASE("1000 random efficiencies agree with linear scans") {
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> u(0.0, 6.5);
    for (int i = 0; i < 1000; ++i) {
        const double eta = u(g);
        CHECK(efficiency_to_mcs(eta, T()).index == scan_nearest(T().mcs, eta));
        const int fl = scan_floor(T().mcs, eta);
        CHECK(efficiency_to_mcs(eta, T(), LookupRule::Floor).index == (fl < 0 ? 0 : fl));
        const auto c = efficiency_to_cqi(eta, T());
        CHECK(c.floor == scan_floor(T().cqi, eta));
        const int ce = scan_ceil(T().cqi, eta);
        CHECK(c.bracket_high == (ce < 0 ? 15 : ce));
    }
}

TEST_CASE("lookups monotone in efficiency") {
    int prev_cqi = 0;
    double prev_mcs_eff = -1, prev_floor_eff = -1;
    for (double eta = 0; eta <= 6.5; eta += 1e-4) {
        const int c = efficiency_to_cqi(eta, T()).floor;
        CHECK(c >= prev_cqi);
        prev_cqi = c;
        // MCS indices are not monotone in efficiency around 16/17, the selected efficiency is.
        const double e = T().mcs[static_cast<std::size_t>(efficiency_to_mcs(eta, T()).index)].efficiency;
        const auto f = efficiency_to_mcs(eta, T(), LookupRule::Floor);
        const double fe = T().mcs[static_cast<std::size_t>(f.index)].efficiency;
        CHECK(e >= prev_mcs_eff);
        if (!f.saturated) {
            CHECK(fe >= prev_floor_eff);
            prev_floor_eff = fe;
        }
        prev_mcs_eff = e;
    }
    int prev = 0;
    for (double eta = 0; eta <= 6.5; eta += 1e-4) {
        const auto f = efficiency_to_mcs(eta, T(), LookupRule::Floor);
        CHECK(f.index >= prev);
        prev = f.index;
    }
}

TEST_CASE("mapping table CSV round trip and schema errors") {
    std::stringstream s;
    write_table_csv(s, T().mcs);
    const auto back = parse_table_csv(s, 29);
    REQUIRE(back.size() == 29);
    for (std::size_t i = 0; i < 29; ++i) CHECK(back[i] == T().mcs[i]);

    std::istringstream bad("index,modulation_order,efficiency\n0,2,0.2\n");
    CHECK_THROWS_AS(parse_table_csv(bad, 1), SchemaError);
    std::istringstream short_rows("index,modulation_order,code_rate_x1024,efficiency\n0,2,120,0.2344\n");
    CHECK_THROWS_AS(parse_table_csv(short_rows, 29), Error);
}

TEST_CASE("sample feature round trip and validation") {
    KpiSample s;
    s.cqi = 12;
    s.dl_mcs = 20;
    s.ul_mcs = 18;
    s.rank_indicator = 2;
    s.turbo_rate_min = 0.1;
    s.turbo_rate_avg = 0.2;
    s.turbo_rate_max = 0.3;
    s.validate();
    const auto f = s.features();
    CHECK(KpiSample::from_features(0, Cell::NR, f) == s);
    auto bad = s;
    bad.turbo_rate_min = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    auto g = f;
    g[kpi::kCqi] = 3.5;
    CHECK_THROWS_AS(KpiSample::from_features(0, Cell::NR, g), Error);
}

TEST_CASE("testbed scenarios") {
    const auto sc = testbed_scenarios();
    CHECK(sc.size() == 13);
    std::set<std::string> ids;
    for (const auto& s : sc) ids.insert(s.scenario_id);
    CHECK(ids.size() == 13);
    CHECK(ids.count("lte_dl_2140_m13dbm"));
    CHECK(make_scenario_id(Band::Nr3490, -11) == "nr_3490_m11dbm");
    CHECK(affected_cell(Band::LteDl2140) == Cell::LTE);
    CHECK(affected_cell(Band::Nr3490) == Cell::NR);
}
