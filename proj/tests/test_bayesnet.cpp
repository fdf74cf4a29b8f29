#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <random>

#include "jamguard/bayesnet.hpp"
#include "jamguard/error.hpp"
#include "oracles.hpp"

using namespace jamguard;

namespace {

ResolvedEvidence none(const DiscreteBayesNet& net) {
    ResolvedEvidence ev;
    ev.states.assign(net.size(), std::nullopt);
    return ev;
}

}  // namespace

TEST_CASE("rule DAG structure") {
    const auto net = build_dag_from_rules();
    CHECK(net.size() == 5);
    const auto order = net.topological_order();
    CHECK(net.node(order.front()).name == kJammingNode);
    const auto& j = net.node(net.index_of(kJammingNode));
    CHECK(j.parents.empty());
    const auto& dl = net.node(net.index_of(kDlMcsNode));
    REQUIRE(dl.parents.size() == 1);
    CHECK(net.node(dl.parents[0]).name == kCqiNode);

    std::set<std::pair<std::string, std::string>> edges;
    for (auto [a, b] : net.edges()) edges.insert({net.node(a).name, net.node(b).name});
    const std::set<std::pair<std::string, std::string>> expect{{kJammingNode, kSnrNode}, {kJammingNode, kCqiNode},
                                                               {kSnrNode, kCqiNode},     {kCqiNode, kDlMcsNode},
                                                               {kCqiNode, kUlMcsNode},   {kSnrNode, kUlMcsNode}};
    CHECK(edges == expect);
    CHECK(net.node(net.index_of(kSnrNode)).cardinality() == 6);
    CHECK(net.node(net.index_of(kCqiNode)).cardinality() == 4);
    net.validate();
}

TEST_CASE("a reversed edge is rejected as a cycle") {
    auto net = build_dag_from_rules();
    net.add_edge(kSnrNode, kJammingNode);
    try {
        net.validate();
        FAIL("cycle not detected");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find(kJammingNode) != std::string::npos);
    }
    CHECK_THROWS_AS(net.topological_order(), DomainError);
    CHECK_THROWS_AS(net.add_edge(kCqiNode, kCqiNode), DomainError);
}

TEST_CASE("CPT estimation: frequencies, smoothing, hand tabulation") {
    DiscreteBayesNet one;
    one.add_node("X", {"a", "b", "c"});
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t s : {0, 0, 1, 1, 1, 2, 2, 2, 2, 2}) rows.push_back({s});
    fit_cpts(one, rows, 0.0);
    CHECK(one.node(0).cpt[0] == doctest::Approx(0.2));
    CHECK(one.node(0).cpt[1] == doctest::Approx(0.3));
    CHECK(one.node(0).cpt[2] == doctest::Approx(0.5));

    DiscreteBayesNet two;
    two.add_node("A", {"0", "1", "2"});
    two.add_node("B", {"x", "y"});
    two.add_edge("A", "B");
    std::vector<std::vector<std::size_t>> data;
    std::mt19937_64 g(3);
    for (int i = 0; i < 50; ++i) {
        const std::size_t a = g() % 2;  // A = 2 never observed
        data.push_back({a, (g() % 3 == 0) ? 1u : 0u});
    }
    fit_cpts(two, data, 1.0);
    double counts[3][2] = {};
    for (const auto& r : data) counts[r[0]][r[1]] += 1;
    for (std::size_t a = 0; a < 3; ++a) {
        const double n = counts[a][0] + counts[a][1];
        for (std::size_t b = 0; b < 2; ++b)
            CHECK(two.node(1).cpt[a * 2 + b] == doctest::Approx((counts[a][b] + 1) / (n + 2)).epsilon(1e-15));
    }
    CHECK(two.node(1).cpt[4] == 0.5);
    CHECK(two.node(1).cpt[5] == 0.5);
    CHECK(two.node(0).cpt[2] == doctest::Approx(1.0 / 53));
    CHECK_THROWS_AS(fit_cpts(two, std::vector<std::vector<std::size_t>>{}, 1.0), ConfigError);
    two.validate();
}

TEST_CASE("discretize boundaries, clamping and a linear-scan oracle") {
    const std::vector<double> e{-5, 0, 2.5, 10};
    CHECK(discretize(-5, e).bin == 0);
    CHECK_FALSE(discretize(-5, e).clamped);
    CHECK(discretize(2.5, e).bin == 2);
    CHECK(discretize(10, e).bin == 2);
    CHECK(discretize(10, e).clamped);
    CHECK(discretize(1e9, e).bin == 2);
    CHECK(discretize(-7, e).bin == 0);
    CHECK(discretize(-7, e).clamped);
    CHECK_THROWS_AS(discretize(1, std::vector<double>{0, 0, 1}), DomainError);
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> u(-8, 13);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(g);
        std::size_t scan = 0;
        for (std::size_t b = 0; b + 1 < e.size(); ++b)
            if (v >= e[b]) scan = b;
        CHECK(discretize(v, e).bin == scan);
        CHECK(discretize(v, e).clamped == (v < e.front() || v >= e.back()));
    }
}

TEST_CASE("root posterior without evidence is its prior") {
    auto net = build_dag_from_rules();
    net.set_cpt(net.index_of(kJammingNode), {0.3, 0.7});
    const auto p = posterior(net, net.index_of(kJammingNode), none(net));
    CHECK(p[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("variable elimination equals enumeration on 50 random nets") {
    std::mt19937_64 g(2026);
    double worst = 0;
    for (int n = 0; n < 50; ++n) {
        const std::size_t nodes = 2 + g() % 11;
        const auto net = oracle::random_net(g, nodes, 4);
        ResolvedEvidence ev = none(net);
        const std::size_t query = g() % nodes;
        for (std::size_t i = 0; i < nodes; ++i)
            if (i != query && g() % 3 == 0) ev.states[i] = g() % net.node(i).cardinality();
        const auto t0 = std::chrono::steady_clock::now();
        const auto ve = posterior(net, query, ev);
        CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
        const auto en = oracle::enumerate_posterior(net, query, ev.states);
        CHECK(std::abs(std::accumulate(ve.begin(), ve.end(), 0.0) - 1.0) <= 1e-12);
        for (std::size_t s = 0; s < ve.size(); ++s) worst = std::max(worst, std::abs(ve[s] - en[s]));

        // Five random elimination orders agree.
        std::vector<std::size_t> hidden;
        for (std::size_t i = 0; i < nodes; ++i)
            if (i != query && !ev.states[i]) hidden.push_back(i);
        for (int k = 0; k < 5; ++k) {
            std::shuffle(hidden.begin(), hidden.end(), g);
            const auto alt = posterior(net, query, ev, hidden);
            for (std::size_t s = 0; s < ve.size(); ++s) CHECK(std::abs(alt[s] - ve[s]) <= 1e-10);
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("zero-probability evidence names the assignment") {
    DiscreteBayesNet net;
    net.add_node("A", {"no", "yes"});
    net.add_node("B", {"off", "on"});
    net.add_edge("A", "B");
    net.set_cpt(0, {1.0, 0.0});
    net.set_cpt(1, {1.0, 0.0, 0.0, 1.0});
    Evidence ev{{"B", EvidenceValue::of_state(1)}};
    try {
        posterior(net, "A", ev);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("B=on") != std::string::npos);
    }
}

TEST_CASE("evidence parsing, rounding and clamping") {
    const auto net = build_dag_from_rules();
    const auto ev = evidence_from_json(nlohmann::json::parse(R"({"PUSCH_SNR": 40.0, "CQI": 11.54, "DL_MCS": {"state": 2}})"));
    const auto r = resolve_evidence(net, ev);
    CHECK(r.states[net.index_of(kSnrNode)] == 5u);
    CHECK(r.clamped == std::vector<std::string>{kSnrNode});
    CHECK(r.states[net.index_of(kCqiNode)] == 3u);  // 12 after rounding
    CHECK(r.states[net.index_of(kDlMcsNode)] == 2u);
    CHECK_FALSE(r.states[net.index_of(kUlMcsNode)].has_value());
    CHECK_THROWS_AS(resolve_evidence(net, {{"Nope", EvidenceValue::of_value(1)}}), ConfigError);
    CHECK_THROWS_AS(evidence_from_json(nlohmann::json::parse(R"({"CQI": "high"})")), ParseError);
    const auto by_state = resolve_evidence(net, {{kCqiNode, EvidenceValue::of_state(3)}});
    CHECK(by_state.states[net.index_of(kCqiNode)] == 3u);
}

TEST_CASE("network JSON round trip and bins config") {
    std::mt19937_64 g(5);
    auto net = build_dag_from_rules();
    for (std::size_t i = 0; i < net.size(); ++i) {
        auto cpt = net.node(i).cpt;
        const auto k = net.node(i).cardinality();
        for (std::size_t r = 0; r < cpt.size() / k; ++r) {
            double z = 0;
            for (std::size_t s = 0; s < k; ++s) z += cpt[r * k + s] = 1.0 + static_cast<double>(g() % 100);
            for (std::size_t s = 0; s < k; ++s) cpt[r * k + s] /= z;
        }
        net.set_cpt(i, cpt);
    }
    const auto back = DiscreteBayesNet::from_json(nlohmann::json::parse(net.to_json().dump()));
    CHECK(back.to_json() == net.to_json());
    const Evidence ev{{kSnrNode, EvidenceValue::of_value(12.0)}, {kCqiNode, EvidenceValue::of_value(13)}};
    CHECK(jamming_posterior(back, ev) == jamming_posterior(net, ev));
    CHECK_THROWS_AS(DiscreteBayesNet::from_json({{"format", "x"}}), SchemaError);

    BnBins bins;
    CHECK(BnBins::from_json(bins.to_json()).to_json() == bins.to_json());
    CHECK_THROWS_AS(BnBins::from_json({{"rsrp", {0, 1}}}), ConfigError);
    CHECK(bn_summary_table(net).find("| " + std::string(kJammingNode)) != std::string::npos);
}
