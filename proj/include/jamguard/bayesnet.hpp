#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamguard/datagen.hpp"

namespace jamguard {

struct Discretized {
    std::size_t bin = 0;
    bool clamped = false;  // value fell outside [edges.front(), edges.back())
};

/// Half-open bins [e_i, e_{i+1}); values outside the edges go to the end bins with `clamped` set.
Discretized discretize(double value, std::span<const double> edges);

/// Node of a discrete network. Continuous nodes carry bin edges and get one state per bin.
struct BnNode {
    std::string name;
    std::vector<std::string> states;
    std::vector<double> edges;   // empty for categorical nodes
    bool integer_valued = false;  // raw evidence is rounded before binning
    std::vector<std::size_t> parents;
    /// Pr(node | parents), one row of `states.size()` per parent configuration. The first parent
    /// varies slowest.
    std::vector<double> cpt;

    bool continuous() const { return !edges.empty(); }
    std::size_t cardinality() const { return states.size(); }
};

class DiscreteBayesNet {
public:
    std::size_t add_node(std::string name, std::vector<std::string> states);
    std::size_t add_binned_node(std::string name, std::vector<double> edges, bool integer_valued = false);
    /// Adds parent -> child; CPT of the child is reset to uniform.
    void add_edge(std::string_view parent, std::string_view child);
    void add_edge(std::size_t parent, std::size_t child);

    std::size_t size() const { return nodes_.size(); }
    const BnNode& node(std::size_t i) const { return nodes_.at(i); }
    BnNode& node(std::size_t i) { return nodes_.at(i); }
    const std::vector<BnNode>& nodes() const { return nodes_; }
    std::size_t index_of(std::string_view name) const;
    std::optional<std::size_t> find(std::string_view name) const;

    /// Kahn order, ties by lowest index. Throws DomainError on a cycle.
    std::vector<std::size_t> topological_order() const;
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    std::size_t parent_configurations(std::size_t node) const;
    std::size_t parent_config_index(std::size_t node, std::span<const std::size_t> assignment) const;
    /// Pr(node = assignment[node] | parents as in assignment).
    double probability(std::size_t node, std::span<const std::size_t> assignment) const;
    void set_cpt(std::size_t node, std::vector<double> cpt);

    /// Acyclic, state spaces non-empty, CPT rows non-negative and summing to 1.
    void validate() const;

    nlohmann::json to_json() const;
    static DiscreteBayesNet from_json(const nlohmann::json& j);

private:
    void reset_cpt(std::size_t node);
    std::vector<BnNode> nodes_;
};

inline constexpr const char* kJammingNode = "Jamming";
inline constexpr const char* kSnrNode = "PUSCH_SNR";
inline constexpr const char* kCqiNode = "CQI";
inline constexpr const char* kDlMcsNode = "DL_MCS";
inline constexpr const char* kUlMcsNode = "UL_MCS";

struct BnBins {
    std::vector<double> snr{-5.0, 5.0 / 3.0, 25.0 / 3.0, 15.0, 65.0 / 3.0, 85.0 / 3.0, 35.0};
    std::vector<double> cqi{0, 4, 8, 12, 16};
    std::vector<double> mcs{0, 7, 14, 21, 29};

    nlohmann::json to_json() const;
    static BnBins from_json(const nlohmann::json& j);
};

/// Jamming -> {PUSCH_SNR, CQI}, PUSCH_SNR -> {CQI, UL_MCS}, CQI -> {DL_MCS, UL_MCS}, uniform CPTs.
DiscreteBayesNet build_dag_from_rules(const BnBins& bins = {});

/// Complete-data CPT estimation with Laplace smoothing: (count + alpha) / (n_parent + alpha |states|).
/// A parent configuration with no data and alpha = 0 gets a uniform row.
void fit_cpts(DiscreteBayesNet& net, std::span<const std::vector<std::size_t>> assignments, double alpha = 1.0);

/// Fit the rule DAG from dataset rows using the KPIs of `cell`; Jamming is the row label.
void fit_cpts(DiscreteBayesNet& net, const LabeledDataset& ds, std::span<const std::size_t> rows, Cell cell,
              double alpha = 1.0);

/// Observed node value: a state index or a raw value to discretize.
struct EvidenceValue {
    std::optional<std::size_t> state;
    double raw = 0;

    static EvidenceValue of_state(std::size_t s) { return {s, 0}; }
    static EvidenceValue of_value(double v) { return {std::nullopt, v}; }
};
using Evidence = std::map<std::string, EvidenceValue, std::less<>>;

/// The four KPI nodes of a snapshot.
Evidence evidence_from_sample(const KpiSample& s);
/// {"PUSCH_SNR": 15.31, "CQI": 12, ...}; integers and reals are raw values, {"state": i} picks a state.
Evidence evidence_from_json(const nlohmann::json& j);

struct ResolvedEvidence {
    std::vector<std::optional<std::size_t>> states;  // per node
    std::vector<std::string> clamped;                 // nodes whose raw value was outside the bins
};
ResolvedEvidence resolve_evidence(const DiscreteBayesNet& net, const Evidence& ev);

/// Exact Pr(query | evidence) by variable elimination. `order` lists the hidden variables to
/// eliminate; empty selects min-degree. Throws DomainError when the evidence has probability zero.
std::vector<double> posterior(const DiscreteBayesNet& net, std::size_t query, const ResolvedEvidence& ev,
                              std::span<const std::size_t> order = {});
std::vector<double> posterior(const DiscreteBayesNet& net, std::string_view query, const Evidence& ev);

/// Pr(Jamming = present | evidence) on a net built by build_dag_from_rules.
double jamming_posterior(const DiscreteBayesNet& net, const Evidence& ev);

/// Markdown table of each node's prior marginal distribution.
std::string bn_summary_table(const DiscreteBayesNet& net);

}  // namespace jamguard
