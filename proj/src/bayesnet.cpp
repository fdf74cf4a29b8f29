#include "jamguard/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "jamguard/error.hpp"

namespace jamguard {

Discretized discretize(double value, std::span<const double> edges) {
    if (edges.size() < 2) throw DomainError("discretize: need at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw DomainError("discretize: bin edges must be strictly increasing");
    if (std::isnan(value)) throw DomainError("discretize: value is NaN");
    const std::size_t bins = edges.size() - 1;
    if (value < edges.front()) return {0, true};
    if (value >= edges.back()) return {bins - 1, true};
    auto it = std::upper_bound(edges.begin(), edges.end(), value);
    return {static_cast<std::size_t>(it - edges.begin()) - 1, false};
}

namespace {

std::string format_edge(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Structure
// ---------------------------------------------------------------------------

std::size_t DiscreteBayesNet::add_node(std::string name, std::vector<std::string> states) {
    if (states.empty()) throw ConfigError("node '" + name + "' needs at least one state");
    if (find(name)) throw ConfigError("duplicate node '" + name + "'");
    BnNode n;
    n.name = std::move(name);
    n.states = std::move(states);
    nodes_.push_back(std::move(n));
    reset_cpt(nodes_.size() - 1);
    return nodes_.size() - 1;
}

std::size_t DiscreteBayesNet::add_binned_node(std::string name, std::vector<double> edges, bool integer_valued) {
    if (edges.size() < 2) throw ConfigError("node '" + name + "' needs at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw ConfigError("bin edges of '" + name + "' must be strictly increasing");
    std::vector<std::string> states;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        states.push_back("[" + format_edge(edges[i]) + "," + format_edge(edges[i + 1]) + ")");
    const auto idx = add_node(std::move(name), std::move(states));
    nodes_[idx].edges = std::move(edges);
    nodes_[idx].integer_valued = integer_valued;
    return idx;
}

void DiscreteBayesNet::add_edge(std::string_view parent, std::string_view child) {
    add_edge(index_of(parent), index_of(child));
}

void DiscreteBayesNet::add_edge(std::size_t parent, std::size_t child) {
    if (parent >= size() || child >= size()) throw ConfigError("edge endpoint out of range");
    if (parent == child) throw DomainError("self loop on '" + nodes_[parent].name + "'");
    auto& ps = nodes_[child].parents;
    if (std::find(ps.begin(), ps.end(), parent) != ps.end())
        throw ConfigError("duplicate edge " + nodes_[parent].name + " -> " + nodes_[child].name);
    ps.push_back(parent);
    reset_cpt(child);
}

std::optional<std::size_t> DiscreteBayesNet::find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].name == name) return i;
    return std::nullopt;
}

std::size_t DiscreteBayesNet::index_of(std::string_view name) const {
    auto i = find(name);
    if (!i) throw ConfigError("unknown node '" + std::string(name) + "'");
    return *i;
}

std::vector<std::size_t> DiscreteBayesNet::topological_order() const {
    std::vector<std::size_t> indeg(size(), 0);
    std::vector<std::vector<std::size_t>> children(size());
    for (std::size_t c = 0; c < size(); ++c)
        for (auto p : nodes_[c].parents) {
            ++indeg[c];
            children[p].push_back(c);
        }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < size(); ++i)
        if (indeg[i] == 0) ready.insert(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto n = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(n);
        for (auto c : children[n])
            if (--indeg[c] == 0) ready.insert(c);
    }
    if (order.size() != size()) {
        std::string names;
        for (std::size_t i = 0; i < size(); ++i)
            if (indeg[i] > 0) names += (names.empty() ? "" : ", ") + nodes_[i].name;
        throw DomainError("network has a cycle through: " + names);
    }
    return order;
}

std::vector<std::pair<std::size_t, std::size_t>> DiscreteBayesNet::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t c = 0; c < size(); ++c)
        for (auto p : nodes_[c].parents) out.emplace_back(p, c);
    return out;
}

std::size_t DiscreteBayesNet::parent_configurations(std::size_t node) const {
    std::size_t n = 1;
    for (auto p : nodes_.at(node).parents) n *= nodes_[p].cardinality();
    return n;
}

std::size_t DiscreteBayesNet::parent_config_index(std::size_t node, std::span<const std::size_t> assignment) const {
    std::size_t idx = 0;
    for (auto p : nodes_.at(node).parents) idx = idx * nodes_[p].cardinality() + assignment[p];
    return idx;
}

double DiscreteBayesNet::probability(std::size_t node, std::span<const std::size_t> assignment) const {
    const auto& n = nodes_.at(node);
    return n.cpt[parent_config_index(node, assignment) * n.cardinality() + assignment[node]];
}

void DiscreteBayesNet::set_cpt(std::size_t node, std::vector<double> cpt) {
    auto& n = nodes_.at(node);
    if (cpt.size() != parent_configurations(node) * n.cardinality())
        throw ConfigError("CPT of '" + n.name + "' has " + std::to_string(cpt.size()) + " entries, expected " +
                          std::to_string(parent_configurations(node) * n.cardinality()));
    n.cpt = std::move(cpt);
}

void DiscreteBayesNet::reset_cpt(std::size_t node) {
    auto& n = nodes_[node];
    n.cpt.assign(parent_configurations(node) * n.cardinality(), 1.0 / static_cast<double>(n.cardinality()));
}

void DiscreteBayesNet::validate() const {
    topological_order();
    for (std::size_t i = 0; i < size(); ++i) {
        const auto& n = nodes_[i];
        if (n.states.empty()) throw DomainError("node '" + n.name + "' has no states");
        const auto k = n.cardinality();
        if (n.cpt.size() != parent_configurations(i) * k) throw DomainError("CPT of '" + n.name + "' has wrong size");
        for (std::size_t r = 0; r < parent_configurations(i); ++r) {
            double sum = 0;
            for (std::size_t s = 0; s < k; ++s) {
                const double v = n.cpt[r * k + s];
                if (!(v >= 0)) throw DomainError("negative CPT entry in '" + n.name + "'");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw DomainError("CPT row " + std::to_string(r) + " of '" + n.name + "' sums to " + std::to_string(sum));
        }
    }
}

nlohmann::json DiscreteBayesNet::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nlohmann::json jn = {{"name", n.name}, {"states", n.states}};
        if (n.continuous()) {
            jn["edges"] = n.edges;
            jn["integer"] = n.integer_valued;
        }
        nlohmann::json parents = nlohmann::json::array();
        for (auto p : n.parents) parents.push_back(nodes_[p].name);
        jn["parents"] = parents;
        nlohmann::json rows = nlohmann::json::array();
        const auto k = n.cardinality();
        for (std::size_t r = 0; r * k < n.cpt.size(); ++r)
            rows.push_back(std::vector<double>(n.cpt.begin() + static_cast<long>(r * k),
                                               n.cpt.begin() + static_cast<long>((r + 1) * k)));
        jn["cpt"] = rows;
        nodes.push_back(std::move(jn));
    }
    return {{"format", "jamguard.bnm"}, {"version", 1}, {"nodes", nodes}};
}

DiscreteBayesNet DiscreteBayesNet::from_json(const nlohmann::json& j) {
    DiscreteBayesNet net;
    try {
        if (j.at("format").get<std::string>() != "jamguard.bnm" || j.at("version").get<int>() != 1)
            throw SchemaError("not a version-1 jamguard network document");
        const auto& nodes = j.at("nodes");
        for (const auto& jn : nodes) {
            const auto name = jn.at("name").get<std::string>();
            if (jn.contains("edges"))
                net.add_binned_node(name, jn.at("edges").get<std::vector<double>>(), jn.value("integer", false));
            else
                net.add_node(name, jn.at("states").get<std::vector<std::string>>());
        }
        for (const auto& jn : nodes)
            for (const auto& p : jn.at("parents")) net.add_edge(p.get<std::string>(), jn.at("name").get<std::string>());
        for (const auto& jn : nodes) {
            const auto idx = net.index_of(jn.at("name").get<std::string>());
            std::vector<double> flat;
            for (const auto& row : jn.at("cpt"))
                for (const auto& v : row) flat.push_back(v.get<double>());
            net.set_cpt(idx, std::move(flat));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("network document: ") + e.what());
    }
    net.validate();
    return net;
}

// ---------------------------------------------------------------------------
// Default network and CPT fitting
// ---------------------------------------------------------------------------

nlohmann::json BnBins::to_json() const { return {{"pusch_snr_db", snr}, {"cqi", cqi}, {"mcs", mcs}}; }

BnBins BnBins::from_json(const nlohmann::json& j) {
    BnBins b;
    for (const auto& [k, v] : j.items()) {
        if (k == "pusch_snr_db") b.snr = v.get<std::vector<double>>();
        else if (k == "cqi") b.cqi = v.get<std::vector<double>>();
        else if (k == "mcs") b.mcs = v.get<std::vector<double>>();
        else throw ConfigError("unknown key 'bnm.bins." + k + "'");
    }
    return b;
}

DiscreteBayesNet build_dag_from_rules(const BnBins& bins) {
    DiscreteBayesNet net;
    net.add_node(kJammingNode, {"absent", "present"});
    net.add_binned_node(kSnrNode, bins.snr);
    net.add_binned_node(kCqiNode, bins.cqi, true);
    net.add_binned_node(kDlMcsNode, bins.mcs, true);
    net.add_binned_node(kUlMcsNode, bins.mcs, true);
    net.add_edge(kJammingNode, kSnrNode);
    net.add_edge(kJammingNode, kCqiNode);
    net.add_edge(kSnrNode, kCqiNode);
    net.add_edge(kCqiNode, kDlMcsNode);
    net.add_edge(kCqiNode, kUlMcsNode);
    net.add_edge(kSnrNode, kUlMcsNode);
    return net;
}

void fit_cpts(DiscreteBayesNet& net, std::span<const std::vector<std::size_t>> assignments, double alpha) {
    if (assignments.empty()) throw ConfigError("fit_cpts: empty dataset");
    if (!(alpha >= 0)) throw ConfigError("fit_cpts: alpha must be >= 0");
    net.topological_order();
    for (const auto& a : assignments) {
        if (a.size() != net.size()) throw ConfigError("fit_cpts: assignment size does not match the network");
        for (std::size_t i = 0; i < net.size(); ++i)
            if (a[i] >= net.node(i).cardinality())
                throw DomainError("fit_cpts: state out of range for '" + net.node(i).name + "'");
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto k = net.node(i).cardinality();
        const auto rows = net.parent_configurations(i);
        std::vector<double> counts(rows * k, 0.0);
        for (const auto& a : assignments) counts[net.parent_config_index(i, a) * k + a[i]] += 1.0;
        std::vector<double> cpt(rows * k);
        for (std::size_t r = 0; r < rows; ++r) {
            double n = 0;
            for (std::size_t s = 0; s < k; ++s) n += counts[r * k + s];
            const double denom = n + alpha * static_cast<double>(k);
            for (std::size_t s = 0; s < k; ++s)
                cpt[r * k + s] = denom > 0 ? (counts[r * k + s] + alpha) / denom : 1.0 / static_cast<double>(k);
        }
        net.set_cpt(i, std::move(cpt));
    }
}

void fit_cpts(DiscreteBayesNet& net, const LabeledDataset& ds, std::span<const std::size_t> rows, Cell cell,
              double alpha) {
    if (rows.empty()) throw ConfigError("fit_cpts: empty dataset");
    std::vector<std::vector<std::size_t>> data;
    data.reserve(rows.size());
    for (auto r : rows) {
        if (r >= ds.size()) throw ConfigError("fit_cpts: row out of range");
        Evidence ev = evidence_from_sample(ds.rows[r].cell(cell));
        ev[kJammingNode] = EvidenceValue::of_state(ds.rows[r].label == Label::H1 ? 1 : 0);
        auto res = resolve_evidence(net, ev);
        std::vector<std::size_t> a(net.size());
        for (std::size_t i = 0; i < net.size(); ++i) {
            if (!res.states[i]) throw ConfigError("fit_cpts: no data for node '" + net.node(i).name + "'");
            a[i] = *res.states[i];
        }
        data.push_back(std::move(a));
    }
    fit_cpts(net, data, alpha);
}

// ---------------------------------------------------------------------------
// Evidence
// ---------------------------------------------------------------------------

Evidence evidence_from_sample(const KpiSample& s) {
    const auto f = s.features();
    return {{kSnrNode, EvidenceValue::of_value(f[kpi::kPuschSnr])},
            {kCqiNode, EvidenceValue::of_value(f[kpi::kCqi])},
            {kDlMcsNode, EvidenceValue::of_value(f[kpi::kDlMcs])},
            {kUlMcsNode, EvidenceValue::of_value(f[kpi::kUlMcs])}};
}

Evidence evidence_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("evidence must be a JSON object");
    Evidence ev;
    for (const auto& [k, v] : j.items()) {
        if (v.is_number()) ev[k] = EvidenceValue::of_value(v.get<double>());
        else if (v.is_object() && v.contains("state")) ev[k] = EvidenceValue::of_state(v.at("state").get<std::size_t>());
        else throw ParseError("evidence '" + k + "' must be a number or {\"state\": index}");
    }
    return ev;
}

ResolvedEvidence resolve_evidence(const DiscreteBayesNet& net, const Evidence& ev) {
    ResolvedEvidence out;
    out.states.resize(net.size());
    for (const auto& [name, value] : ev) {
        const auto i = net.index_of(name);
        const auto& n = net.node(i);
        if (value.state) {
            if (*value.state >= n.cardinality())
                throw DomainError("evidence state " + std::to_string(*value.state) + " out of range for '" + name + "'");
            out.states[i] = value.state;
            continue;
        }
        if (!n.continuous()) {
            const double r = std::round(value.raw);
            if (r != value.raw || r < 0 || r >= static_cast<double>(n.cardinality()))
                throw DomainError("evidence for categorical node '" + name + "' must be a state index");
            out.states[i] = static_cast<std::size_t>(r);
            continue;
        }
        const double v = n.integer_valued ? std::round(value.raw) : value.raw;
        const auto d = discretize(v, n.edges);
        out.states[i] = d.bin;
        if (d.clamped) out.clamped.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variable elimination
// ---------------------------------------------------------------------------

namespace {

struct Factor {
    std::vector<std::size_t> vars;  // last varies fastest
    std::vector<std::size_t> card;
    std::vector<double> values;

    std::size_t position(std::size_t var) const {
        return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), var) - vars.begin());
    }
};

Factor multiply(const Factor& a, const Factor& b) {
    Factor out;
    out.vars = a.vars;
    out.card = a.card;
    for (std::size_t i = 0; i < b.vars.size(); ++i)
        if (a.position(b.vars[i]) == a.vars.size()) {
            out.vars.push_back(b.vars[i]);
            out.card.push_back(b.card[i]);
        }
    std::size_t total = 1;
    for (auto c : out.card) total *= c;
    out.values.resize(total);
    // stride of each output variable inside a and b (0 if absent)
    auto strides_in = [&](const Factor& f) {
        std::vector<std::size_t> fs(f.vars.size());
        std::size_t s = 1;
        for (std::size_t i = f.vars.size(); i-- > 0;) {
            fs[i] = s;
            s *= f.card[i];
        }
        std::vector<std::size_t> st(out.vars.size(), 0);
        for (std::size_t i = 0; i < out.vars.size(); ++i) {
            auto p = f.position(out.vars[i]);
            if (p < f.vars.size()) st[i] = fs[p];
        }
        return st;
    };
    const auto sa = strides_in(a), sb = strides_in(b);
    std::vector<std::size_t> idx(out.vars.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        out.values[flat] = a.values[ia] * b.values[ib];
        for (std::size_t d = out.vars.size(); d-- > 0;) {
            if (++idx[d] < out.card[d]) {
                ia += sa[d];
                ib += sb[d];
                break;
            }
            idx[d] = 0;
            ia -= sa[d] * (out.card[d] - 1);
            ib -= sb[d] * (out.card[d] - 1);
        }
    }
    return out;
}

Factor sum_out(const Factor& f, std::size_t var) {
    const auto p = f.position(var);
    std::size_t inner = 1;
    for (std::size_t i = p + 1; i < f.vars.size(); ++i) inner *= f.card[i];
    const std::size_t k = f.card[p];
    const std::size_t outer = f.values.size() / (inner * k);
    Factor out;
    out.vars = f.vars;
    out.card = f.card;
    out.vars.erase(out.vars.begin() + static_cast<long>(p));
    out.card.erase(out.card.begin() + static_cast<long>(p));
    out.values.assign(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t s = 0; s < k; ++s)
            for (std::size_t i = 0; i < inner; ++i) out.values[o * inner + i] += f.values[(o * k + s) * inner + i];
    return out;
}

Factor restrict_to(const Factor& f, std::size_t var, std::size_t state) {
    const auto p = f.position(var);
    std::size_t inner = 1;
    for (std::size_t i = p + 1; i < f.vars.size(); ++i) inner *= f.card[i];
    const std::size_t k = f.card[p];
    const std::size_t outer = f.values.size() / (inner * k);
    Factor out;
    out.vars = f.vars;
    out.card = f.card;
    out.vars.erase(out.vars.begin() + static_cast<long>(p));
    out.card.erase(out.card.begin() + static_cast<long>(p));
    out.values.resize(outer * inner);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) out.values[o * inner + i] = f.values[(o * k + state) * inner + i];
    return out;
}

Factor cpt_factor(const DiscreteBayesNet& net, std::size_t node) {
    const auto& n = net.node(node);
    Factor f;
    for (auto p : n.parents) {
        f.vars.push_back(p);
        f.card.push_back(net.node(p).cardinality());
    }
    f.vars.push_back(node);
    f.card.push_back(n.cardinality());
    f.values = n.cpt;
    return f;
}

std::size_t pick_min_degree(const std::vector<Factor>& factors, const std::set<std::size_t>& hidden) {
    std::size_t best = *hidden.begin();
    std::size_t best_degree = static_cast<std::size_t>(-1);
    for (auto v : hidden) {
        std::set<std::size_t> nb;
        for (const auto& f : factors)
            if (f.position(v) < f.vars.size()) nb.insert(f.vars.begin(), f.vars.end());
        const std::size_t degree = nb.empty() ? 0 : nb.size() - 1;
        if (degree < best_degree) {
            best_degree = degree;
            best = v;
        }
    }
    return best;
}

void eliminate(std::vector<Factor>& factors, std::size_t var) {
    std::vector<Factor> keep;
    std::optional<Factor> prod;
    for (auto& f : factors) {
        if (f.position(var) < f.vars.size()) prod = prod ? multiply(*prod, f) : std::move(f);
        else keep.push_back(std::move(f));
    }
    if (prod) keep.push_back(sum_out(*prod, var));
    factors = std::move(keep);
}

}  // namespace

std::vector<double> posterior(const DiscreteBayesNet& net, std::size_t query, const ResolvedEvidence& ev,
                              std::span<const std::size_t> order) {
    if (query >= net.size()) throw ConfigError("posterior: query node out of range");
    if (ev.states.size() != net.size()) throw ConfigError("posterior: evidence does not match the network");
    if (ev.states[query]) throw ConfigError("posterior: query node '" + net.node(query).name + "' is observed");

    std::vector<Factor> factors;
    factors.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        Factor f = cpt_factor(net, i);
        for (std::size_t v = 0; v < net.size(); ++v)
            if (ev.states[v] && f.position(v) < f.vars.size()) f = restrict_to(f, v, *ev.states[v]);
        factors.push_back(std::move(f));
    }

    std::set<std::size_t> hidden;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (i != query && !ev.states[i]) hidden.insert(i);
    if (!order.empty()) {
        std::set<std::size_t> given(order.begin(), order.end());
        if (given != hidden || given.size() != order.size())
            throw ConfigError("posterior: elimination order must list each hidden variable once");
        for (auto v : order) eliminate(factors, v);
    } else {
        while (!hidden.empty()) {
            const auto v = pick_min_degree(factors, hidden);
            hidden.erase(v);
            eliminate(factors, v);
        }
    }

    Factor result;
    result.values = {1.0};
    for (const auto& f : factors) result = multiply(result, f);
    // result may still carry no variables at all if the query has no factors (impossible) or only the query
    std::vector<double> dist(net.node(query).cardinality(), 0.0);
    if (result.vars.size() != 1 || result.vars[0] != query) throw Error("posterior: internal elimination error");
    const double z = std::accumulate(result.values.begin(), result.values.end(), 0.0);
    if (!(z > 0)) {
        std::string desc;
        for (std::size_t v = 0; v < net.size(); ++v)
            if (ev.states[v])
                desc += (desc.empty() ? "" : ", ") + net.node(v).name + "=" + net.node(v).states[*ev.states[v]];
        throw DomainError("evidence has zero probability: " + desc);
    }
    for (std::size_t s = 0; s < dist.size(); ++s) dist[s] = result.values[s] / z;
    return dist;
}

std::vector<double> posterior(const DiscreteBayesNet& net, std::string_view query, const Evidence& ev) {
    return posterior(net, net.index_of(query), resolve_evidence(net, ev));
}

double jamming_posterior(const DiscreteBayesNet& net, const Evidence& ev) {
    return posterior(net, kJammingNode, ev).at(1);
}

std::string bn_summary_table(const DiscreteBayesNet& net) {
    std::ostringstream out;
    out << "| Node | State | Probability (%) |\n|---|---|---:|\n";
    const ResolvedEvidence none{std::vector<std::optional<std::size_t>>(net.size()), {}};
    for (auto i : net.topological_order()) {
        const auto dist = posterior(net, i, none);
        for (std::size_t s = 0; s < dist.size(); ++s) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", 100.0 * dist[s]);
            out << "| " << (s == 0 ? net.node(i).name : "") << " | " << net.node(i).states[s] << " | " << buf << " |\n";
        }
    }
    return out.str();
}

}  // namespace jamguard
