#include "avmodel/properties/checks.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace avm::properties {

using kernel::LabelId;
using kernel::StateId;
using kernel::Value;

const char* to_string(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::pass: return "pass";
        case Verdict::Kind::fail: return "fail";
        case Verdict::Kind::fail_lasso: return "fail_lasso";
    }
    return "?";
}

std::string verdict_json(const Verdict& v) {
    auto labels = [](const std::vector<Action>& trace) {
        auto arr = nlohmann::json::array();
        for (const auto& a : trace) arr.push_back(a.to_string());
        return arr;
    };
    nlohmann::json j;
    j["property"] = v.property;
    j["verdict"] = to_string(v.kind);
    j["counterexample"] = labels(v.counterexample);
    j["cycle"] = labels(v.cycle);
    return j.dump(2);
}

const std::set<std::string>& default_terminal_gates() {
    static const std::set<std::string> gates{"ARRIVAL", "COLLISION", "END_OBSTACLE"};
    return gates;
}

namespace {

// Explicit product graph: nodes in BFS discovery order, each remembering the
// node and label it was first reached from.
struct Product {
    static constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<StateId> state;
    std::vector<std::size_t> parent;
    std::vector<LabelId> via;
    std::vector<std::size_t> offsets{0};
    std::vector<std::pair<std::size_t, LabelId>> edges;

    std::vector<Action> trace_to(const Lts& lts, std::size_t node) const {
        std::vector<Action> out;
        for (; parent[node] != none; node = parent[node]) out.push_back(lts.label(via[node]));
        std::reverse(out.begin(), out.end());
        return out;
    }
};

/// BFS over (Lts state, tag) pairs. `next` maps (tag, label) to the
/// successor tag or nullopt when the product edge is cut.
template <typename Tag, typename Hash, typename Next>
Product build_product(const Lts& lts, Tag initial, Next next, std::vector<Tag>* tags = nullptr) {
    struct Key {
        StateId s;
        Tag t;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const { return Hash{}(k.t) * 1000003u ^ k.s; }
    };
    kernel::Adjacency adj(lts);
    Product p;
    std::vector<Tag> tag;
    std::unordered_map<Key, std::size_t, KeyHash> index;
    auto add = [&](StateId s, const Tag& t, std::size_t parent, LabelId via) {
        auto [it, fresh] = index.try_emplace(Key{s, t}, p.state.size());
        if (fresh) {
            p.state.push_back(s);
            tag.push_back(t);
            p.parent.push_back(parent);
            p.via.push_back(via);
        }
        return it->second;
    };
    add(lts.initial(), initial, Product::none, 0);
    for (std::size_t n = 0; n < p.state.size(); ++n) {
        for (const auto& t : adj.out(p.state[n])) {
            auto nt = next(Tag(tag[n]), t.label);
            if (!nt) continue;
            auto m = add(t.dst, *nt, n, t.label);
            p.edges.emplace_back(m, t.label);
        }
        p.offsets.push_back(p.edges.size());
    }
    if (tags) *tags = std::move(tag);
    return p;
}

// Consistent-moves observer state.
struct MonitorTag {
    enum : std::uint8_t { start, current, moved, violation } kind = start;
    LabelId update = 0;  // label of the last UPDATE_POSITION
    LabelId move = 0;    // label of the CAR_MOVE after it
    bool operator==(const MonitorTag&) const = default;
};

struct MonitorHash {
    std::size_t operator()(const MonitorTag& m) const {
        return (static_cast<std::size_t>(m.kind) * 7919u + m.update) * 104729u + m.move;
    }
};

}  // namespace

Verdict check_consistent_updates(const Lts& lts, const ConsistencyTable& table) {
    enum Role : std::uint8_t { other, update, move };
    std::vector<Role> role(lts.labels().size(), other);
    bool any_update = false;
    for (LabelId l = 0; l < lts.labels().size(); ++l) {
        const auto& a = lts.label(l);
        if (a.gate == "UPDATE_POSITION") {
            if (a.offers.size() != 1 || !a.offers[0].is(Value::Kind::symbol))
                throw LabelSchemaError("UPDATE_POSITION expects one street offer: " + a.to_string());
            role[l] = update;
            any_update = true;
        } else if (a.gate == "CAR_MOVE") {
            if (a.offers.size() != 1) throw LabelSchemaError("CAR_MOVE expects one control offer: " + a.to_string());
            role[l] = move;
        }
    }
    if (!any_update && lts.num_transitions() > 0) throw LabelSchemaError("no UPDATE_POSITION gate in the Lts");

    auto street = [&](LabelId l) -> const std::string& { return lts.label(l).offers[0].name(); };
    std::optional<std::size_t> bad;
    auto next = [&](MonitorTag m, LabelId l) -> std::optional<MonitorTag> {
        if (m.kind == MonitorTag::violation) return std::nullopt;
        switch (role[l]) {
            case update:
                if (m.kind == MonitorTag::moved && !table(street(m.update), lts.label(m.move).offers[0], street(l)))
                    return MonitorTag{MonitorTag::violation, 0, 0};
                return MonitorTag{MonitorTag::current, l, 0};
            case move:
                if (m.kind == MonitorTag::current) return MonitorTag{MonitorTag::moved, m.update, l};
                return MonitorTag{};
            default:
                return m;
        }
    };
    std::vector<MonitorTag> tags;
    auto p = build_product<MonitorTag, MonitorHash>(lts, MonitorTag{}, next, &tags);
    Verdict v{"consistent-moves", Verdict::Kind::pass, {}, {}};
    for (std::size_t n = 0; n < tags.size() && !bad; ++n)
        if (tags[n].kind == MonitorTag::violation) bad = n;
    if (bad) {
        v.kind = Verdict::Kind::fail;
        v.counterexample = p.trace_to(lts, *bad);
    }
    return v;
}

Verdict check_consistent_updates(const Lts& lts, const control::GraphMap& map) {
    return check_consistent_updates(lts, [&map](const std::string& cur, const Value& ctl, const std::string& next) {
        return control::consistent_move(map, cur, ctl, next);
    });
}

namespace {

// Counts END_OBSTACLE along a path; reports whether a label terminates.
struct TerminalRule {
    const Lts& lts;
    const std::set<std::string>& gates;
    std::size_t num_obstacles;

    std::pair<bool, std::size_t> apply(LabelId l, std::size_t count) const {
        const auto& g = lts.label(l).gate;
        if (!gates.count(g)) return {false, count};
        if (g == "END_OBSTACLE") return {count + 1 >= num_obstacles, std::min(count + 1, num_obstacles)};
        return {true, count};
    }
};

// Iterative Tarjan; returns the SCC index of every node and whether each
// SCC contains a cycle.
std::pair<std::vector<std::size_t>, std::vector<bool>> cyclic_components(const Product& p) {
    const std::size_t n = p.state.size(), unset = Product::none;
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<bool> cyclic, on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
    std::size_t counter = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        call.emplace_back(root, p.offsets[root]);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, e] = call.back();
            if (e < p.offsets[v + 1]) {
                auto w = p.edges[e++].first;
                if (index[w] == unset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, p.offsets[w]);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            auto node = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[node]);
            if (low[node] != index[node]) continue;
            std::size_t id = cyclic.size(), size = 0;
            for (;;) {
                auto w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = id;
                ++size;
                if (w == node) break;
            }
            bool loop = size > 1;
            for (auto e2 = p.offsets[node]; !loop && e2 < p.offsets[node + 1]; ++e2) loop = p.edges[e2].first == node;
            cyclic.push_back(loop);
        }
    }
    return {comp, cyclic};
}

}  // namespace

Verdict check_inevitable_termination(const Lts& lts, std::size_t num_obstacles,
                                     const std::set<std::string>& terminal_gates) {
    TerminalRule rule{lts, terminal_gates, num_obstacles};
    auto next = [&](std::size_t count, LabelId l) -> std::optional<std::size_t> {
        auto [terminal, c] = rule.apply(l, count);
        if (terminal) return std::nullopt;
        return c;
    };
    auto p = build_product<std::size_t, std::hash<std::size_t>>(lts, std::size_t{0}, next);
    Verdict v{"inevitable-termination", Verdict::Kind::pass, {}, {}};

    auto [comp, cyclic] = cyclic_components(p);
    for (std::size_t n = 0; n < p.state.size(); ++n) {
        if (!cyclic[comp[n]]) continue;
        v.kind = Verdict::Kind::fail_lasso;
        v.counterexample = p.trace_to(lts, n);
        // Shortest way around the cycle, staying inside the component.
        std::vector<std::size_t> from(p.state.size(), Product::none);
        std::vector<LabelId> label(p.state.size(), 0);
        std::deque<std::size_t> queue{n};
        bool closed = false;
        while (!queue.empty() && !closed) {
            auto u = queue.front();
            queue.pop_front();
            for (auto e = p.offsets[u]; e < p.offsets[u + 1]; ++e) {
                auto [w, l] = p.edges[e];
                if (comp[w] != comp[n] || from[w] != Product::none) continue;
                from[w] = u;
                label[w] = l;
                if (w == n) {
                    closed = true;
                    break;
                }
                queue.push_back(w);
            }
        }
        for (auto u = n;;) {
            v.cycle.push_back(lts.label(label[u]));
            u = from[u];
            if (u == n) break;
        }
        std::reverse(v.cycle.begin(), v.cycle.end());
        return v;
    }

    kernel::Adjacency adj(lts);
    for (std::size_t n = 0; n < p.state.size(); ++n)
        if (adj.out(p.state[n]).empty()) {
            v.kind = Verdict::Kind::fail;
            v.counterexample = p.trace_to(lts, n);
            return v;
        }
    return v;
}

Verdict check_deadlock_freedom(const Lts& lts, std::size_t num_obstacles,
                               const std::set<std::string>& allowed_terminal_gates) {
    TerminalRule rule{lts, allowed_terminal_gates, num_obstacles};
    // Tag: END_OBSTACLE count * 2 + (entered by a terminal action).
    auto next = [&](std::size_t tag, LabelId l) -> std::optional<std::size_t> {
        auto [terminal, c] = rule.apply(l, tag / 2);
        return c * 2 + (terminal ? 1 : 0);
    };
    std::vector<std::size_t> tags;
    auto p = build_product<std::size_t, std::hash<std::size_t>>(lts, std::size_t{0}, next, &tags);

    kernel::Adjacency adj(lts);
    Verdict v{"deadlock", Verdict::Kind::pass, {}, {}};
    for (std::size_t n = 0; n < p.state.size(); ++n)
        if (tags[n] % 2 == 0 && adj.out(p.state[n]).empty()) {
            v.kind = Verdict::Kind::fail;
            v.counterexample = p.trace_to(lts, n);
            return v;
        }
    return v;
}

}  // namespace avm::properties
