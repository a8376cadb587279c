#include "avmodel/control/graph_map.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace avm::control {

GraphMap::GraphMap(std::vector<std::uint32_t> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (!vertex_pos_.emplace(vertices_[i], i).second)
            throw std::invalid_argument("duplicate vertex " + std::to_string(vertices_[i]));
    out_.resize(vertices_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        if (!index_.emplace(e.street, i).second) throw std::invalid_argument("duplicate street " + e.street);
        auto s = vertex_pos_.find(e.src);
        if (s == vertex_pos_.end() || !vertex_pos_.count(e.dst))
            throw std::invalid_argument("street " + e.street + " uses an undeclared vertex");
        out_[s->second].push_back({e.street, e.dst});
    }
}

const Edge& GraphMap::edge(const std::string& street) const {
    auto it = index_.find(street);
    if (it == index_.end()) throw std::invalid_argument("unknown street " + street);
    return edges_[it->second];
}

const std::vector<Successor>& GraphMap::successors(const std::string& street) const {
    return out_[vertex_pos_.at(edge(street).dst)];
}

Value turned_n(std::uint64_t k) { return Value::record("turned_n", {Value::nat(k)}); }
Value brakes() { return Value::symbol("brakes"); }
Value random_op() { return Value::symbol("random"); }
Value leave() { return Value::symbol("leave"); }

bool is_turn(const Value& v) {
    return v.is(Value::Kind::record) && v.name() == "turned_n" && v.items().size() == 1 &&
           v.items()[0].is(Value::Kind::nat);
}

std::vector<Successor> successors(const GraphMap& map, const std::string& street) {
    return map.successors(street);
}

bool consistent_move(const GraphMap& map, const std::string& current, const Value& control,
                     const std::string& next) {
    if (!map.has_street(current)) return false;
    if (control == brakes()) return next == current;
    if (!is_turn(control)) return false;
    const auto& succ = map.successors(current);
    auto k = control.items()[0].as_nat();
    return k < succ.size() && succ[k].street == next;
}

Itinerary compute_itinerary(const GraphMap& map, const std::string& from, const std::string& to,
                            const std::set<std::string>& blocked) {
    map.edge(from);
    map.edge(to);
    Itinerary out;
    if (from == to) {
        out.arrived = true;
        return out;
    }
    // BFS in successor order: the first parent found for a street lies on
    // the lexicographically smallest shortest route.
    struct Visit {
        std::string parent;
        std::uint64_t index;
    };
    std::unordered_map<std::string, Visit> seen{{from, {"", 0}}};
    std::deque<std::string> queue{from};
    while (!queue.empty() && !seen.count(to)) {
        auto cur = queue.front();
        queue.pop_front();
        const auto& succ = map.successors(cur);
        for (std::size_t k = 0; k < succ.size(); ++k) {
            const auto& next = succ[k].street;
            if (blocked.count(next) || seen.count(next)) continue;
            seen.emplace(next, Visit{cur, k});
            queue.push_back(next);
        }
    }
    if (!seen.count(to)) {
        out.no_path = true;
        return out;
    }
    for (auto s = to; s != from; s = seen.at(s).parent) out.controls.push_back(turned_n(seen.at(s).index));
    std::reverse(out.controls.begin(), out.controls.end());
    return out;
}

std::vector<Value> expand_random(const GraphMap& map, const std::string& position) {
    std::vector<Value> ops{leave()};
    for (std::size_t k = 0; k < map.successors(position).size(); ++k) ops.push_back(turned_n(k));
    return ops;
}

GraphMap reference_map() {
    return GraphMap({0, 1, 2, 3, 4, 5, 6, 7, 8}, {
                                                     {0, "Coronation_Street", 1},
                                                     {0, "Corporation_Street", 3},
                                                     {1, "Coronation_Street_bis", 0},
                                                     {1, "Deansgate", 2},
                                                     {2, "Deansgate_bis", 1},
                                                     {1, "Market_Street", 4},
                                                     {4, "Market_Street_bis", 1},
                                                     {2, "Oxford_Road", 5},
                                                     {5, "Oxford_Road_bis", 2},
                                                     {3, "Portland_Street", 4},
                                                     {4, "Portland_Street_bis", 3},
                                                     {4, "Quay_Street", 5},
                                                     {5, "Quay_Street_bis", 4},
                                                     {3, "Whitworth_Street", 6},
                                                     {6, "Whitworth_Street_bis", 3},
                                                     {4, "Peter_Street", 7},
                                                     {7, "Peter_Street_bis", 4},
                                                     {5, "King_Street", 8},
                                                     {6, "Cross_Street", 7},
                                                     {7, "Cross_Street_bis", 6},
                                                     {7, "Mosley_Street", 8},
                                                     {8, "Mosley_Street_bis", 7},
                                                 });
}

}  // namespace avm::control
