#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "avmodel/kernel/value.hpp"

namespace avm::control {

using kernel::Value;

struct Edge {
    std::uint32_t src = 0;
    std::string street;
    std::uint32_t dst = 0;
};

struct Successor {
    std::string street;
    std::uint32_t dst = 0;
};

/// Directed street graph: edges are streets, vertices are crossroads.
class GraphMap {
public:
    GraphMap() = default;
    /// Throws std::invalid_argument on duplicate streets or unknown vertices.
    GraphMap(std::vector<std::uint32_t> vertices, std::vector<Edge> edges);

    const std::vector<std::uint32_t>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool has_street(const std::string& street) const { return index_.count(street) != 0; }
    const Edge& edge(const std::string& street) const;

    /// Outgoing edges of the street's head vertex, in declaration order.
    const std::vector<Successor>& successors(const std::string& street) const;

private:
    std::vector<std::uint32_t> vertices_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<Successor>> out_;  // by vertex position in vertices_
    std::unordered_map<std::uint32_t, std::size_t> vertex_pos_;
};

// Car controls and obstacle operations share the value encoding:
// `turned_n(k)` is a record, `brakes`, `random`, `leave` are symbols.
Value turned_n(std::uint64_t k);
Value brakes();
Value random_op();
Value leave();
bool is_turn(const Value& v);

std::vector<Successor> successors(const GraphMap& map, const std::string& street);

bool consistent_move(const GraphMap& map, const std::string& current, const Value& control,
                     const std::string& next);

struct Itinerary {
    std::vector<Value> controls;
    bool arrived = false;
    bool no_path = false;
};

/// Fewest-controls route avoiding `blocked`, ties broken by the smallest
/// successor index at the first divergence. The starting street itself is
/// never considered blocked.
Itinerary compute_itinerary(const GraphMap& map, const std::string& from, const std::string& to,
                            const std::set<std::string>& blocked);

/// `leave` followed by every `turned_n(k)` with k below the out-degree.
std::vector<Value> expand_random(const GraphMap& map, const std::string& position);

/// The nine-crossroad, 22-street map used by the reference configuration.
GraphMap reference_map();

}  // namespace avm::control
