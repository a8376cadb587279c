#pragma once

#include <string>
#include <vector>

#include "avmodel/control/graph_map.hpp"
#include "avmodel/kernel/composition.hpp"

namespace avm::control {

struct ObstacleSpec {
    std::string id;  // symbol used in OBSTACLE_MOVE / END_OBSTACLE offers
    std::string initial_street;
    std::vector<Value> moves;  // random | turned_n(k) | leave
};

struct ControlScenario {
    GraphMap map;
    std::string car_position;
    std::string destination;
    std::vector<ObstacleSpec> obstacles;
};

/// Throws std::invalid_argument describing the first broken invariant.
void validate(const ControlScenario& scn);

/// Reference map, car from Coronation_Street to Mosley_Street, and two
/// obstacles with one `random` move each.
ControlScenario reference_scenario();

/// `Radar({s1,...})` with streets in canonical order.
Value radar_grid(std::set<std::string> streets);

kernel::Composition build_control_composition(const ControlScenario& scn);

}  // namespace avm::control
