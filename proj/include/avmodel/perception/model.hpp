#pragma once

#include <vector>

#include "avmodel/kernel/composition.hpp"
#include "avmodel/perception/grid.hpp"

namespace avm::perception {

using kernel::Value;

struct CarSpec {
    Pos start;
    unsigned speed = 1;
    bool cyclic = false;
    std::vector<Direction> moves;
};

struct GridScenario {
    int width = 10;
    int height = 10;
    std::vector<ObstacleRec> statics;
    std::vector<ObstacleRec> mobiles;  // kinds must be unique; they name the actor in labels
    CarSpec car;
    unsigned dist_min = 2;
};

/// Throws std::invalid_argument describing the first broken invariant,
/// including overlaps of initial placements.
void validate(const GridScenario& scn);

/// Statics, then mobiles in declaration order (owner index = statics.size() + i),
/// then the car.
GridMap initiate_map(const GridScenario& scn);

/// Ground truth with the mobiles at `anchors` and the car at `car`.
GridMap world_map(const GridScenario& scn, Pos car, const std::vector<Pos>& anchors);

/// Four corner buildings, Other_Car driving up, a transparent Pedestrian
/// crossing to the right, the ego car waiting then driving up.
GridScenario crossroad_scenario();

Value position_value(Pos p);
Pos to_pos(const Value& v);
Value direction_value(Direction d);
/// `Grid(row0,...,row4)` with each row a five-letter symbol.
Value grid_value(const PerceptionGrid& g);

/// Labels:
///   GRID_UPDATE !kind !{valid dirs}      OBSTACLE_POSITION !kind !prev !next !dir !requested
///   END_OBSTACLE !kind                   GRID_CAR !car
///   LIDAR_MAP [!Grid(...)]               CAR_POSITION !prev !next
///   TICK   ARRIVAL   COLLISION !kind
kernel::Composition build_grid_composition(const GridScenario& scn, bool expose_grid);

}  // namespace avm::perception
