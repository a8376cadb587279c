#include "doctest.h"

#include <deque>
#include <functional>
#include <map>
#include <stdexcept>

#include "avmodel/kernel/bisimulation.hpp"
#include "avmodel/kernel/explore.hpp"
#include "avmodel/perception/model.hpp"
#include "perception_oracle.hpp"

using namespace avm;
using namespace avm::perception;
using kernel::Action;
using kernel::Lts;

using perception_oracle::has_label;
using perception_oracle::round_structure_holds;

namespace {

// Ground truth rebuilt from labels alone.
struct Truth {
    Pos car;
    std::vector<Pos> anchors;
    std::optional<PerceptionGrid> last_grid;
    bool seen_grid = false;
    friend bool operator==(const Truth& a, const Truth& b) { return a.car == b.car && a.anchors == b.anchors; }
};

// Owner kind of a cell, read straight from the scenario rectangles.
const ObstacleRec* occupant(const GridScenario& scn, const Truth& t, Pos p) {
    auto inside = [&](const ObstacleRec& o, Pos a) {
        return p.x >= a.x && p.x < a.x + o.w && p.y >= a.y && p.y < a.y + o.h;
    };
    for (const auto& o : scn.statics)
        if (inside(o, o.anchor)) return &o;
    for (std::size_t i = 0; i < scn.mobiles.size(); ++i)
        if (inside(scn.mobiles[i], t.anchors[i])) return &scn.mobiles[i];
    return nullptr;
}

std::size_t mobile_index(const GridScenario& scn, const std::string& kind) {
    for (std::size_t i = 0; i < scn.mobiles.size(); ++i)
        if (scn.mobiles[i].kind == kind) return i;
    throw std::logic_error("unknown kind " + kind);
}

using Visitor = std::function<void(const Truth& before, const Action& a, const Truth& after)>;

// Walks every reachable state once, carrying the label-derived ground truth.
void scan(const Lts& lts, const GridScenario& scn, const Visitor& visit) {
    kernel::Adjacency adj(lts);
    std::vector<std::optional<Truth>> at(lts.num_states());
    Truth init{scn.car.start, {}, {}, false};
    for (const auto& o : scn.mobiles) init.anchors.push_back(o.anchor);
    at[lts.initial()] = init;
    std::deque<kernel::StateId> todo{lts.initial()};
    while (!todo.empty()) {
        auto s = todo.front();
        todo.pop_front();
        for (const auto& t : adj.out(s)) {
            const auto& a = lts.label(t.label);
            Truth next = *at[s];
            if (a.gate == "OBSTACLE_POSITION") {
                next.anchors[mobile_index(scn, a.offers[0].name())] = to_pos(a.offers[2]);
            } else if (a.gate == "CAR_POSITION") {
                next.car = to_pos(a.offers[1]);
            } else if (a.gate == "LIDAR_MAP" && !a.offers.empty()) {
                PerceptionGrid g;
                g.anchor = next.car;
                for (int r = 0; r < 5; ++r)
                    for (int c = 0; c < 5; ++c)
                        g.cells[static_cast<std::size_t>(r * 5 + c)] =
                            a.offers[0].items()[static_cast<std::size_t>(r)].name()[static_cast<std::size_t>(c)];
                next.last_grid = g;
                next.seen_grid = true;
            }
            visit(*at[s], a, next);
            if (!at[t.dst]) {
                at[t.dst] = next;
                todo.push_back(t.dst);
            } else {
                CHECK(at[t.dst]->car == next.car);
                CHECK(at[t.dst]->anchors == next.anchors);
            }
        }
    }
}

GridScenario open_map() {
    GridScenario scn;
    scn.car = {.start = {5, 5}, .moves = {Direction::none}};
    return scn;
}

}  // namespace

TEST_CASE("scenario validation and initial map") {
    auto scn = crossroad_scenario();
    auto m = initiate_map(scn);
    const auto& c = m.at({6, 7});
    REQUIRE(c.kind == GridMap::CellKind::occupied);
    CHECK(m.obstacles()[static_cast<std::size_t>(c.owner)].kind == "Other_Car");
    CHECK(m.obstacles()[static_cast<std::size_t>(c.owner)].speed == 1);
    CHECK(m.at(scn.car.start).kind == GridMap::CellKind::car_pos);

    auto empty = open_map();
    auto em = initiate_map(empty);
    int free_cells = 0;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) free_cells += em.at({x, y}).kind == GridMap::CellKind::free;
    CHECK(free_cells == 99);

    auto dup = crossroad_scenario();
    dup.mobiles[1].kind = "Other_Car";
    dup.mobiles[1].anchor = {4, 4};
    CHECK_THROWS_AS(validate(dup), std::invalid_argument);

    auto clash = crossroad_scenario();
    clash.mobiles[1].anchor = {6, 7};
    try {
        validate(clash);
        FAIL("overlap accepted");
    } catch (const std::invalid_argument& e) {
        std::string what = e.what();
        CHECK(what.find("Pedestrian") != std::string::npos);
        CHECK(what.find("Other_Car") != std::string::npos);
    }

    auto on_building = crossroad_scenario();
    on_building.car.start = {1, 1};
    CHECK_THROWS_AS(validate(on_building), std::invalid_argument);

    auto moving_static = crossroad_scenario();
    moving_static.statics[0].speed = 1;
    CHECK_THROWS_AS(validate(moving_static), std::invalid_argument);
}

TEST_CASE("crossroad scenario explores with both outcomes") {
    auto scn = crossroad_scenario();
    auto lts = kernel::explore(build_grid_composition(scn, false));
    CHECK(lts.num_states() >= 1000);
    CHECK(lts.num_states() <= 1000000);
    CHECK(has_label(lts, "COLLISION !Pedestrian"));
    CHECK(has_label(lts, "ARRIVAL"));
    std::string why;
    CHECK_MESSAGE(round_structure_holds(lts, scn, &why), why);
    auto small = kernel::minimize(lts);
    CHECK(small.num_states() <= lts.num_states());
    CHECK(small.num_transitions() <= lts.num_transitions());

    // Every sink is reached by a terminal action.
    kernel::Adjacency rev(lts, true);
    for (auto d : kernel::detect_deadlocks(lts))
        for (const auto& t : rev.out(d)) {
            const auto& g = lts.label(t.label).gate;
            CHECK((g == "ARRIVAL" || g == "COLLISION"));
        }
}

TEST_CASE("ground truth, perception and restriction invariants") {
    auto run = [](const GridScenario& scn) {
        auto lts = kernel::explore(build_grid_composition(scn, true));
        std::size_t grids = 0, random_moves = 0;
        scan(lts, scn, [&](const Truth& before, const Action& a, const Truth& after) {
            if (a.gate == "OBSTACLE_POSITION") {
                auto i = mobile_index(scn, a.offers[0].name());
                const auto& o = scn.mobiles[i];
                CHECK(to_pos(a.offers[1]) == before.anchors[i]);
                // The rectangle lands on the map, away from the car and other actors.
                for (int y = 0; y < o.h; ++y)
                    for (int x = 0; x < o.w; ++x) {
                        Pos p{after.anchors[i].x + x, after.anchors[i].y + y};
                        CHECK(p.x < scn.width);
                        CHECK(p.y < scn.height);
                        CHECK(p != after.car);
                        CHECK(occupant(scn, after, p) == &o);
                    }
                if (a.offers[4].name() == "random") {
                    ++random_moves;
                    auto d0 = manhattan(before.car, before.anchors[i]);
                    auto d1 = manhattan(before.car, after.anchors[i]);
                    if (d0 > scn.dist_min && d1 >= d0) {
                        // Only when no free cell brings it closer.
                        CHECK(a.offers[3].name() == "none");
                        auto world = world_map(scn, before.car, before.anchors);
                        for (auto d : kAxisMoves)
                            CHECK_FALSE((valid_move(world, static_cast<int>(scn.statics.size() + i), d, o.speed) &&
                                         move_allowed(before.car, before.anchors[i], d, o.speed, scn.dist_min)));
                    }
                } else if (a.offers[3].name() != a.offers[4].name()) {
                    CHECK(a.offers[3].name() == "none");
                }
            } else if (a.gate == "LIDAR_MAP") {
                ++grids;
                auto world = world_map(scn, before.car, before.anchors);
                auto expect = compute_perception(world, before.last_grid ? &*before.last_grid : nullptr, before.car);
                CHECK(after.last_grid->cells == expect.cells);
                if (!before.seen_grid)
                    for (char c : expect.cells) CHECK((c != 'M' && c != 'N'));
            } else if (a.gate == "COLLISION") {
                auto* hit = occupant(scn, before, before.car);
                REQUIRE(hit);
                CHECK(a.offers[0].name() == hit->kind);
            } else if (a.gate == "TICK" || a.gate == "ARRIVAL") {
                CHECK(occupant(scn, before, before.car) == nullptr);
            }
        });
        CHECK(grids > 0);
        return random_moves;
    };
    CHECK(run(crossroad_scenario()) > 0);

    // A far random walker on an open map, always able to close in.
    auto far = open_map();
    far.dist_min = 1;
    far.car = {.start = {9, 5}, .moves = {Direction::none, Direction::none, Direction::none}};
    far.mobiles.push_back({.kind = "Dog", .anchor = {0, 5}, .speed = 1, .transparent = true,
                           .moves = {Direction::random, Direction::random, Direction::random}});
    CHECK(run(far) > 0);
}

TEST_CASE("static-only scenario ends in ARRIVAL after full rounds") {
    auto scn = crossroad_scenario();
    scn.mobiles.clear();
    for (std::size_t moves : {1u, 3u}) {
        scn.car.moves.assign(moves, Direction::up);
        auto lts = kernel::explore(build_grid_composition(scn, false));
        CHECK(round_structure_holds(lts, scn));
        // Enumerate every maximal path; the model is acyclic here.
        kernel::Adjacency adj(lts);
        std::size_t paths = 0;
        std::function<void(kernel::StateId, std::vector<std::string>)> dfs = [&](kernel::StateId s,
                                                                                 std::vector<std::string> trace) {
            if (adj.out(s).empty()) {
                ++paths;
                std::vector<std::string> expect;
                for (std::size_t i = 0; i < moves; ++i) {
                    expect.push_back("CAR_POSITION");
                    expect.push_back(i + 1 < moves ? "TICK" : "ARRIVAL");
                }
                CHECK(trace == expect);
                return;
            }
            for (const auto& t : adj.out(s)) {
                auto next = trace;
                const auto& g = lts.label(t.label).gate;
                if (g != "GRID_CAR" && g != "LIDAR_MAP") next.push_back(g);
                dfs(t.dst, next);
            }
        };
        dfs(lts.initial(), {});
        CHECK(paths >= 1);
    }
}

TEST_CASE("disjoint trajectories never collide") {
    auto scn = open_map();
    scn.car = {.start = {8, 9}, .moves = {Direction::up, Direction::up, Direction::up, Direction::up}};
    scn.mobiles.push_back({.kind = "Other_Car", .anchor = {1, 9}, .speed = 1,
                           .moves = {Direction::up, Direction::up, Direction::up}});
    scn.mobiles.push_back({.kind = "Pedestrian", .anchor = {0, 0}, .speed = 1, .transparent = true,
                           .moves = {Direction::right, Direction::right, Direction::down}});
    auto lts = kernel::explore(build_grid_composition(scn, true));
    for (const auto& l : lts.labels()) CHECK(l.gate != "COLLISION");
    CHECK(has_label(lts, "ARRIVAL"));
    CHECK(has_label(lts, "END_OBSTACLE !Other_Car"));
    CHECK(round_structure_holds(lts, scn));
}

TEST_CASE("obstacle lists: end, park, restart") {
    auto scn = open_map();
    scn.car.moves.assign(4, Direction::none);
    scn.mobiles.push_back({.kind = "Once", .anchor = {0, 0}, .speed = 1, .moves = {Direction::right}});
    scn.mobiles.push_back({.kind = "Loop", .anchor = {0, 9}, .speed = 1, .cyclic = true,
                           .moves = {Direction::right, Direction::left}});
    scn.mobiles.push_back({.kind = "Blocked", .anchor = {9, 0}, .speed = 1, .moves = {Direction::right}});
    auto lts = kernel::explore(build_grid_composition(scn, false));
    // Deterministic run: a single path.
    std::vector<std::string> trace;
    kernel::Adjacency adj(lts);
    for (auto s = lts.initial(); !adj.out(s).empty();) {
        REQUIRE(adj.out(s).size() == 1);
        const auto& a = lts.label(adj.out(s)[0].label);
        if (a.gate == "OBSTACLE_POSITION" || a.gate == "END_OBSTACLE") trace.push_back(a.to_string());
        s = adj.out(s)[0].dst;
    }
    std::vector<std::string> round1 = {
        "OBSTACLE_POSITION !Once !(0,0) !(1,0) !right !right",
        "OBSTACLE_POSITION !Loop !(0,9) !(1,9) !right !right",
        "OBSTACLE_POSITION !Blocked !(9,0) !(9,0) !none !right",
    };
    std::vector<std::string> round2 = {
        "END_OBSTACLE !Once",
        "OBSTACLE_POSITION !Once !(1,0) !(1,0) !none !none",
        "OBSTACLE_POSITION !Loop !(1,9) !(0,9) !left !left",
        "END_OBSTACLE !Blocked",
        "OBSTACLE_POSITION !Blocked !(9,0) !(9,0) !none !none",
    };
    REQUIRE(trace.size() >= round1.size() + round2.size() + 3);
    CHECK(std::vector(trace.begin(), trace.begin() + 3) == round1);
    CHECK(std::vector(trace.begin() + 3, trace.begin() + 8) == round2);
    CHECK(trace[9] == "OBSTACLE_POSITION !Loop !(0,9) !(1,9) !right !right");
}
