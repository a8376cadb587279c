#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avmodel/kernel/lts.hpp"
#include "avmodel/perception/model.hpp"

namespace avm::testgen {

using kernel::Action;
using kernel::Lts;
using kernel::StateId;
using kernel::Value;

/// Gate plus one pattern per offer; nullopt matches any value.
struct ActionPattern {
    std::string gate;
    std::vector<std::optional<Value>> offers;

    bool matches(const Action& a) const;
    std::string to_string() const;
};

/// Steps are matched in order; any action may occur between two steps.
struct TestPurpose {
    std::vector<ActionPattern> steps;
};

class PurposeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON list of {"gate": G, "offers": [literal | "*"]}. Literals are JSON
/// strings in canonical value syntax, or numbers / booleans.
TestPurpose parse_purpose(const nlohmann::json& j);

/// Patterns whose gate never occurs in the Lts (they can never match).
std::vector<std::string> unknown_gates(const Lts& lts, const TestPurpose& tp);

struct PurposeProduct {
    Lts lts;                          // states are (model state, purpose progress) pairs
    std::vector<StateId> model_state;  // per product state
    std::vector<std::size_t> progress;
    std::vector<bool> accepting;      // progress == steps; such states are not expanded
};

PurposeProduct product_with_purpose(const Lts& lts, const TestPurpose& tp);

struct TestCase {
    std::vector<Action> witness;
    std::size_t verdict_position = 0;  // index just past the accepting action
    StateId end_state = 0;             // model state reached by the witness
};

/// BFS-shortest witness to an accepting state, or nullopt (inconclusive).
std::optional<TestCase> extract_test(const PurposeProduct& product);

/// Extends the witness along a shortest path until it ends with TICK,
/// ARRIVAL or COLLISION, so that it splits into whole rounds.
TestCase complete_round(const Lts& lts, TestCase tc);

struct ActorMove {
    perception::Pos from;
    perception::Pos to;
    std::string direction;  // resolved direction; empty for the car
};

struct SimTick {
    std::map<std::string, ActorMove> obstacles;
    std::optional<ActorMove> car;
};

struct SimScenario {
    std::vector<SimTick> ticks;
    std::string terminal = "END";  // ARRIVAL | COLLISION | END
    std::string collided_with;     // obstacle kind for COLLISION
};

class RoundStructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Folds the actions between consecutive TICKs into one tick record.
/// `num_obstacles` is checked against every completed tick.
SimScenario trace_to_scenario(const std::vector<Action>& trace, std::size_t num_obstacles);

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Drives the grid composition through the moves of `sim`, taking the
/// bookkeeping actions (GRID_UPDATE, GRID_CAR, LIDAR_MAP, END_OBSTACLE) as
/// they come. Returns the induced trace. Throws DivergenceError with the
/// index of the first dictated action that is not enabled.
std::vector<Action> replay(const perception::GridScenario& scn, const SimScenario& sim, bool expose_grid = false);

/// ASCII frames: the initial map, then one per tick.
std::vector<std::string> render_frames(const perception::GridScenario& scn, const SimScenario& sim);

nlohmann::json to_json(const SimScenario& sim);
SimScenario sim_from_json(const nlohmann::json& j);

}  // namespace avm::testgen
