#pragma once

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "avmodel/control/graph_map.hpp"
#include "avmodel/kernel/lts.hpp"

namespace avm::properties {

using kernel::Action;
using kernel::Lts;

struct Verdict {
    enum class Kind { pass, fail, fail_lasso };
    std::string property;
    Kind kind = Kind::pass;
    std::vector<Action> counterexample;  // full trace for fail, prefix for fail_lasso
    std::vector<Action> cycle;           // fail_lasso only

    bool passed() const { return kind == Kind::pass; }
};

const char* to_string(Verdict::Kind k);

/// {property, verdict, counterexample: [labels], cycle: [labels]}
std::string verdict_json(const Verdict& v);

class LabelSchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ConsistencyTable = std::function<bool(const std::string& current, const kernel::Value& control,
                                            const std::string& next)>;

/// Observer for "the car position is updated consistently after each car
/// move": UPDATE_POSITION ?cur, then CAR_MOVE ?ctl with no other
/// UPDATE_POSITION/CAR_MOVE between, then an UPDATE_POSITION ?next that
/// `table` rejects. Returns a shortest violating trace.
Verdict check_consistent_updates(const Lts& lts, const ConsistencyTable& table);
Verdict check_consistent_updates(const Lts& lts, const control::GraphMap& map);

const std::set<std::string>& default_terminal_gates();

/// Every path reaches a terminal action. END_OBSTACLE terminates only once
/// it occurred `num_obstacles` times along the path.
Verdict check_inevitable_termination(const Lts& lts, std::size_t num_obstacles,
                                     const std::set<std::string>& terminal_gates = default_terminal_gates());

/// Fails when some maximal finite trace ends with a non-terminal action
/// (same END_OBSTACLE counting as above). Being a trace property, the
/// verdict is stable under strong bisimulation.
Verdict check_deadlock_freedom(const Lts& lts, std::size_t num_obstacles,
                               const std::set<std::string>& allowed_terminal_gates = default_terminal_gates());

}  // namespace avm::properties
