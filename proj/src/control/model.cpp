#include "avmodel/control/model.hpp"

#include <memory>
#include <stdexcept>

namespace avm::control {

using kernel::Action;
using kernel::Component;
using kernel::Composition;
using kernel::Step;

void validate(const ControlScenario& scn) {
    const auto& map = scn.map;
    auto need = [&](const std::string& street, const std::string& what) {
        if (!map.has_street(street)) throw std::invalid_argument(what + " names unknown street '" + street + "'");
    };
    need(scn.car_position, "car position");
    need(scn.destination, "destination");
    std::set<std::string> taken{scn.car_position}, ids;
    for (const auto& o : scn.obstacles) {
        need(o.initial_street, "obstacle " + o.id);
        if (!taken.insert(o.initial_street).second)
            throw std::invalid_argument("obstacle " + o.id + " starts on an occupied street");
        if (!ids.insert(o.id).second) throw std::invalid_argument("duplicate obstacle id " + o.id);
        if (o.id == "none") throw std::invalid_argument("obstacle id 'none' is reserved");
        for (const auto& m : o.moves)
            if (!(m == random_op() || m == leave() || is_turn(m)))
                throw std::invalid_argument("obstacle " + o.id + " has invalid move " + m.to_string());
    }
}

ControlScenario reference_scenario() {
    ControlScenario scn;
    scn.map = reference_map();
    scn.car_position = "Coronation_Street";
    scn.destination = "Mosley_Street";
    scn.obstacles = {{"O0", "Whitworth_Street", {random_op()}}, {"O1", "Oxford_Road", {random_op()}}};
    return scn;
}

Value radar_grid(std::set<std::string> streets) {
    std::vector<Value> items;
    for (auto& s : streets) items.push_back(Value::symbol(s));
    return Value::record("Radar", {Value::list(std::move(items))});
}

namespace {

const Value kNone = Value::symbol("none");

std::set<std::string> grid_streets(const Value& grid) {
    std::set<std::string> out;
    for (const auto& s : grid.items()[0].items()) out.insert(s.name());
    return out;
}

// Shared, immutable data for all step functions of one composition.
struct Context {
    ControlScenario scn;
    std::vector<Value> streets;
    std::vector<Value> grids;  // every radar value with at most one street per obstacle

    explicit Context(ControlScenario s) : scn(std::move(s)) {
        for (const auto& e : scn.map.edges()) streets.push_back(Value::symbol(e.street));
        std::vector<std::string> names;
        for (const auto& e : scn.map.edges()) names.push_back(e.street);
        std::set<std::string> pick;
        enumerate(names, 0, scn.obstacles.size(), pick);
    }

    void enumerate(const std::vector<std::string>& names, std::size_t from, std::size_t budget,
                   std::set<std::string>& pick) {
        grids.push_back(radar_grid(pick));
        if (budget == 0) return;
        for (std::size_t i = from; i < names.size(); ++i) {
            pick.insert(names[i]);
            enumerate(names, i + 1, budget - 1, pick);
            pick.erase(names[i]);
        }
    }

    Value itinerary(const std::string& from, const Value& grid) const {
        return Value::list(compute_itinerary(scn.map, from, scn.destination, grid_streets(grid)).controls);
    }
};

using Ctx = std::shared_ptr<const Context>;

Component radar(const Ctx& ctx) {
    // (last grid sent to ACTION, latest grid received)
    Component c{"PERCEPTION_RADAR", {"UPDATE_GRID", "CURRENT_GRID"}, Value{}, nullptr};
    auto empty = radar_grid({});
    c.initial = Value::list({empty, empty});
    c.step = [ctx](const Value& s) {
        const auto& last = s.items()[0];
        const auto& current = s.items()[1];
        std::vector<Step> out;
        for (const auto& g : ctx->grids) out.push_back({Action("UPDATE_GRID", {g}), Value::list({last, g})});
        if (current != last) out.push_back({Action("CURRENT_GRID", {current}), Value::list({current, current})});
        return out;
    };
    return c;
}

Component gps(const Ctx& ctx) {
    Component c{"PERCEPTION_GPS", {"UPDATE_POSITION", "REQUEST_POSITION", "CURRENT_POSITION"}, Value{}, nullptr};
    c.initial = Value::list({Value::symbol(ctx->scn.car_position), Value::boolean(false)});
    c.step = [ctx](const Value& s) {
        const auto& street = s.items()[0];
        bool asked = s.items()[1].as_bool();
        std::vector<Step> out;
        for (const auto& p : ctx->streets) out.push_back({Action("UPDATE_POSITION", {p}), Value::list({p, s.items()[1]})});
        if (asked)
            out.push_back({Action("CURRENT_POSITION", {street}), Value::list({street, Value::boolean(false)})});
        else
            out.push_back({Action("REQUEST_POSITION"), Value::list({street, Value::boolean(true)})});
        return out;
    };
    return c;
}

Component decision(const Ctx& ctx) {
    Component c{"DECISION",
                {"REQUEST_PATH", "CURRENT_PATH", "REQUEST_POSITION", "CURRENT_POSITION", "ARRIVAL"},
                Value::symbol("idle"),
                nullptr};
    c.step = [ctx](const Value& s) {
        std::vector<Step> out;
        if (s == Value::symbol("idle")) {
            for (const auto& g : ctx->grids) out.push_back({Action("REQUEST_PATH", {g}), Value::record("asking", {g})});
        } else if (s == Value::symbol("arrive")) {
            out.push_back({Action("ARRIVAL"), Value::symbol("stopped")});
        } else if (s.is(Value::Kind::record) && s.name() == "asking") {
            out.push_back({Action("REQUEST_POSITION"), Value::record("locating", s.items())});
        } else if (s.is(Value::Kind::record) && s.name() == "locating") {
            for (const auto& p : ctx->streets) {
                Value next = p.name() == ctx->scn.destination
                                 ? Value::symbol("arrive")
                                 : Value::record("answer", {ctx->itinerary(p.name(), s.items()[0])});
                out.push_back({Action("CURRENT_POSITION", {p}), next});
            }
        } else if (s.is(Value::Kind::record) && s.name() == "answer") {
            out.push_back({Action("CURRENT_PATH", s.items()), Value::symbol("idle")});
        }
        return out;
    };
    return c;
}

// ACTION local state: (phase, known street, grid, requested grid, control)
Value action_state(const char* phase, const Value& known, const Value& grid, const Value& requested,
                   const Value& control) {
    return Value::list({Value::symbol(phase), known, grid, requested, control});
}

Component action(const Ctx& ctx) {
    Component c{"ACTION",
                {"REQUEST_PATH", "CURRENT_PATH", "CURRENT_GRID", "CAR_MOVE", "COLLISION", "UPDATE_POSITION", "ARRIVAL"},
                Value{},
                nullptr};
    auto empty = radar_grid({});
    c.initial = action_state("request", Value::symbol(ctx->scn.car_position), empty, empty, kNone);
    c.step = [ctx](const Value& s) {
        const auto& f = s.items();
        const std::string& phase = f[0].name();
        const auto& known = f[1];
        const auto& grid = f[2];
        const auto& requested = f[3];
        const auto& control = f[4];
        std::vector<Step> out;
        if (phase == "stopped") return out;

        for (const auto& g : ctx->grids) {
            const char* next = phase == "wait_change" ? "request" : phase.c_str();
            out.push_back({Action("CURRENT_GRID", {g}), action_state(next, known, g, requested, control)});
        }
        for (const auto& p : ctx->streets) {
            const char* next = phase == "wait_pos" ? "request" : phase.c_str();
            out.push_back({Action("UPDATE_POSITION", {p}), action_state(next, p, grid, requested, control)});
        }

        if (phase == "request") {
            out.push_back({Action("REQUEST_PATH", {grid}), action_state("wait_path", known, grid, grid, kNone)});
        } else if (phase == "wait_path") {
            if (known.name() == ctx->scn.destination) {
                out.push_back({Action("ARRIVAL"), action_state("stopped", known, grid, requested, kNone)});
            } else {
                auto path = ctx->itinerary(known.name(), requested);
                Value next;
                if (!path.items().empty())
                    next = action_state("have_path", known, grid, requested, path.items()[0]);
                else  // no route: retry if the grid already moved on, else wait for it to
                    next = action_state(grid != requested ? "request" : "wait_change", known, grid, requested, kNone);
                out.push_back({Action("CURRENT_PATH", {path}), next});
            }
        } else if (phase == "have_path") {
            Value ctl = control;
            const auto& succ = ctx->scn.map.successors(known.name());
            if (grid_streets(grid).count(succ[control.items()[0].as_nat()].street)) ctl = brakes();
            out.push_back({Action("CAR_MOVE", {ctl}), action_state("wait_pos", known, grid, requested, kNone)});
        } else if (phase == "wait_pos") {
            out.push_back({Action("COLLISION", {Value::any()}), action_state("stopped", known, grid, requested, kNone)});
        }
        return out;
    };
    return c;
}

Component obstacle(const Ctx& ctx, std::size_t index) {
    const auto& spec = ctx->scn.obstacles[index];
    // (street or none, next move index, finished)
    Component c{spec.id, {}, Value::list({Value::symbol(spec.initial_street), Value::nat(0), Value::boolean(false)}),
                nullptr};
    c.step = [ctx, index](const Value& s) {
        const auto& spec = ctx->scn.obstacles[index];
        const auto& pos = s.items()[0];
        auto idx = s.items()[1].as_nat();
        std::vector<Step> out;
        if (s.items()[2].as_bool()) return out;
        Value id = Value::symbol(spec.id);
        if (idx >= spec.moves.size() || pos == kNone) {
            out.push_back({Action("END_OBSTACLE", {id}), Value::list({pos, Value::nat(idx), Value::boolean(true)})});
            return out;
        }
        const auto& succ = ctx->scn.map.successors(pos.name());
        std::vector<Value> ops;
        const auto& m = spec.moves[idx];
        if (m == random_op())
            ops = expand_random(ctx->scn.map, pos.name());
        else if (is_turn(m) && m.items()[0].as_nat() < succ.size())
            ops = {m};
        else
            ops = {leave()};
        for (const auto& op : ops) {
            if (op == leave()) {
                Value next = Value::list({kNone, Value::nat(spec.moves.size()), Value::boolean(false)});
                out.push_back({Action("OBSTACLE_MOVE", {id, op, kNone}), next});
            } else {
                Value target = Value::symbol(succ[op.items()[0].as_nat()].street);
                Value next = Value::list({target, Value::nat(idx + 1), Value::boolean(false)});
                out.push_back({Action("OBSTACLE_MOVE", {id, op, target}), next});
            }
        }
        return out;
    };
    return c;
}

// MAP_MANAGEMENT local state: (car street, obstacle streets, finished count,
// pending notifications, halted)
Value map_state(const Value& car, std::vector<Value> obstacles, std::uint64_t finished, std::vector<Value> queue,
                bool halted) {
    return Value::list({car, Value::list(std::move(obstacles)), Value::nat(finished), Value::list(std::move(queue)),
                        Value::boolean(halted)});
}

Component map_management(const Ctx& ctx) {
    Component c{"MAP_MANAGEMENT",
                {"UPDATE_GRID", "UPDATE_POSITION", "CAR_MOVE", "COLLISION", "ARRIVAL", "OBSTACLE_MOVE", "END_OBSTACLE"},
                Value{},
                nullptr};
    std::vector<Value> obs;
    for (const auto& o : ctx->scn.obstacles) obs.push_back(Value::symbol(o.initial_street));
    c.initial = map_state(Value::symbol(ctx->scn.car_position), obs, 0,
                          {Value::symbol("position"), Value::symbol("grid")}, false);
    c.step = [ctx](const Value& s) {
        std::vector<Step> out;
        const auto& car = s.items()[0];
        const auto& obs = s.items()[1].items();
        auto finished = s.items()[2].as_nat();
        const auto& queue = s.items()[3].items();
        if (s.items()[4].as_bool()) return out;
        const auto n = ctx->scn.obstacles.size();

        out.push_back({Action("ARRIVAL"), map_state(car, obs, finished, queue, true)});
        for (std::size_t i = 0; i < n; ++i)
            out.push_back({Action("END_OBSTACLE", {Value::symbol(ctx->scn.obstacles[i].id)}),
                           map_state(car, obs, finished + 1, queue, false)});

        if (!queue.empty()) {
            std::vector<Value> rest(queue.begin() + 1, queue.end());
            const auto& head = queue.front().name();
            if (head == "position") {
                out.push_back({Action("UPDATE_POSITION", {car}), map_state(car, obs, finished, rest, false)});
            } else if (head == "grid") {
                std::set<std::string> occupied;
                for (const auto& o : obs)
                    if (o != kNone) occupied.insert(o.name());
                out.push_back({Action("UPDATE_GRID", {radar_grid(occupied)}), map_state(car, obs, finished, rest, false)});
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    if (obs[i] == car)
                        out.push_back({Action("COLLISION", {Value::symbol(ctx->scn.obstacles[i].id)}),
                                       map_state(car, obs, finished, rest, true)});
            }
            return out;
        }

        auto occupied_by = [&](const Value& street) {
            for (std::size_t i = 0; i < n; ++i)
                if (obs[i] == street) return true;
            return false;
        };
        const auto& succ = ctx->scn.map.successors(car.name());
        std::vector<std::pair<Value, Value>> moves{{brakes(), car}};
        for (std::size_t k = 0; k < succ.size(); ++k) moves.emplace_back(turned_n(k), Value::symbol(succ[k].street));
        for (const auto& [ctl, target] : moves) {
            std::vector<Value> q;
            if (occupied_by(target))
                q = {Value::symbol("collision")};
            else
                q = {Value::symbol("position"), Value::symbol("grid")};
            out.push_back({Action("CAR_MOVE", {ctl}), map_state(target, obs, finished, q, false)});
        }

        for (std::size_t i = 0; i < n; ++i) {
            if (obs[i] == kNone) continue;
            Value id = Value::symbol(ctx->scn.obstacles[i].id);
            auto moved = [&](const Value& where) {
                auto o = obs;
                o[i] = where;
                return map_state(car, o, finished, {Value::symbol("grid")}, false);
            };
            out.push_back({Action("OBSTACLE_MOVE", {id, leave(), kNone}), moved(kNone)});
            const auto& os = ctx->scn.map.successors(obs[i].name());
            for (std::size_t k = 0; k < os.size(); ++k) {
                Value target = Value::symbol(os[k].street);
                if (target == car || occupied_by(target)) continue;
                out.push_back({Action("OBSTACLE_MOVE", {id, turned_n(k), target}), moved(target)});
            }
        }
        return out;
    };
    return c;
}

}  // namespace

Composition build_control_composition(const ControlScenario& scn) {
    validate(scn);
    auto ctx = std::make_shared<const Context>(scn);
    Composition comp;
    comp.add(radar(ctx));
    comp.add(gps(ctx));
    comp.add(decision(ctx));
    comp.add(action(ctx));
    if (!scn.obstacles.empty()) {
        auto inner = std::make_shared<Composition>();
        for (std::size_t i = 0; i < scn.obstacles.size(); ++i) inner->add(obstacle(ctx, i));
        comp.add(kernel::as_component(inner, "OBSTACLES_MANAGER", {"OBSTACLE_MOVE", "END_OBSTACLE"}));
    }
    comp.add(map_management(ctx));
    return comp;
}

}  // namespace avm::control
