#include "avmodel/perception/model.hpp"

#include <memory>
#include <set>
#include <stdexcept>

namespace avm::perception {

using kernel::Action;
using kernel::Component;
using kernel::Composition;
using kernel::Step;

namespace {

constexpr std::array<Direction, 5> kFive{Direction::none, Direction::up, Direction::down, Direction::left,
                                         Direction::right};

bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::uint64_t nat(const Value& v) { return v.as_nat(); }

Value halted() { return Value::symbol("halted"); }

std::vector<Pos> to_positions(const Value& list) {
    std::vector<Pos> out;
    for (const auto& v : list.items()) out.push_back(to_pos(v));
    return out;
}

Value from_positions(const std::vector<Pos>& ps) {
    std::vector<Value> out;
    for (auto p : ps) out.push_back(position_value(p));
    return Value::list(std::move(out));
}

/// The anchor and every in-bounds single move from it: what a receiver must
/// accept for an actor at `p`.
std::vector<Pos> reachable(const GridScenario& scn, Pos p, unsigned speed) {
    std::set<Pos> out{p};
    for (auto d : kAxisMoves)
        if (auto q = step_position(p, d, speed, scn.width, scn.height)) out.insert(*q);
    return {out.begin(), out.end()};
}

PerceptionGrid from_grid_value(const Value& g, Pos anchor) {
    PerceptionGrid out;
    out.anchor = anchor;
    for (int r = 0; r < PerceptionGrid::size; ++r) {
        const auto& row = g.items()[static_cast<std::size_t>(r)].name();
        for (int c = 0; c < PerceptionGrid::size; ++c)
            out.cells[static_cast<std::size_t>(r * PerceptionGrid::size + c)] = row[static_cast<std::size_t>(c)];
    }
    return out;
}

Component obstacle(std::shared_ptr<const GridScenario> scn, std::size_t i) {
    const auto& o = scn->mobiles[i];
    Component c;
    c.id = "OBSTACLE_" + o.kind;
    // [anchor, next move, phase, valid dirs, ended]
    c.initial = Value::list({position_value(o.anchor), Value::nat(0), Value::nat(0), Value::list({}),
                             Value::boolean(false)});
    c.step = [scn, i](const Value& local) {
        const auto& o = scn->mobiles[i];
        const auto& s = local.items();
        Pos a = to_pos(s[0]);
        auto idx = nat(s[1]);
        bool ended = s[4].as_bool();
        bool exhausted = idx >= o.moves.size();
        Value kind = Value::symbol(o.kind);
        std::vector<Step> out;
        auto with = [&](Value pos, std::uint64_t next_idx, std::uint64_t phase, Value mask, bool end) {
            return Value::list({std::move(pos), Value::nat(next_idx), Value::nat(phase), std::move(mask),
                                Value::boolean(end)});
        };
        if (nat(s[2]) == 0) {
            if (exhausted && !ended) {
                out.push_back({Action("END_OBSTACLE", {kind}), with(s[0], idx, 0, s[3], true)});
            } else if (exhausted) {
                out.push_back({Action("GRID_UPDATE", {kind, Value::any()}), with(s[0], idx, 1, s[3], true)});
            } else {
                for (unsigned m = 0; m < 16; ++m) {
                    std::vector<Value> dirs;
                    for (std::size_t k = 0; k < 4; ++k)
                        if (m & (1u << k)) dirs.push_back(direction_value(kAxisMoves[k]));
                    Value mask = Value::list(std::move(dirs));
                    out.push_back({Action("GRID_UPDATE", {kind, mask}), with(s[0], idx, 1, mask, ended)});
                }
            }
            return out;
        }
        if (exhausted) {
            Value none = direction_value(Direction::none);
            out.push_back({Action("OBSTACLE_POSITION", {kind, s[0], s[0], none, none}),
                           with(s[0], idx, 0, Value::list({}), ended)});
            return out;
        }
        Direction req = o.moves[idx];
        auto next_idx = idx + 1;
        if (o.cyclic && next_idx == o.moves.size()) next_idx = 0;
        auto valid = [&](Direction d) {
            for (const auto& v : s[3].items())
                if (v.name() == to_string(d)) return true;
            return false;
        };
        std::vector<Direction> resolved;
        if (req == Direction::random) {
            resolved.push_back(Direction::none);
            for (auto d : kAxisMoves)
                if (valid(d)) resolved.push_back(d);
        } else {
            resolved.push_back(req == Direction::none || valid(req) ? req : Direction::none);
        }
        for (auto d : resolved) {
            Pos next = d == Direction::none ? a : *step_position(a, d, o.speed, scn->width, scn->height);
            out.push_back({Action("OBSTACLE_POSITION",
                                  {kind, s[0], position_value(next), direction_value(d), direction_value(req)}),
                           with(position_value(next), next_idx, 0, Value::list({}), ended)});
        }
        return out;
    };
    return c;
}

Component map_manager(std::shared_ptr<const GridScenario> scn) {
    Component c;
    c.id = "MAP_MANAGER";
    c.sync_set = {"GRID_UPDATE", "OBSTACLE_POSITION", "GRID_CAR", "CAR_POSITION", "COLLISION", "ARRIVAL", "TICK"};
    std::vector<Pos> anchors;
    for (const auto& o : scn->mobiles) anchors.push_back(o.anchor);
    // [car, anchors, slot, phase]; slot n is the car, n+1 closes the round
    c.initial = Value::list({position_value(scn->car.start), from_positions(anchors), Value::nat(0), Value::nat(0)});
    c.step = [scn](const Value& local) {
        std::vector<Step> out;
        if (local == halted()) return out;
        const auto& s = local.items();
        const std::size_t n = scn->mobiles.size();
        Pos car = to_pos(s[0]);
        auto anchors = to_positions(s[1]);
        auto slot = nat(s[2]);
        auto phase = nat(s[3]);
        auto state = [&](Pos car, const std::vector<Pos>& an, std::uint64_t slot, std::uint64_t phase) {
            return Value::list({position_value(car), from_positions(an), Value::nat(slot), Value::nat(phase)});
        };
        if (slot < n) {
            const auto& o = scn->mobiles[slot];
            Value kind = Value::symbol(o.kind);
            if (phase == 0) {
                auto world = world_map(*scn, car, anchors);
                int owner = static_cast<int>(scn->statics.size() + slot);
                std::vector<Value> dirs;
                for (auto d : kAxisMoves)
                    if (valid_move(world, owner, d, o.speed)) dirs.push_back(direction_value(d));
                out.push_back({Action("GRID_UPDATE", {kind, Value::list(std::move(dirs))}), state(car, anchors, slot, 1)});
            } else {
                for (auto p : reachable(*scn, anchors[slot], o.speed)) {
                    auto next = anchors;
                    next[slot] = p;
                    out.push_back({Action("OBSTACLE_POSITION", {kind, s[1].items()[slot], position_value(p),
                                                                Value::any(), Value::any()}),
                                   state(car, next, slot + 1, 0)});
                }
            }
        } else if (slot == n) {
            if (phase == 0) {
                out.push_back({Action("GRID_CAR", {s[0]}), state(car, anchors, slot, 1)});
            } else {
                for (auto p : reachable(*scn, car, scn->car.speed))
                    out.push_back({Action("CAR_POSITION", {s[0], position_value(p)}), state(p, anchors, n + 1, 0)});
                out.push_back({Action("ARRIVAL"), halted()});
            }
        } else {
            auto world = world_map(*scn, car, anchors);
            const auto& cell = world.at(car);
            if (cell.kind == GridMap::CellKind::occupied) {
                const auto& hit = world.obstacles()[static_cast<std::size_t>(cell.owner)];
                out.push_back({Action("COLLISION", {Value::symbol(hit.kind)}), halted()});
            } else {
                out.push_back({Action("TICK"), state(car, anchors, 0, 0)});
                out.push_back({Action("ARRIVAL"), halted()});
            }
        }
        return out;
    };
    return c;
}

Component move_car(std::shared_ptr<const GridScenario> scn, bool expose) {
    Component c;
    c.id = "MOVE_CAR";
    c.sync_set = {"LIDAR_MAP", "CAR_POSITION", "TICK", "ARRIVAL"};
    // [position, next move, phase]: 0 wait for the grid, 1 move, 2 wait for the tick
    c.initial = Value::list({position_value(scn->car.start), Value::nat(0), Value::nat(0)});
    c.step = [scn, expose](const Value& local) {
        std::vector<Step> out;
        if (local == halted()) return out;
        const auto& car = scn->car;
        const auto& s = local.items();
        auto idx = nat(s[1]);
        auto phase = nat(s[2]);
        bool exhausted = idx >= car.moves.size();
        if (phase == 0) {
            Action a = expose ? Action("LIDAR_MAP", {Value::any()}) : Action("LIDAR_MAP");
            out.push_back({a, Value::list({s[0], s[1], Value::nat(1)})});
        } else if (phase == 1) {
            if (exhausted) {
                out.push_back({Action("ARRIVAL"), halted()});
                return out;
            }
            Pos p = to_pos(s[0]);
            Direction req = car.moves[idx];
            auto next_idx = idx + 1;
            if (car.cyclic && next_idx == car.moves.size()) next_idx = 0;
            std::set<Pos> targets;
            for (auto d : kFive) {
                if (req != Direction::random && d != req) continue;
                // Driving off the map leaves the car where it is.
                targets.insert(step_position(p, d, car.speed, scn->width, scn->height).value_or(p));
            }
            for (auto q : targets)
                out.push_back({Action("CAR_POSITION", {s[0], position_value(q)}),
                               Value::list({position_value(q), Value::nat(next_idx), Value::nat(2)})});
        } else if (exhausted) {
            out.push_back({Action("ARRIVAL"), halted()});
        } else {
            out.push_back({Action("TICK"), Value::list({s[0], s[1], Value::nat(0)})});
        }
        return out;
    };
    return c;
}

Component lidar_manager(std::shared_ptr<const GridScenario> scn, bool expose) {
    Component c;
    c.id = "LIDAR_MANAGER";
    if (!expose) {
        c.sync_set = {"GRID_CAR", "LIDAR_MAP"};
        c.initial = Value::nat(0);
        c.step = [](const Value& local) {
            if (local.as_nat() == 0) return std::vector<Step>{{Action("GRID_CAR", {Value::any()}), Value::nat(1)}};
            return std::vector<Step>{{Action("LIDAR_MAP"), Value::nat(0)}};
        };
        return c;
    }
    // Mirrors the world so it can recompute the grid from what it observed.
    c.sync_set = {"GRID_CAR", "LIDAR_MAP", "OBSTACLE_POSITION", "CAR_POSITION"};
    std::vector<Pos> anchors;
    for (const auto& o : scn->mobiles) anchors.push_back(o.anchor);
    // [car, anchors, last grid as {} or {Grid, anchor}, phase]
    c.initial = Value::list({position_value(scn->car.start), from_positions(anchors), Value::list({}), Value::nat(0)});
    c.step = [scn](const Value& local) {
        std::vector<Step> out;
        const auto& s = local.items();
        if (nat(s[3]) == 1) {
            out.push_back({Action("LIDAR_MAP", {s[2].items()[0]}), Value::list({s[0], s[1], s[2], Value::nat(0)})});
            return out;
        }
        Pos car = to_pos(s[0]);
        auto anchors = to_positions(s[1]);
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const auto& o = scn->mobiles[i];
            for (auto p : reachable(*scn, anchors[i], o.speed)) {
                auto next = anchors;
                next[i] = p;
                out.push_back({Action("OBSTACLE_POSITION", {Value::symbol(o.kind), s[1].items()[i], position_value(p),
                                                            Value::any(), Value::any()}),
                               Value::list({s[0], from_positions(next), s[2], Value::nat(0)})});
            }
        }
        for (auto p : reachable(*scn, car, scn->car.speed))
            out.push_back({Action("CAR_POSITION", {s[0], position_value(p)}),
                           Value::list({position_value(p), s[1], s[2], Value::nat(0)})});
        std::optional<PerceptionGrid> prev;
        if (!s[2].items().empty()) prev = from_grid_value(s[2].items()[0], to_pos(s[2].items()[1]));
        auto grid = compute_perception(world_map(*scn, car, anchors), prev ? &*prev : nullptr, car);
        out.push_back({Action("GRID_CAR", {s[0]}),
                       Value::list({s[0], s[1], Value::list({grid_value(grid), s[0]}), Value::nat(1)})});
        return out;
    };
    return c;
}

Component scheduler(std::shared_ptr<const GridScenario> scn) {
    Component c;
    c.id = "SCHEDULER";
    c.sync_set = {"END_OBSTACLE", "OBSTACLE_POSITION", "CAR_POSITION", "TICK", "ARRIVAL", "COLLISION"};
    c.initial = Value::nat(0);
    c.step = [scn](const Value& local) {
        std::vector<Step> out;
        if (local == halted()) return out;
        const auto n = scn->mobiles.size();
        auto slot = local.as_nat();
        auto any = Value::any();
        if (slot < n) {
            Value kind = Value::symbol(scn->mobiles[slot].kind);
            out.push_back({Action("END_OBSTACLE", {kind}), local});
            out.push_back({Action("OBSTACLE_POSITION", {kind, any, any, any, any}), Value::nat(slot + 1)});
        } else if (slot == n) {
            out.push_back({Action("CAR_POSITION", {any, any}), Value::nat(n + 1)});
            out.push_back({Action("ARRIVAL"), halted()});
        } else {
            out.push_back({Action("TICK"), Value::nat(0)});
            out.push_back({Action("ARRIVAL"), halted()});
            out.push_back({Action("COLLISION", {any}), halted()});
        }
        return out;
    };
    return c;
}

Component restrand(std::shared_ptr<const GridScenario> scn) {
    Component c;
    c.id = "RESTRAND";
    c.sync_set = {"OBSTACLE_POSITION", "CAR_POSITION"};
    std::vector<Pos> anchors;
    for (const auto& o : scn->mobiles) anchors.push_back(o.anchor);
    c.initial = Value::list({position_value(scn->car.start), from_positions(anchors)});
    c.step = [scn](const Value& local) {
        std::vector<Step> out;
        const auto& s = local.items();
        Pos car = to_pos(s[0]);
        auto anchors = to_positions(s[1]);
        auto world = world_map(*scn, car, anchors);
        Value random = direction_value(Direction::random);
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const auto& o = scn->mobiles[i];
            Pos a = anchors[i];
            int owner = static_cast<int>(scn->statics.size() + i);
            std::set<Direction> allowed;
            for (auto d : kAxisMoves)
                if (valid_move(world, owner, d, o.speed) && move_allowed(car, a, d, o.speed, scn->dist_min))
                    allowed.insert(d);
            if (manhattan(car, a) <= scn->dist_min || allowed.empty()) allowed.insert(Direction::none);
            for (auto d : kFive) {
                auto p = d == Direction::none ? std::optional<Pos>(a)
                                              : step_position(a, d, o.speed, scn->width, scn->height);
                if (!p) continue;
                auto next = anchors;
                next[i] = *p;
                Value st = Value::list({s[0], from_positions(next)});
                std::vector<Value> head{Value::symbol(o.kind), s[1].items()[i], position_value(*p), direction_value(d)};
                for (auto req : kFive) {
                    auto offers = head;
                    offers.push_back(direction_value(req));
                    out.push_back({Action("OBSTACLE_POSITION", std::move(offers)), st});
                }
                if (allowed.count(d)) {
                    auto offers = head;
                    offers.push_back(random);
                    out.push_back({Action("OBSTACLE_POSITION", std::move(offers)), st});
                }
            }
        }
        for (auto p : reachable(*scn, car, scn->car.speed))
            out.push_back({Action("CAR_POSITION", {s[0], position_value(p)}), Value::list({position_value(p), s[1]})});
        return out;
    };
    return c;
}

}  // namespace

Value position_value(Pos p) { return Value::position(p.x, p.y); }
Pos to_pos(const Value& v) { return {v.x(), v.y()}; }
Value direction_value(Direction d) { return Value::symbol(to_string(d)); }

Value grid_value(const PerceptionGrid& g) {
    std::vector<Value> rows;
    for (auto& r : g.rows()) rows.push_back(Value::symbol(r));
    return Value::record("Grid", std::move(rows));
}

void validate(const GridScenario& scn) {
    if (scn.width < 1 || scn.height < 1) throw std::invalid_argument("map dimensions must be positive");
    std::set<std::string> kinds;
    for (const auto& o : scn.statics) {
        if (!is_identifier(o.kind)) throw std::invalid_argument("bad obstacle kind '" + o.kind + "'");
        if (o.speed != 0 || !o.moves.empty() || o.cyclic)
            throw std::invalid_argument("static obstacle " + o.kind + " must have speed 0 and no moves");
    }
    for (const auto& o : scn.statics) kinds.insert(o.kind);
    for (const auto& o : scn.mobiles) {
        if (!is_identifier(o.kind)) throw std::invalid_argument("bad obstacle kind '" + o.kind + "'");
        if (!kinds.insert(o.kind).second) throw std::invalid_argument("obstacle kind " + o.kind + " is not unique");
        if (o.cyclic && o.moves.empty()) throw std::invalid_argument(o.kind + " is cyclic with no moves");
    }
    if (scn.car.cyclic && scn.car.moves.empty()) throw std::invalid_argument("car is cyclic with no moves");
    GridMap m(scn.width, scn.height);
    for (const auto& o : scn.statics) m.add_obstacle(o);
    for (const auto& o : scn.mobiles) m.add_obstacle(o);
    if (!m.in_bounds(scn.car.start)) throw std::invalid_argument("car starts off the map");
    if (m.at(scn.car.start).kind == GridMap::CellKind::occupied)
        throw std::invalid_argument("car overlaps " +
                                    m.obstacles()[static_cast<std::size_t>(m.at(scn.car.start).owner)].kind);
}

GridMap initiate_map(const GridScenario& scn) {
    validate(scn);
    std::vector<Pos> anchors;
    for (const auto& o : scn.mobiles) anchors.push_back(o.anchor);
    return world_map(scn, scn.car.start, anchors);
}

GridMap world_map(const GridScenario& scn, Pos car, const std::vector<Pos>& anchors) {
    GridMap m(scn.width, scn.height);
    for (const auto& o : scn.statics) m.add_obstacle(o);
    for (std::size_t i = 0; i < scn.mobiles.size(); ++i) {
        auto o = scn.mobiles[i];
        o.anchor = anchors.at(i);
        m.add_obstacle(o);
    }
    m.place_car(car);
    return m;
}

GridScenario crossroad_scenario() {
    GridScenario scn;
    for (Pos p : {Pos{0, 0}, Pos{7, 0}, Pos{0, 7}, Pos{7, 7}})
        scn.statics.push_back({.kind = "Building", .anchor = p, .w = 3, .h = 3, .moves = {}});
    using D = Direction;
    scn.mobiles.push_back({.kind = "Other_Car", .anchor = {6, 7}, .speed = 1, .moves = {D::up, D::up, D::up}});
    scn.mobiles.push_back({.kind = "Pedestrian",
                           .anchor = {3, 8},
                           .speed = 1,
                           .transparent = true,
                           .moves = {D::right, D::random, D::random, D::random, D::random}});
    scn.car = {.start = {5, 9}, .speed = 1, .moves = {D::none, D::up, D::random, D::up, D::up, D::up}};
    scn.dist_min = 2;
    return scn;
}

Composition build_grid_composition(const GridScenario& scenario, bool expose_grid) {
    validate(scenario);
    auto scn = std::make_shared<const GridScenario>(scenario);
    Composition comp;
    if (!scn->mobiles.empty()) {
        auto inner = std::make_shared<Composition>();
        for (std::size_t i = 0; i < scn->mobiles.size(); ++i) inner->add(obstacle(scn, i));
        comp.add(kernel::as_component(inner, "OBSTACLES_MANAGER",
                                      {"GRID_UPDATE", "OBSTACLE_POSITION", "END_OBSTACLE"}));
    }
    comp.add(map_manager(scn));
    comp.add(move_car(scn, expose_grid));
    comp.add(lidar_manager(scn, expose_grid));
    comp.add(scheduler(scn));
    comp.add(restrand(scn));
    return comp;
}

}  // namespace avm::perception
