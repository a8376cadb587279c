#include "avmodel/testgen/testgen.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "avmodel/kernel/composition.hpp"

namespace avm::testgen {

using perception::Pos;

bool ActionPattern::matches(const Action& a) const {
    if (a.gate != gate || a.offers.size() != offers.size()) return false;
    for (std::size_t i = 0; i < offers.size(); ++i)
        if (offers[i] && !(*offers[i] == a.offers[i])) return false;
    return true;
}

std::string ActionPattern::to_string() const {
    std::string out = gate;
    for (const auto& o : offers) out += o ? " !" + o->to_string() : " ?any";
    return out;
}

TestPurpose parse_purpose(const nlohmann::json& j) {
    if (!j.is_array()) throw PurposeError("purpose must be a JSON array");
    TestPurpose tp;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& step = j[i];
        auto where = "purpose step " + std::to_string(i) + ": ";
        if (!step.is_object() || !step.contains("gate") || !step["gate"].is_string())
            throw PurposeError(where + "expected an object with a string \"gate\"");
        ActionPattern p{step["gate"].get<std::string>(), {}};
        if (step.contains("offers")) {
            if (!step["offers"].is_array()) throw PurposeError(where + "\"offers\" must be an array");
            for (const auto& o : step["offers"]) {
                if (o.is_string() && o.get<std::string>() == "*") {
                    p.offers.push_back(std::nullopt);
                } else if (o.is_string()) {
                    try {
                        p.offers.push_back(kernel::parse_value(o.get<std::string>()));
                    } catch (const std::invalid_argument& e) {
                        throw PurposeError(where + e.what());
                    }
                } else if (o.is_number_unsigned()) {
                    p.offers.push_back(Value::nat(o.get<std::uint64_t>()));
                } else if (o.is_boolean()) {
                    p.offers.push_back(Value::boolean(o.get<bool>()));
                } else {
                    throw PurposeError(where + "unsupported offer " + o.dump());
                }
            }
        }
        tp.steps.push_back(std::move(p));
    }
    return tp;
}

std::vector<std::string> unknown_gates(const Lts& lts, const TestPurpose& tp) {
    std::set<std::string> gates;
    for (const auto& l : lts.labels()) gates.insert(l.gate);
    std::vector<std::string> out;
    for (const auto& s : tp.steps)
        if (!gates.count(s.gate)) out.push_back(s.gate);
    return out;
}

PurposeProduct product_with_purpose(const Lts& lts, const TestPurpose& tp) {
    PurposeProduct p;
    const std::size_t n = tp.steps.size();
    std::map<std::pair<StateId, std::size_t>, StateId> index;
    auto node = [&](StateId s, std::size_t k) {
        auto [it, fresh] = index.try_emplace({s, k}, static_cast<StateId>(p.model_state.size()));
        if (fresh) {
            p.model_state.push_back(s);
            p.progress.push_back(k);
            p.accepting.push_back(k == n);
        }
        return std::pair{it->second, fresh};
    };
    node(lts.initial(), 0);
    kernel::Adjacency adj(lts);
    std::vector<std::tuple<StateId, kernel::LabelId, StateId>> edges;
    for (StateId q = 0; q < p.model_state.size(); ++q) {
        if (p.accepting[q]) continue;
        auto s = p.model_state[q];
        auto k = p.progress[q];
        for (const auto& t : adj.out(s)) {
            auto next_k = tp.steps[k].matches(lts.label(t.label)) ? k + 1 : k;
            edges.emplace_back(q, t.label, node(t.dst, next_k).first);
        }
    }
    p.lts = Lts(p.model_state.size(), 0);
    for (const auto& [a, l, b] : edges) p.lts.add_transition(a, lts.label(l), b);
    return p;
}

std::optional<TestCase> extract_test(const PurposeProduct& product) {
    const auto& lts = product.lts;
    if (lts.num_states() == 0) return std::nullopt;
    kernel::Adjacency adj(lts);
    std::vector<std::optional<const kernel::Transition*>> via(lts.num_states());
    std::vector<bool> seen(lts.num_states(), false);
    std::deque<StateId> todo{lts.initial()};
    seen[lts.initial()] = true;
    while (!todo.empty()) {
        auto s = todo.front();
        todo.pop_front();
        if (product.accepting[s]) {
            TestCase tc;
            tc.end_state = product.model_state[s];
            for (auto cur = s; via[cur]; cur = (*via[cur])->src) tc.witness.push_back(lts.label((*via[cur])->label));
            std::reverse(tc.witness.begin(), tc.witness.end());
            tc.verdict_position = tc.witness.size();
            return tc;
        }
        for (const auto& t : adj.out(s))
            if (!seen[t.dst]) {
                seen[t.dst] = true;
                via[t.dst] = &t;
                todo.push_back(t.dst);
            }
    }
    return std::nullopt;
}

namespace {

bool closes_round(const std::string& gate) { return gate == "TICK" || gate == "ARRIVAL" || gate == "COLLISION"; }

}  // namespace

TestCase complete_round(const Lts& lts, TestCase tc) {
    if (tc.witness.empty() || closes_round(tc.witness.back().gate)) return tc;
    kernel::Adjacency adj(lts);
    std::vector<const kernel::Transition*> via(lts.num_states(), nullptr);
    std::vector<bool> seen(lts.num_states(), false);
    std::deque<StateId> todo{tc.end_state};
    seen[tc.end_state] = true;
    while (!todo.empty()) {
        auto s = todo.front();
        todo.pop_front();
        for (const auto& t : adj.out(s)) {
            if (closes_round(lts.label(t.label).gate)) {
                std::vector<Action> tail{lts.label(t.label)};
                for (auto cur = s; cur != tc.end_state; cur = via[cur]->src) tail.push_back(lts.label(via[cur]->label));
                tc.witness.insert(tc.witness.end(), tail.rbegin(), tail.rend());
                tc.end_state = t.dst;
                return tc;
            }
            if (!seen[t.dst]) {
                seen[t.dst] = true;
                via[t.dst] = &t;
                todo.push_back(t.dst);
            }
        }
    }
    return tc;
}

namespace {

Pos pos_offer(const Action& a, std::size_t i) {
    if (i >= a.offers.size() || !a.offers[i].is(Value::Kind::position))
        throw RoundStructureError("malformed action " + a.to_string());
    return perception::to_pos(a.offers[i]);
}

std::string symbol_offer(const Action& a, std::size_t i) {
    if (i >= a.offers.size() || !a.offers[i].is(Value::Kind::symbol))
        throw RoundStructureError("malformed action " + a.to_string());
    return a.offers[i].name();
}

}  // namespace

SimScenario trace_to_scenario(const std::vector<Action>& trace, std::size_t num_obstacles) {
    SimScenario sim;
    SimTick cur;
    bool closed = false;
    auto fail = [&](std::size_t i, const std::string& what) {
        throw RoundStructureError("action " + std::to_string(i) + " (" + trace[i].to_string() + "): " + what);
    };
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& a = trace[i];
        const auto& g = a.gate;
        if (g != "OBSTACLE_POSITION" && g != "CAR_POSITION" && !closes_round(g)) continue;
        if (closed) fail(i, "follows the terminal action");
        if (g == "OBSTACLE_POSITION") {
            auto kind = symbol_offer(a, 0);
            if (cur.car) fail(i, "obstacle move after the car moved");
            if (cur.obstacles.count(kind)) fail(i, kind + " moves twice in one tick");
            cur.obstacles[kind] = {pos_offer(a, 1), pos_offer(a, 2), symbol_offer(a, 3)};
        } else if (g == "CAR_POSITION") {
            if (cur.car) fail(i, "car moves twice in one tick");
            if (cur.obstacles.size() != num_obstacles) fail(i, "car moves before every obstacle did");
            cur.car = ActorMove{pos_offer(a, 0), pos_offer(a, 1), ""};
        } else if (g == "TICK") {
            if (!cur.car) fail(i, "tick without a car move");
            sim.ticks.push_back(std::move(cur));
            cur = {};
        } else {
            if (g == "COLLISION" && !cur.car) fail(i, "collision without a car move");
            if (!cur.obstacles.empty() || cur.car) {
                if (cur.obstacles.size() != num_obstacles) fail(i, "round ends before every obstacle moved");
                sim.ticks.push_back(std::move(cur));
                cur = {};
            }
            sim.terminal = g;
            if (g == "COLLISION") sim.collided_with = symbol_offer(a, 0);
            closed = true;
        }
    }
    if (!cur.obstacles.empty() || cur.car) throw RoundStructureError("trace ends inside a round");
    return sim;
}

namespace {

struct Expected {
    std::string text;
    std::function<bool(const Action&)> match;
};

std::vector<Expected> dictated(const perception::GridScenario& scn, const SimScenario& sim) {
    std::vector<Expected> out;
    auto pos_text = [](Pos p) { return perception::position_value(p).to_string(); };
    for (std::size_t t = 0; t < sim.ticks.size(); ++t) {
        const auto& tick = sim.ticks[t];
        for (const auto& o : scn.mobiles) {
            auto it = tick.obstacles.find(o.kind);
            if (it == tick.obstacles.end()) continue;
            auto m = it->second;
            out.push_back({"OBSTACLE_POSITION !" + o.kind + " !" + pos_text(m.from) + " !" + pos_text(m.to) + " !" +
                               m.direction,
                           [kind = o.kind, m](const Action& a) {
                               return a.gate == "OBSTACLE_POSITION" && a.offers.size() == 5 &&
                                      a.offers[0].name() == kind && perception::to_pos(a.offers[1]) == m.from &&
                                      perception::to_pos(a.offers[2]) == m.to && a.offers[3].name() == m.direction;
                           }});
        }
        for (const auto& [kind, m] : tick.obstacles) {
            bool known = false;
            for (const auto& o : scn.mobiles) known = known || o.kind == kind;
            if (!known) throw DivergenceError(out.size(), "unknown obstacle " + kind);
        }
        if (tick.car) {
            auto m = *tick.car;
            out.push_back({"CAR_POSITION !" + pos_text(m.from) + " !" + pos_text(m.to), [m](const Action& a) {
                               return a.gate == "CAR_POSITION" && a.offers.size() == 2 &&
                                      perception::to_pos(a.offers[0]) == m.from && perception::to_pos(a.offers[1]) == m.to;
                           }});
        }
        if (t + 1 < sim.ticks.size() || sim.terminal == "END")
            out.push_back({"TICK", [](const Action& a) { return a.gate == "TICK"; }});
    }
    if (sim.terminal == "ARRIVAL") {
        out.push_back({"ARRIVAL", [](const Action& a) { return a.gate == "ARRIVAL"; }});
    } else if (sim.terminal == "COLLISION") {
        out.push_back({"COLLISION !" + sim.collided_with, [kind = sim.collided_with](const Action& a) {
                           return a.gate == "COLLISION" && a.offers.size() == 1 && a.offers[0].name() == kind;
                       }});
    } else if (sim.terminal != "END") {
        throw DivergenceError(out.size(), "unknown terminal " + sim.terminal);
    }
    return out;
}

bool bookkeeping(const std::string& gate) {
    return gate == "GRID_UPDATE" || gate == "GRID_CAR" || gate == "LIDAR_MAP" || gate == "END_OBSTACLE";
}

}  // namespace

std::vector<Action> replay(const perception::GridScenario& scn, const SimScenario& sim, bool expose_grid) {
    auto expected = dictated(scn, sim);
    auto comp = perception::build_grid_composition(scn, expose_grid);
    kernel::StepCache cache(comp);
    auto state = comp.initial_state();
    std::vector<Action> trace;
    std::size_t k = 0, idle = 0;
    while (k < expected.size()) {
        auto steps = kernel::enabled_actions(comp, state, cache);
        const kernel::GlobalStep* pick = nullptr;
        for (const auto& s : steps)
            if (expected[k].match(s.action)) {
                pick = &s;
                break;
            }
        if (pick) {
            ++k;
            idle = 0;
        } else {
            for (const auto& s : steps)
                if (bookkeeping(s.action.gate)) {
                    pick = &s;
                    break;
                }
            // Each bookkeeping action is bounded per round; a long run means we are stuck.
            if (pick && ++idle > 4 * (scn.mobiles.size() + 2)) pick = nullptr;
        }
        if (!pick) {
            std::string enabled;
            for (const auto& s : steps) enabled += (enabled.empty() ? "" : ", ") + s.action.to_string();
            throw DivergenceError(k, "expected " + expected[k].text + "; enabled: " +
                                         (enabled.empty() ? "nothing" : enabled));
        }
        trace.push_back(pick->action);
        state = pick->next;
    }
    return trace;
}

std::vector<std::string> render_frames(const perception::GridScenario& scn, const SimScenario& sim) {
    Pos car = scn.car.start;
    std::vector<Pos> anchors;
    for (const auto& o : scn.mobiles) anchors.push_back(o.anchor);
    std::vector<std::string> frames{perception::render_ascii(perception::world_map(scn, car, anchors))};
    for (const auto& tick : sim.ticks) {
        for (std::size_t i = 0; i < scn.mobiles.size(); ++i) {
            auto it = tick.obstacles.find(scn.mobiles[i].kind);
            if (it != tick.obstacles.end()) anchors[i] = it->second.to;
        }
        if (tick.car) car = tick.car->to;
        frames.push_back(perception::render_ascii(perception::world_map(scn, car, anchors)));
    }
    return frames;
}

namespace {

nlohmann::json move_json(const ActorMove& m) {
    nlohmann::json j{{"from", {m.from.x, m.from.y}},
                     {"to", {m.to.x, m.to.y}},
                     {"delta", {m.to.x - m.from.x, m.to.y - m.from.y}}};
    if (!m.direction.empty()) j["direction"] = m.direction;
    return j;
}

Pos pos_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw std::invalid_argument("position must be [x, y], got " + j.dump());
    return {j[0].get<int>(), j[1].get<int>()};
}

ActorMove move_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("from") || !j.contains("to"))
        throw std::invalid_argument("move needs \"from\" and \"to\"");
    ActorMove m{pos_json(j["from"]), pos_json(j["to"]), ""};
    if (j.contains("direction")) m.direction = j["direction"].get<std::string>();
    return m;
}

}  // namespace

nlohmann::json to_json(const SimScenario& sim) {
    auto ticks = nlohmann::json::array();
    for (const auto& t : sim.ticks) {
        nlohmann::json obstacles = nlohmann::json::object();
        for (const auto& [kind, m] : t.obstacles) obstacles[kind] = move_json(m);
        ticks.push_back({{"obstacles", obstacles}, {"car", t.car ? move_json(*t.car) : nlohmann::json(nullptr)}});
    }
    nlohmann::json j{{"ticks", ticks}, {"terminal", sim.terminal}};
    if (sim.terminal == "COLLISION") j["collided_with"] = sim.collided_with;
    return j;
}

SimScenario sim_from_json(const nlohmann::json& j) {
    try {
        SimScenario sim;
        sim.terminal = j.at("terminal").get<std::string>();
        if (sim.terminal != "ARRIVAL" && sim.terminal != "COLLISION" && sim.terminal != "END")
            throw std::invalid_argument("unknown terminal " + sim.terminal);
        if (sim.terminal == "COLLISION") sim.collided_with = j.at("collided_with").get<std::string>();
        for (const auto& t : j.at("ticks")) {
            SimTick tick;
            for (const auto& [kind, m] : t.at("obstacles").items()) tick.obstacles[kind] = move_from_json(m);
            if (t.contains("car") && !t["car"].is_null()) tick.car = move_from_json(t["car"]);
            sim.ticks.push_back(std::move(tick));
        }
        return sim;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad scenario file: ") + e.what());
    }
}

}  // namespace avm::testgen
