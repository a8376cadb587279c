#include "avmodel/io/scenario_file.hpp"

#include <fstream>
#include <sstream>

namespace avm::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
    throw InputError((ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& ptr) {
    if (!obj.is_object()) fail(ptr, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(ptr + "/" + key, "missing");
    return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& array(const json& j, const std::string& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array");
    return j;
}

std::int64_t integer(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<std::int64_t>();
}

unsigned natural(const json& j, const std::string& ptr) {
    auto v = integer(j, ptr);
    if (v < 0 || v > 1'000'000) fail(ptr, "expected a natural number");
    return static_cast<unsigned>(v);
}

bool boolean(const json& j, const std::string& ptr) {
    if (!j.is_boolean()) fail(ptr, "expected true or false");
    return j.get<bool>();
}

std::string string(const json& j, const std::string& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
}

template <class T, class F>
T or_default(const json& obj, const std::string& key, const std::string& ptr, T fallback, F read) {
    const json* f = optional_field(obj, key);
    return f ? read(*f, ptr + "/" + key) : fallback;
}

control::ControlScenario parse_graph(const json& j) {
    using namespace control;
    std::vector<std::uint32_t> vertices;
    const auto& vs = array(field(j, "vertices", ""), "/vertices");
    for (std::size_t i = 0; i < vs.size(); ++i) vertices.push_back(natural(vs[i], "/vertices/" + std::to_string(i)));
    std::vector<Edge> edges;
    const auto& es = array(field(j, "edges", ""), "/edges");
    for (std::size_t i = 0; i < es.size(); ++i) {
        auto ptr = "/edges/" + std::to_string(i);
        if (!es[i].is_array() || es[i].size() != 3) fail(ptr, "expected [src, street, dst]");
        edges.push_back({natural(es[i][0], ptr + "/0"), string(es[i][1], ptr + "/1"), natural(es[i][2], ptr + "/2")});
    }
    ControlScenario scn;
    try {
        scn.map = GraphMap(std::move(vertices), std::move(edges));
    } catch (const std::invalid_argument& e) {
        fail("/edges", e.what());
    }
    const auto& car = field(j, "car", "");
    scn.car_position = string(field(car, "position", "/car"), "/car/position");
    scn.destination = string(field(car, "destination", "/car"), "/car/destination");
    if (const json* obs = optional_field(j, "obstacles")) {
        array(*obs, "/obstacles");
        for (std::size_t i = 0; i < obs->size(); ++i) {
            auto ptr = "/obstacles/" + std::to_string(i);
            ObstacleSpec o;
            o.id = "O" + std::to_string(i);
            o.initial_street = string(field((*obs)[i], "position", ptr), ptr + "/position");
            const auto& moves = array(field((*obs)[i], "moves", ptr), ptr + "/moves");
            for (std::size_t k = 0; k < moves.size(); ++k) {
                auto mp = ptr + "/moves/" + std::to_string(k);
                const auto& m = moves[k];
                if (m.is_string() && m == "random") o.moves.push_back(random_op());
                else if (m.is_string() && m == "leave") o.moves.push_back(leave());
                else if (m.is_object() && m.size() == 1 && m.contains("turn"))
                    o.moves.push_back(turned_n(natural(m["turn"], mp + "/turn")));
                else fail(mp, "expected \"random\", \"leave\" or {\"turn\": n}");
            }
            scn.obstacles.push_back(std::move(o));
        }
    }
    try {
        validate(scn);
    } catch (const std::invalid_argument& e) {
        fail("", e.what());
    }
    return scn;
}

std::vector<perception::Direction> directions(const json& j, const std::string& ptr) {
    std::vector<perception::Direction> out;
    array(j, ptr);
    for (std::size_t i = 0; i < j.size(); ++i) {
        auto p = ptr + "/" + std::to_string(i);
        auto d = perception::parse_direction(string(j[i], p));
        if (!d) fail(p, "unknown direction " + j[i].get<std::string>());
        out.push_back(*d);
    }
    return out;
}

perception::ObstacleRec obstacle(const json& j, const std::string& ptr, bool mobile) {
    perception::ObstacleRec o;
    o.kind = string(field(j, "kind", ptr), ptr + "/kind");
    o.anchor = {static_cast<int>(integer(field(j, "x", ptr), ptr + "/x")),
                static_cast<int>(integer(field(j, "y", ptr), ptr + "/y"))};
    o.w = static_cast<int>(or_default(j, "w", ptr, 1u, natural));
    o.h = static_cast<int>(or_default(j, "h", ptr, 1u, natural));
    o.transparent = or_default(j, "transparent", ptr, false, boolean);
    if (mobile) {
        o.speed = or_default(j, "speed", ptr, 1u, natural);
        o.cyclic = or_default(j, "cyclic", ptr, false, boolean);
        o.moves = directions(field(j, "moves", ptr), ptr + "/moves");
    }
    return o;
}

perception::GridScenario parse_grid(const json& j) {
    perception::GridScenario scn;
    scn.width = static_cast<int>(or_default(j, "width", "", 10u, natural));
    scn.height = static_cast<int>(or_default(j, "height", "", 10u, natural));
    if (const json* s = optional_field(j, "static")) {
        array(*s, "/static");
        for (std::size_t i = 0; i < s->size(); ++i)
            scn.statics.push_back(obstacle((*s)[i], "/static/" + std::to_string(i), false));
    }
    if (const json* m = optional_field(j, "mobile")) {
        array(*m, "/mobile");
        for (std::size_t i = 0; i < m->size(); ++i)
            scn.mobiles.push_back(obstacle((*m)[i], "/mobile/" + std::to_string(i), true));
    }
    const auto& car = field(j, "car", "");
    scn.car.start = {static_cast<int>(integer(field(car, "x", "/car"), "/car/x")),
                     static_cast<int>(integer(field(car, "y", "/car"), "/car/y"))};
    scn.car.speed = or_default(car, "speed", "/car", 1u, natural);
    scn.car.cyclic = or_default(car, "cyclic", "/car", false, boolean);
    scn.car.moves = directions(field(car, "moves", "/car"), "/car/moves");
    scn.dist_min = or_default(j, "dist_min", "", 2u, natural);
    try {
        perception::validate(scn);
    } catch (const std::invalid_argument& e) {
        fail("", e.what());
    }
    return scn;
}

}  // namespace

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Turn the byte offset into line:column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

Scenario parse_scenario(const nlohmann::json& j) {
    auto model = string(field(j, "model", ""), "/model");
    if (model == "graph") return parse_graph(j);
    if (model == "grid") return parse_grid(j);
    fail("/model", "expected \"graph\" or \"grid\"");
}

Scenario load_scenario(const std::string& path) {
    try {
        return parse_scenario(read_json_file(path));
    } catch (const InputError& e) {
        if (std::string(e.what()).rfind(path, 0) == 0) throw;
        throw InputError(path + ": " + e.what());
    }
}

nlohmann::json scenario_json(const control::ControlScenario& scn) {
    json edges = json::array();
    for (const auto& e : scn.map.edges()) edges.push_back({e.src, e.street, e.dst});
    json obstacles = json::array();
    for (const auto& o : scn.obstacles) {
        json moves = json::array();
        for (const auto& m : o.moves) {
            if (control::is_turn(m)) moves.push_back({{"turn", m.items()[0].as_nat()}});
            else moves.push_back(m.name());
        }
        obstacles.push_back({{"position", o.initial_street}, {"moves", moves}});
    }
    return {{"model", "graph"},
            {"vertices", scn.map.vertices()},
            {"edges", edges},
            {"car", {{"position", scn.car_position}, {"destination", scn.destination}}},
            {"obstacles", obstacles}};
}

nlohmann::json scenario_json(const perception::GridScenario& scn) {
    auto dirs = [](const std::vector<perception::Direction>& ds) {
        json out = json::array();
        for (auto d : ds) out.push_back(perception::to_string(d));
        return out;
    };
    json statics = json::array(), mobiles = json::array();
    for (const auto& o : scn.statics)
        statics.push_back({{"kind", o.kind}, {"x", o.anchor.x}, {"y", o.anchor.y}, {"w", o.w}, {"h", o.h},
                           {"transparent", o.transparent}});
    for (const auto& o : scn.mobiles) {
        json m{{"kind", o.kind}, {"x", o.anchor.x}, {"y", o.anchor.y}, {"speed", o.speed},
               {"transparent", o.transparent}, {"cyclic", o.cyclic}, {"moves", dirs(o.moves)}};
        if (o.w != 1) m["w"] = o.w;
        if (o.h != 1) m["h"] = o.h;
        mobiles.push_back(m);
    }
    return {{"model", "grid"},
            {"width", scn.width},
            {"height", scn.height},
            {"static", statics},
            {"mobile", mobiles},
            {"car",
             {{"x", scn.car.start.x}, {"y", scn.car.start.y}, {"speed", scn.car.speed}, {"cyclic", scn.car.cyclic},
              {"moves", dirs(scn.car.moves)}}},
            {"dist_min", scn.dist_min}};
}

}  // namespace avm::io
