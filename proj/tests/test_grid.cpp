#include "doctest.h"

#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "avmodel/perception/grid.hpp"
#include "grid_oracle.hpp"

using namespace avm::perception;
using namespace grid_oracle;

namespace {

void check_ticks(const std::vector<OracleWorld>& ticks) {
    for (const auto& r : run_ticks(ticks)) {
        CHECK(absolute(r.grid) == r.expected);
        CHECK(r.grid.at(2, 2) == 'C');
    }
}

}  // namespace

TEST_CASE("direction names round-trip") {
    for (auto d : {Direction::up, Direction::down, Direction::left, Direction::right, Direction::none,
                   Direction::random})
        CHECK(parse_direction(to_string(d)) == d);
    CHECK_FALSE(parse_direction("north"));
}

TEST_CASE("step_position follows the screen convention") {
    CHECK(step_position({6, 7}, Direction::up, 1, 10, 10) == Pos{6, 6});
    CHECK(step_position({6, 7}, Direction::down, 2, 10, 10) == Pos{6, 9});
    CHECK(step_position({6, 7}, Direction::left, 3, 10, 10) == Pos{3, 7});
    CHECK(step_position({6, 7}, Direction::right, 3, 10, 10) == Pos{9, 7});
    CHECK(step_position({4, 4}, Direction::none, 5, 10, 10) == Pos{4, 4});
    CHECK_FALSE(step_position({0, 0}, Direction::up, 1, 10, 10));
    CHECK_FALSE(step_position({9, 0}, Direction::right, 1, 10, 10));
    CHECK_THROWS(step_position({1, 1}, Direction::random, 1, 10, 10));
}

TEST_CASE("map construction") {
    GridMap empty;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) CHECK(empty.at({x, y}).kind == GridMap::CellKind::free);

    GridMap m;
    int b = m.add_obstacle({.kind = "Building", .anchor = {0, 0}, .w = 3, .h = 3, .moves = {}});
    int car = m.add_obstacle({.kind = "Other_Car", .anchor = {6, 7}, .speed = 1, .moves = {Direction::up}});
    CHECK(m.at({6, 7}).kind == GridMap::CellKind::occupied);
    CHECK(m.at({6, 7}).owner == car);
    CHECK(m.at({2, 2}).owner == b);
    CHECK(m.at({3, 3}).kind == GridMap::CellKind::free);

    try {
        m.add_obstacle({.kind = "Pedestrian", .anchor = {2, 1}, .moves = {}});
        FAIL("overlap accepted");
    } catch (const std::invalid_argument& e) {
        std::string what = e.what();
        CHECK(what.find("Pedestrian") != std::string::npos);
        CHECK(what.find("Building") != std::string::npos);
    }
    CHECK_THROWS_AS(m.add_obstacle({.kind = "Wide", .anchor = {8, 5}, .w = 3, .moves = {}}), std::invalid_argument);

    m.place_car({5, 5});
    CHECK(m.at({5, 5}).kind == GridMap::CellKind::car_pos);
    m.place_car({5, 4});
    CHECK(m.at({5, 5}).kind == GridMap::CellKind::free);
    CHECK(m.at({5, 4}).kind == GridMap::CellKind::car_pos);

    m.move_obstacle(car, {6, 6});
    CHECK(m.at({6, 7}).kind == GridMap::CellKind::free);
    CHECK(m.at({6, 6}).owner == car);
}

TEST_CASE("valid_move") {
    GridMap m;
    m.add_obstacle({.kind = "Building", .anchor = {0, 0}, .w = 3, .h = 3, .moves = {}});
    int ped = m.add_obstacle({.kind = "Pedestrian", .anchor = {3, 1}, .speed = 1, .transparent = true, .moves = {}});
    int bus = m.add_obstacle({.kind = "Bus", .anchor = {5, 5}, .w = 2, .h = 1, .speed = 1, .moves = {}});
    m.place_car({5, 6});

    CHECK_FALSE(valid_move(m, ped, Direction::left, 1));  // building
    CHECK(valid_move(m, ped, Direction::right, 1));
    CHECK(valid_move(m, ped, Direction::up, 1));
    CHECK_FALSE(valid_move(m, ped, Direction::up, 2));  // off the map
    CHECK(valid_move(m, ped, Direction::none, 1));

    CHECK(valid_move(m, bus, Direction::right, 1));  // overlaps only itself
    CHECK(valid_move(m, bus, Direction::left, 1));
    CHECK_FALSE(valid_move(m, bus, Direction::down, 1));  // the car
    CHECK_FALSE(valid_move(m, bus, Direction::right, 4));  // right edge leaves the map
    CHECK(valid_move(m, bus, Direction::right, 3));
}

TEST_CASE("move_allowed and Manhattan distance") {
    CHECK(manhattan({5, 5}, {9, 9}) == 8);
    CHECK(move_allowed({5, 5}, {9, 9}, Direction::up, 1, 3));
    CHECK_FALSE(move_allowed({5, 5}, {9, 9}, Direction::down, 1, 3));
    CHECK_FALSE(move_allowed({5, 5}, {9, 9}, Direction::none, 1, 3));
    for (auto d : {Direction::up, Direction::down, Direction::left, Direction::right, Direction::none})
        CHECK(move_allowed({5, 5}, {6, 5}, d, 1, 3));

    // Against plain arithmetic over a window of positions.
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> c(-12, 12);
    std::uniform_int_distribution<unsigned> sp(0, 3), dm(0, 4);
    for (int i = 0; i < 2000; ++i) {
        Pos car{c(rng), c(rng)}, ob{c(rng), c(rng)};
        unsigned speed = sp(rng), dist = dm(rng);
        int before = std::abs(car.x - ob.x) + std::abs(car.y - ob.y);
        for (auto d : {Direction::up, Direction::down, Direction::left, Direction::right, Direction::none}) {
            int dx = d == Direction::left ? -1 : d == Direction::right ? 1 : 0;
            int dy = d == Direction::up ? -1 : d == Direction::down ? 1 : 0;
            int k = static_cast<int>(speed);
            int after = std::abs(car.x - (ob.x + dx * k)) + std::abs(car.y - (ob.y + dy * k));
            bool expect = before <= static_cast<int>(dist) || after < before;
            CHECK(move_allowed(car, ob, d, speed, dist) == expect);
        }
    }
}

TEST_CASE("supercover matches closed-square intersection") {
    CHECK(supercover({0, 0}, {3, 0}) == std::vector<Pos>{{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    auto diag = supercover({0, 0}, {2, 2});
    CHECK(diag.size() == 7);  // both neighbours at each corner

    std::mt19937 rng(11);
    std::uniform_int_distribution<int> c(-6, 6);
    for (int i = 0; i < 500; ++i) {
        Pos a{c(rng), c(rng)}, b{c(rng), c(rng)};
        std::set<std::pair<int, int>> got, want;
        for (auto p : supercover(a, b)) got.insert({p.x, p.y});
        for (int y = -7; y <= 7; ++y)
            for (int x = -7; x <= 7; ++x)
                if (segment_hits_cell(a, b, {x, y})) want.insert({x, y});
        CHECK(got == want);
    }
}

TEST_CASE("perception grid cases") {
    auto cases = hand_cases();
    CHECK(cases.size() >= 12);
    for (const auto& c : cases) {
        CAPTURE(c.name);
        CHECK(check_case(c) == "");
    }
}

TEST_CASE("random maps agree with the ray-cast oracle") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> coord(0, 9), ext(1, 2), coin(0, 1), step(-1, 1), nobs(0, 6);
    for (int round = 0; round < 300; ++round) {
        OracleWorld a;
        a.car = {coord(rng), coord(rng)};
        int k = nobs(rng);
        for (int i = 0; i < k; ++i) {
            Rect r{coord(rng), coord(rng), ext(rng), ext(rng), coin(rng) == 1};
            OracleWorld probe = a;
            probe.rects.push_back(r);
            bool ok = r.x + r.w <= 10 && r.y + r.h <= 10;
            for (int y = r.y; ok && y < r.y + r.h; ++y)
                for (int x = r.x; ok && x < r.x + r.w; ++x)
                    if (Pos{x, y} == a.car || a.owner({x, y})) ok = false;
            if (ok) a = probe;
        }
        // Second tick: car and obstacles shift by at most one cell where free.
        OracleWorld b = a;
        Pos nc{a.car.x + step(rng), a.car.y + step(rng)};
        if (b.on_map(nc) && !b.owner(nc)) b.car = nc;
        for (auto& r : b.rects) {
            Rect moved = r;
            moved.x += step(rng);
            moved.y += step(rng);
            bool ok = moved.x >= 0 && moved.y >= 0 && moved.x + moved.w <= 10 && moved.y + moved.h <= 10;
            for (int y = moved.y; ok && y < moved.y + moved.h; ++y)
                for (int x = moved.x; ok && x < moved.x + moved.w; ++x) {
                    auto* o = b.owner({x, y});
                    if (Pos{x, y} == b.car || (o && o != &r)) ok = false;
                }
            if (ok) r = moved;
        }
        check_ticks({a, b});
    }
}

TEST_CASE("ascii rendering") {
    GridMap m(4, 2);
    m.add_obstacle({.kind = "Wall", .anchor = {0, 0}, .w = 2, .moves = {}});
    m.add_obstacle({.kind = "Pedestrian", .anchor = {3, 1}, .transparent = true, .moves = {}});
    m.place_car({2, 1});
    CHECK(render_ascii(m) == "##..\n..Ct\n");
    m.place_car({3, 1});
    CHECK(render_ascii(m) == "##..\n...X\n");
}
