#include "doctest.h"

#include <random>
#include <sstream>

#include "avmodel/kernel/aut.hpp"
#include "oracles.hpp"

using namespace avm::kernel;

namespace {

std::string to_aut(const Lts& lts) {
    std::ostringstream out;
    export_aut(lts, out);
    return out.str();
}

std::multiset<std::tuple<StateId, std::string, StateId>> edges(const Lts& lts) {
    std::multiset<std::tuple<StateId, std::string, StateId>> out;
    for (const auto& t : lts.transitions()) out.emplace(t.src, lts.label(t.label).to_string(), t.dst);
    return out;
}

}  // namespace

TEST_CASE("export grammar") {
    Lts lts(2, 0);
    lts.add_transition(0, Action("TICK"), 1);
    CHECK(to_aut(lts) == "des (0, 1, 2)\n(0, \"TICK\", 1)\n");
    CHECK(to_aut(Lts(1, 0)) == "des (0, 0, 1)\n");
}

TEST_CASE("transitions are sorted by source, label text, target") {
    Lts lts(3, 0);
    lts.add_transition(1, Action("b"), 0);
    lts.add_transition(0, Action("z"), 2);
    lts.add_transition(0, Action("a"), 2);
    lts.add_transition(0, Action("a"), 1);
    CHECK(to_aut(lts) == "des (0, 4, 3)\n(0, \"a\", 1)\n(0, \"a\", 2)\n(0, \"z\", 2)\n(1, \"b\", 0)\n");
}

TEST_CASE("round trip keeps structured and opaque labels") {
    Lts lts(2, 1);
    lts.add_transition(1, Action("CAR_POSITION", {Value::position(1, 2), Value::position(1, 1)}), 0);
    std::istringstream in(to_aut(lts) + "\n");
    auto back = import_aut(in);
    CHECK(back.initial() == 1);
    CHECK(edges(back) == edges(lts));
    CHECK(back.label(0) == lts.label(0));

    std::istringstream opaque("des (0, 1, 1)\n(0, \"weird  label!\", 0)\n");
    auto o = import_aut(opaque);
    CHECK(o.label(0).to_string() == "weird  label!");

    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
        auto r = oracle::random_lts(rng, 40, 3, 2.0);
        std::istringstream s(to_aut(r));
        auto b = import_aut(s);
        CHECK(b.num_states() == r.num_states());
        CHECK(edges(b) == edges(r));
    }
}

TEST_CASE("malformed input") {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            import_aut(in);
        } catch (const AutParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("dex (0, 0, 1)\n") == 1);
    CHECK(line_of("des (2, 0, 1)\n") == 1);
    CHECK(line_of("des (0, 1, 2)\n(0, \"a\" 1)\n") == 2);
    CHECK(line_of("des (0, 2, 2)\n(0, \"a\", 1)\n") != 0);
    CHECK(line_of("des (0, 1, 2)\n(0, \"a\", 5)\n") == 2);

    Lts bad(1, 0);
    bad.add_transition(0, Action("say\"hi"), 0);
    std::ostringstream out;
    CHECK_THROWS(export_aut(bad, out));
}
