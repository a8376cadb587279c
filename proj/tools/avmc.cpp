// avmc: explore, minimize, check, testgen and render for the two vehicle models.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "avmodel/io/scenario_file.hpp"
#include "avmodel/kernel/aut.hpp"
#include "avmodel/kernel/bisimulation.hpp"
#include "avmodel/kernel/explore.hpp"
#include "avmodel/properties/checks.hpp"
#include "avmodel/testgen/testgen.hpp"

using namespace avm;

namespace {

enum Exit { ok = 0, negative = 1, bad_input = 2, limit = 3 };

kernel::Composition compose(const io::Scenario& scn, bool expose_grid) {
    if (auto* g = std::get_if<perception::GridScenario>(&scn)) return perception::build_grid_composition(*g, expose_grid);
    return control::build_control_composition(std::get<control::ControlScenario>(scn));
}

std::size_t obstacle_count(const io::Scenario& scn) {
    if (auto* g = std::get_if<perception::GridScenario>(&scn)) return g->mobiles.size();
    return std::get<control::ControlScenario>(scn).obstacles.size();
}

void write_aut(const kernel::Lts& lts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io::InputError(path + ": cannot write");
    kernel::export_aut(lts, out);
}

kernel::Lts read_aut(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io::InputError(path + ": cannot open");
    try {
        return kernel::import_aut(in);
    } catch (const kernel::AutParseError& e) {
        throw io::InputError(path + ": " + e.what());
    }
}

void print_size(const char* tag, const kernel::Lts& lts) {
    std::cout << tag << "states=" << lts.num_states() << " transitions=" << lts.num_transitions() << "\n";
}

int explore_cmd(const std::string& scenario, const std::string& out, std::size_t max_states, std::size_t max_depth,
                bool expose) {
    auto scn = io::load_scenario(scenario);
    auto comp = compose(scn, expose);
    auto t0 = std::chrono::steady_clock::now();
    kernel::ExplorationLimits lim;
    if (max_states) lim.max_states = max_states;
    lim.max_depth = max_depth;
    try {
        auto lts = kernel::explore(comp, lim);
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        write_aut(lts, out);
        print_size("", lts);
        std::cerr << "time=" << dt.count() << "s\n";
        return ok;
    } catch (const kernel::LimitExceeded& e) {
        write_aut(e.partial(), out);
        print_size("", e.partial());
        std::cerr << "error: " << e.what() << " (partial LTS written)\n";
        return limit;
    }
}

int minimize_cmd(const std::string& in, const std::string& out) {
    auto lts = read_aut(in);
    auto small = kernel::minimize(lts);
    write_aut(small, out);
    print_size("before: ", lts);
    print_size("after: ", small);
    return ok;
}

int check_cmd(const std::string& lts_path, const std::string& property, const std::string& scenario) {
    auto lts = read_aut(lts_path);
    auto scn = io::load_scenario(scenario);
    properties::Verdict v;
    if (property == "consistent-moves") {
        auto* graph = std::get_if<control::ControlScenario>(&scn);
        if (!graph) throw io::InputError("consistent-moves needs a graph scenario");
        v = properties::check_consistent_updates(lts, graph->map);
    } else if (property == "inevitable-termination") {
        v = properties::check_inevitable_termination(lts, obstacle_count(scn));
    } else {
        v = properties::check_deadlock_freedom(lts, obstacle_count(scn));
    }
    std::cout << properties::verdict_json(v) << "\n";
    return v.passed() ? ok : negative;
}

int testgen_cmd(const std::string& scenario, const std::string& purpose_path, const std::string& out,
                std::size_t max_states, bool expose) {
    auto scn = io::load_scenario(scenario);
    auto* grid = std::get_if<perception::GridScenario>(&scn);
    if (!grid) throw io::InputError("testgen needs a grid scenario");
    testgen::TestPurpose tp;
    try {
        tp = testgen::parse_purpose(io::read_json_file(purpose_path));
    } catch (const testgen::PurposeError& e) {
        throw io::InputError(purpose_path + ": " + e.what());
    }
    kernel::ExplorationLimits lim;
    if (max_states) lim.max_states = max_states;
    kernel::Lts lts;
    try {
        lts = kernel::explore(perception::build_grid_composition(*grid, expose), lim);
    } catch (const kernel::LimitExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return limit;
    }
    for (const auto& g : testgen::unknown_gates(lts, tp))
        std::cerr << "warning: gate " << g << " never occurs; its pattern cannot match\n";
    auto tc = testgen::extract_test(testgen::product_with_purpose(lts, tp));
    if (!tc) {
        std::cout << "inconclusive\n";
        return negative;
    }
    auto sim = testgen::trace_to_scenario(testgen::complete_round(lts, *tc).witness, grid->mobiles.size());
    std::ofstream f(out, std::ios::binary);
    if (!f) throw io::InputError(out + ": cannot write");
    f << testgen::to_json(sim).dump(2) << "\n";
    std::cout << "witness=" << tc->witness.size() << " ticks=" << sim.ticks.size() << " terminal=" << sim.terminal
              << (sim.collided_with.empty() ? "" : " " + sim.collided_with) << "\n";
    return ok;
}

int render_cmd(const std::string& scenario, const std::string& sim_path) {
    auto scn = io::load_scenario(scenario);
    auto* grid = std::get_if<perception::GridScenario>(&scn);
    if (!grid) throw io::InputError("render needs a grid scenario");
    auto sim = testgen::sim_from_json(io::read_json_file(sim_path));
    auto frames = testgen::render_frames(*grid, sim);
    for (std::size_t i = 0; i < frames.size(); ++i) std::cout << "tick " << i << "\n" << frames[i] << "\n";
    std::cout << "terminal " << sim.terminal << (sim.collided_with.empty() ? "" : " " + sim.collided_with) << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit-state models of an autonomous vehicle and its environment"};
    app.require_subcommand(1);

    std::string scenario, out, in, lts_path, property, purpose, sim;
    std::size_t max_states = 0, max_depth = 0;
    bool expose = false;

    auto* ex = app.add_subcommand("explore", "Generate the LTS of a scenario as AUT");
    ex->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    ex->add_option("--out", out, "Output AUT file")->required();
    ex->add_option("--max-states", max_states, "State limit");
    ex->add_option("--max-depth", max_depth, "BFS depth limit");
    ex->add_flag("--expose-grid", expose, "Carry the perception grid in LIDAR_MAP labels");

    auto* mn = app.add_subcommand("minimize", "Strong bisimulation quotient of an AUT file");
    mn->add_option("input", in, "Input AUT")->required()->check(CLI::ExistingFile);
    mn->add_option("output", out, "Output AUT")->required();

    auto* ck = app.add_subcommand("check", "Check a property and print a JSON verdict");
    ck->add_option("--lts", lts_path, "AUT file")->required()->check(CLI::ExistingFile);
    ck->add_option("--property", property, "Property")
        ->required()
        ->check(CLI::IsMember({"consistent-moves", "inevitable-termination", "deadlock"}));
    ck->add_option("--scenario", scenario, "Scenario the LTS was generated from")
        ->required()
        ->check(CLI::ExistingFile);

    auto* tg = app.add_subcommand("testgen", "Extract a witness for a test purpose as a simulator scenario");
    tg->add_option("--scenario", scenario, "Grid scenario JSON")->required()->check(CLI::ExistingFile);
    tg->add_option("--purpose", purpose, "Purpose JSON")->required()->check(CLI::ExistingFile);
    tg->add_option("--out", out, "Output scenario JSON")->required();
    tg->add_option("--max-states", max_states, "State limit");
    tg->add_flag("--expose-grid", expose, "Carry the perception grid in LIDAR_MAP labels");

    auto* rd = app.add_subcommand("render", "Print one ASCII map per tick of a simulator scenario");
    rd->add_option("--scenario", scenario, "Grid scenario JSON")->required()->check(CLI::ExistingFile);
    rd->add_option("--sim", sim, "Simulator scenario JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? ok : bad_input;
    }

    try {
        if (*ex) return explore_cmd(scenario, out, max_states, max_depth, expose);
        if (*mn) return minimize_cmd(in, out);
        if (*ck) return check_cmd(lts_path, property, scenario);
        if (*tg) return testgen_cmd(scenario, purpose, out, max_states, expose);
        if (*rd) return render_cmd(scenario, sim);
    } catch (const kernel::LimitExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return limit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    }
    return bad_input;
}
