#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "avmodel/control/model.hpp"
#include "avmodel/perception/model.hpp"

namespace avm::io {

/// Malformed or schema-invalid input. The message carries a line/column or
/// a JSON pointer.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Scenario = std::variant<control::ControlScenario, perception::GridScenario>;

/// Parses a file, reporting syntax errors with line and column.
nlohmann::json read_json_file(const std::string& path);

/// `model` selects the form: "graph" or "grid". Graph obstacles are named
/// O0, O1, ... in file order.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

nlohmann::json scenario_json(const control::ControlScenario& scn);
nlohmann::json scenario_json(const perception::GridScenario& scn);

}  // namespace avm::io
