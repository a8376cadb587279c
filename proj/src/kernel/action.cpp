#include "avmodel/kernel/action.hpp"

#include <cctype>
#include <stdexcept>

namespace avm::kernel {

bool Action::is_concrete() const {
    for (const auto& v : offers)
        if (!v.is_concrete()) return false;
    return true;
}

std::string Action::to_string() const {
    std::string out = gate;
    for (const auto& v : offers) {
        out += " !";
        out += v.to_string();
    }
    return out;
}

std::optional<Action> parse_action(std::string_view text) {
    constexpr std::string_view sep = " !";
    auto cut = text.find(sep);
    std::string_view gate = text.substr(0, cut);
    if (gate.empty()) return std::nullopt;
    for (char c : gate)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return std::nullopt;

    Action action{std::string(gate)};
    while (cut != std::string_view::npos) {
        auto start = cut + sep.size();
        cut = text.find(sep, start);
        auto piece = text.substr(start, cut == std::string_view::npos ? std::string_view::npos : cut - start);
        try {
            action.offers.push_back(parse_value(piece));
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }
    // Only canonical text round-trips; anything else stays opaque.
    if (action.to_string() != text) return std::nullopt;
    return action;
}

namespace {

std::optional<Value> unify_value(const Value& a, const Value& b) {
    if (a.is(Value::Kind::any)) return b;
    if (b.is(Value::Kind::any)) return a;
    if (a.is_concrete() && b.is_concrete()) {
        if (a == b) return a;
        return std::nullopt;
    }
    // Nested wildcards inside records or lists.
    if (a.kind() != b.kind()) return std::nullopt;
    if (a.kind() == Value::Kind::record && a.name() != b.name()) return std::nullopt;
    if (a.items().size() != b.items().size()) return std::nullopt;
    std::vector<Value> items;
    items.reserve(a.items().size());
    for (std::size_t i = 0; i < a.items().size(); ++i) {
        auto u = unify_value(a.items()[i], b.items()[i]);
        if (!u) return std::nullopt;
        items.push_back(std::move(*u));
    }
    return a.kind() == Value::Kind::record ? Value::record(a.name(), std::move(items))
                                           : Value::list(std::move(items));
}

}  // namespace

std::optional<Action> unify(const Action& a, const Action& b) {
    if (a.gate != b.gate || a.offers.size() != b.offers.size()) return std::nullopt;
    Action out{a.gate};
    out.offers.reserve(a.offers.size());
    for (std::size_t i = 0; i < a.offers.size(); ++i) {
        auto u = unify_value(a.offers[i], b.offers[i]);
        if (!u) return std::nullopt;
        out.offers.push_back(std::move(*u));
    }
    return out;
}

}  // namespace avm::kernel
