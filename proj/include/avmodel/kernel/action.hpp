#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avmodel/kernel/value.hpp"

namespace avm::kernel {

/// A gate together with its ordered data offers.
struct Action {
    std::string gate;
    std::vector<Value> offers;

    Action() = default;
    Action(std::string g, std::vector<Value> o = {}) : gate(std::move(g)), offers(std::move(o)) {}

    static Action internal() { return Action("i"); }
    bool is_internal() const { return gate == "i" && offers.empty(); }
    bool is_concrete() const;

    /// `GATE !v1 !v2 ...`
    std::string to_string() const;

    friend bool operator==(const Action&, const Action&) = default;
    friend std::strong_ordering operator<=>(const Action& a, const Action& b) {
        if (auto c = a.gate.compare(b.gate) <=> 0; c != 0) return c;
        return std::lexicographical_compare_three_way(a.offers.begin(), a.offers.end(),
                                                      b.offers.begin(), b.offers.end());
    }
};

/// Parses a canonical label. Returns nullopt when the text is not in
/// canonical form (the caller then keeps it as an opaque label).
std::optional<Action> parse_action(std::string_view text);

/// Unifies two offer patterns position-wise (`?any` matches anything).
/// Returns nullopt on gate, arity or value mismatch.
std::optional<Action> unify(const Action& a, const Action& b);

}  // namespace avm::kernel
