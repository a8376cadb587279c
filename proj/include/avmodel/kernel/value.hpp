#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace avm::kernel {

/// Data exchanged on gates and held in component local states.
///
/// A tagged union over naturals, booleans, symbols, positions, named records
/// and lists. The `any` kind is a receive wildcard (`?any` in process-algebra
/// notation); it may appear in component offers but never in an Lts label.
/// Values are totally ordered: first by kind, then by contents.
class Value {
public:
    enum class Kind : std::uint8_t { nat, boolean, symbol, position, record, list, any };

    Value() = default;

    static Value nat(std::uint64_t n);
    static Value boolean(bool b);
    static Value symbol(std::string name);
    static Value position(std::int32_t x, std::int32_t y);
    static Value record(std::string name, std::vector<Value> fields);
    static Value list(std::vector<Value> items);
    static Value any();

    Kind kind() const { return kind_; }
    bool is(Kind k) const { return kind_ == k; }
    bool is_concrete() const;

    std::uint64_t as_nat() const;
    bool as_bool() const;
    /// Symbol text, or the constructor name of a record.
    const std::string& name() const;
    std::int32_t x() const;
    std::int32_t y() const;
    /// Record fields or list items.
    const std::vector<Value>& items() const;

    /// Canonical text: decimal naturals, `true`/`false`, symbols verbatim,
    /// `(x,y)` positions, `Name(v1,v2)` records, `{v1,v2}` lists, `?any`.
    std::string to_string() const;

    /// Appends a canonical, prefix-free byte encoding.
    void encode(std::string& out) const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    Kind kind_ = Kind::nat;
    std::uint64_t num_ = 0;  // nat, boolean
    std::int32_t x_ = 0;
    std::int32_t y_ = 0;
    std::string text_;
    std::vector<Value> items_;
};

/// Parses the canonical text form. Throws std::invalid_argument on malformed
/// input; the whole string must be consumed.
Value parse_value(std::string_view text);

}  // namespace avm::kernel
