#include "avmodel/kernel/value.hpp"

#include <cctype>
#include <stdexcept>

namespace avm::kernel {

Value Value::nat(std::uint64_t n) {
    Value v;
    v.kind_ = Kind::nat;
    v.num_ = n;
    return v;
}

Value Value::boolean(bool b) {
    Value v;
    v.kind_ = Kind::boolean;
    v.num_ = b ? 1 : 0;
    return v;
}

Value Value::symbol(std::string name) {
    Value v;
    v.kind_ = Kind::symbol;
    v.text_ = std::move(name);
    return v;
}

Value Value::position(std::int32_t x, std::int32_t y) {
    Value v;
    v.kind_ = Kind::position;
    v.x_ = x;
    v.y_ = y;
    return v;
}

Value Value::record(std::string name, std::vector<Value> fields) {
    Value v;
    v.kind_ = Kind::record;
    v.text_ = std::move(name);
    v.items_ = std::move(fields);
    return v;
}

Value Value::list(std::vector<Value> items) {
    Value v;
    v.kind_ = Kind::list;
    v.items_ = std::move(items);
    return v;
}

Value Value::any() {
    Value v;
    v.kind_ = Kind::any;
    return v;
}

bool Value::is_concrete() const {
    if (kind_ == Kind::any) return false;
    for (const auto& item : items_)
        if (!item.is_concrete()) return false;
    return true;
}

std::uint64_t Value::as_nat() const {
    if (kind_ != Kind::nat) throw std::logic_error("value is not a natural: " + to_string());
    return num_;
}

bool Value::as_bool() const {
    if (kind_ != Kind::boolean) throw std::logic_error("value is not a boolean: " + to_string());
    return num_ != 0;
}

const std::string& Value::name() const {
    if (kind_ != Kind::symbol && kind_ != Kind::record)
        throw std::logic_error("value has no name: " + to_string());
    return text_;
}

std::int32_t Value::x() const {
    if (kind_ != Kind::position) throw std::logic_error("value is not a position: " + to_string());
    return x_;
}

std::int32_t Value::y() const {
    if (kind_ != Kind::position) throw std::logic_error("value is not a position: " + to_string());
    return y_;
}

const std::vector<Value>& Value::items() const { return items_; }

namespace {

void append_items(std::string& out, const std::vector<Value>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i].to_string();
    }
}

void put_u64(std::string& out, std::uint64_t n) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
}

}  // namespace

std::string Value::to_string() const {
    std::string out;
    switch (kind_) {
        case Kind::nat: return std::to_string(num_);
        case Kind::boolean: return num_ ? "true" : "false";
        case Kind::symbol: return text_;
        case Kind::position:
            return "(" + std::to_string(x_) + "," + std::to_string(y_) + ")";
        case Kind::record:
            out = text_ + "(";
            append_items(out, items_);
            out += ')';
            return out;
        case Kind::list:
            out = "{";
            append_items(out, items_);
            out += '}';
            return out;
        case Kind::any: return "?any";
    }
    return out;
}

void Value::encode(std::string& out) const {
    out.push_back(static_cast<char>(kind_));
    switch (kind_) {
        case Kind::nat:
        case Kind::boolean: put_u64(out, num_); break;
        case Kind::position:
            put_u64(out, static_cast<std::uint32_t>(x_) | (std::uint64_t{static_cast<std::uint32_t>(y_)} << 32));
            break;
        case Kind::symbol:
            put_u64(out, text_.size());
            out += text_;
            break;
        case Kind::record:
            put_u64(out, text_.size());
            out += text_;
            [[fallthrough]];
        case Kind::list:
            put_u64(out, items_.size());
            for (const auto& item : items_) item.encode(out);
            break;
        case Kind::any: break;
    }
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    switch (a.kind_) {
        case Value::Kind::nat:
        case Value::Kind::boolean: return a.num_ <=> b.num_;
        case Value::Kind::position:
            if (auto c = a.x_ <=> b.x_; c != 0) return c;
            return a.y_ <=> b.y_;
        case Value::Kind::symbol: return a.text_.compare(b.text_) <=> 0;
        case Value::Kind::record:
            if (auto c = a.text_.compare(b.text_) <=> 0; c != 0) return c;
            [[fallthrough]];
        case Value::Kind::list:
            return std::lexicographical_compare_three_way(a.items_.begin(), a.items_.end(),
                                                          b.items_.begin(), b.items_.end());
        case Value::Kind::any: return std::strong_ordering::equal;
    }
    return std::strong_ordering::equal;
}

namespace {

class ValueParser {
public:
    explicit ValueParser(std::string_view text) : text_(text) {}

    Value parse_all() {
        Value v = parse();
        if (pos_ != text_.size()) fail("trailing characters");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("malformed value '" + std::string(text_) + "': " + what +
                                    " at offset " + std::to_string(pos_));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::int64_t parse_int() {
        bool negative = false;
        if (peek() == '-') {
            negative = true;
            ++pos_;
        }
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected digit");
        std::int64_t n = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) n = n * 10 + (text_[pos_++] - '0');
        return negative ? -n : n;
    }

    std::vector<Value> parse_items(char close) {
        std::vector<Value> items;
        if (peek() == close) {
            ++pos_;
            return items;
        }
        for (;;) {
            items.push_back(parse());
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect(close);
            return items;
        }
    }

    Value parse() {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t n = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) n = n * 10 + (text_[pos_++] - '0');
            return Value::nat(n);
        }
        if (c == '(') {
            ++pos_;
            auto x = parse_int();
            expect(',');
            auto y = parse_int();
            expect(')');
            return Value::position(static_cast<std::int32_t>(x), static_cast<std::int32_t>(y));
        }
        if (c == '{') {
            ++pos_;
            return Value::list(parse_items('}'));
        }
        if (c == '?') {
            if (text_.substr(pos_, 4) != "?any") fail("expected ?any");
            pos_ += 4;
            return Value::any();
        }
        if (ident_start(c)) {
            std::size_t start = pos_;
            while (ident_char(peek())) ++pos_;
            std::string ident(text_.substr(start, pos_ - start));
            if (peek() == '(') {
                ++pos_;
                return Value::record(std::move(ident), parse_items(')'));
            }
            if (ident == "true") return Value::boolean(true);
            if (ident == "false") return Value::boolean(false);
            return Value::symbol(std::move(ident));
        }
        fail("unexpected character");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Value parse_value(std::string_view text) { return ValueParser(text).parse_all(); }

}  // namespace avm::kernel
