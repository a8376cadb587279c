#include "avmodel/kernel/aut.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>
#include <tuple>

namespace avm::kernel {

void export_aut(const Lts& lts, std::ostream& sink) {
    std::vector<std::string> texts;
    texts.reserve(lts.labels().size());
    for (const auto& a : lts.labels()) {
        texts.push_back(a.to_string());
        if (texts.back().find('"') != std::string::npos)
            throw std::invalid_argument("label contains a double quote: " + texts.back());
    }
    std::vector<const Transition*> order;
    order.reserve(lts.num_transitions());
    for (const auto& t : lts.transitions()) order.push_back(&t);
    std::sort(order.begin(), order.end(), [&](const Transition* a, const Transition* b) {
        return std::tie(a->src, texts[a->label], a->dst) < std::tie(b->src, texts[b->label], b->dst);
    });

    sink << "des (" << lts.initial() << ", " << lts.num_transitions() << ", " << lts.num_states() << ")\n";
    for (const auto* t : order) sink << '(' << t->src << ", \"" << texts[t->label] << "\", " << t->dst << ")\n";
    if (!sink) throw std::runtime_error("failed to write AUT output");
}

namespace {

class LineCursor {
public:
    LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const { throw AutParseError(line_, what); }

    void skip_spaces() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    void expect(std::string_view token) {
        skip_spaces();
        if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
        pos_ += token.size();
    }

    std::uint64_t number() {
        skip_spaces();
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (ec != std::errc()) fail("expected a number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return v;
    }

    std::string_view quoted() {
        expect("\"");
        auto end = text_.find('"', pos_);
        if (end == std::string_view::npos) fail("unterminated label");
        auto label = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return label;
    }

    void finish() {
        skip_spaces();
        if (pos_ != text_.size()) fail("trailing characters");
    }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

std::string_view strip_cr(const std::string& line) {
    std::string_view v(line);
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    return v;
}

}  // namespace

Lts import_aut(std::istream& source) {
    std::string line;
    if (!std::getline(source, line)) throw AutParseError(1, "missing header");
    LineCursor header(strip_cr(line), 1);
    header.expect("des");
    header.expect("(");
    auto initial = header.number();
    header.expect(",");
    auto num_transitions = header.number();
    header.expect(",");
    auto num_states = header.number();
    header.expect(")");
    header.finish();
    if (num_states == 0 || initial >= num_states) throw AutParseError(1, "initial state out of range");

    Lts lts(num_states, static_cast<StateId>(initial));
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        auto text = strip_cr(line);
        if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
        LineCursor cur(text, line_no);
        cur.expect("(");
        auto src = cur.number();
        cur.expect(",");
        auto label = cur.quoted();
        cur.expect(",");
        auto dst = cur.number();
        cur.expect(")");
        cur.finish();
        if (src >= num_states || dst >= num_states) cur.fail("state index out of range");
        auto action = parse_action(label);
        lts.add_transition(static_cast<StateId>(src), action ? *action : Action(std::string(label)),
                           static_cast<StateId>(dst));
    }
    if (lts.num_transitions() != num_transitions)
        throw AutParseError(line_no, "header declares " + std::to_string(num_transitions) + " transitions, found " +
                                         std::to_string(lts.num_transitions()));
    return lts;
}

}  // namespace avm::kernel
