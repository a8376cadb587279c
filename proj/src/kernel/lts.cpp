#include "avmodel/kernel/lts.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

namespace avm::kernel {

Lts::Lts(std::size_t num_states, StateId initial) : num_states_(num_states) { set_initial(initial); }

void Lts::set_initial(StateId s) {
    if (num_states_ > 0 && s >= num_states_) throw std::out_of_range("initial state out of range");
    initial_ = s;
}

StateId Lts::add_state() { return static_cast<StateId>(num_states_++); }

LabelId Lts::intern(const Action& a) {
    auto [it, inserted] = label_index_.try_emplace(a, static_cast<LabelId>(labels_.size()));
    if (inserted) labels_.push_back(a);
    return it->second;
}

std::optional<LabelId> Lts::find_label(const Action& a) const {
    auto it = label_index_.find(a);
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
}

void Lts::add_transition(StateId src, const Action& a, StateId dst) { add_transition(src, intern(a), dst); }

void Lts::add_transition(StateId src, LabelId label, StateId dst) {
    if (src >= num_states_ || dst >= num_states_) throw std::out_of_range("transition endpoint out of range");
    if (label >= labels_.size()) throw std::out_of_range("unknown label id");
    transitions_.push_back({src, label, dst});
}

Adjacency::Adjacency(const Lts& lts, bool reverse) : offsets_(lts.num_states() + 1, 0) {
    for (const auto& t : lts.transitions()) ++offsets_[(reverse ? t.dst : t.src) + 1];
    for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
    edges_.resize(lts.num_transitions());
    auto fill = offsets_;
    for (const auto& t : lts.transitions()) {
        auto key = reverse ? t.dst : t.src;
        edges_[fill[key]++] = reverse ? Transition{t.dst, t.label, t.src} : t;
    }
}

std::vector<StateId> detect_deadlocks(const Lts& lts) {
    std::vector<bool> has_out(lts.num_states(), false);
    for (const auto& t : lts.transitions()) has_out[t.src] = true;
    std::vector<StateId> out;
    for (StateId s = 0; s < lts.num_states(); ++s)
        if (!has_out[s]) out.push_back(s);
    return out;
}

std::vector<StateId> replay_labels(const Lts& lts, const std::vector<Action>& trace) {
    if (lts.num_states() == 0) return {};
    Adjacency adj(lts);
    std::set<StateId> current{lts.initial()};
    for (const auto& a : trace) {
        auto id = lts.find_label(a);
        if (!id) return {};
        std::set<StateId> next;
        for (auto s : current)
            for (const auto& t : adj.out(s))
                if (t.label == *id) next.insert(t.dst);
        if (next.empty()) return {};
        current = std::move(next);
    }
    return {current.begin(), current.end()};
}

std::vector<Action> shortest_trace_to(const Lts& lts, StateId target) {
    constexpr auto unseen = std::numeric_limits<std::size_t>::max();
    Adjacency adj(lts);
    std::vector<std::size_t> via(lts.num_states(), unseen);  // index into transitions
    std::vector<bool> seen(lts.num_states(), false);
    std::deque<StateId> queue{lts.initial()};
    seen[lts.initial()] = true;
    while (!queue.empty() && !seen[target]) {
        auto s = queue.front();
        queue.pop_front();
        for (const auto& t : adj.out(s)) {
            if (seen[t.dst]) continue;
            seen[t.dst] = true;
            via[t.dst] = adj.index_of(t);
            queue.push_back(t.dst);
        }
    }
    if (!seen[target]) throw std::invalid_argument("target state unreachable");
    std::vector<Action> trace;
    std::vector<Transition> path;
    for (auto s = target; s != lts.initial();) {
        const auto& t = adj.edge(via[s]);
        path.push_back(t);
        s = t.src;
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) trace.push_back(lts.label(it->label));
    return trace;
}

}  // namespace avm::kernel
