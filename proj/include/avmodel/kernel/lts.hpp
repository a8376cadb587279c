#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avmodel/kernel/action.hpp"

namespace avm::kernel {

using StateId = std::uint32_t;
using LabelId = std::uint32_t;

struct Transition {
    StateId src;
    LabelId label;
    StateId dst;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// Explicit labelled transition system. Labels are interned; transitions
/// are kept in insertion order.
class Lts {
public:
    Lts() = default;
    explicit Lts(std::size_t num_states, StateId initial = 0);

    std::size_t num_states() const { return num_states_; }
    StateId initial() const { return initial_; }
    void set_initial(StateId s);

    StateId add_state();
    LabelId intern(const Action& a);
    std::optional<LabelId> find_label(const Action& a) const;
    void add_transition(StateId src, const Action& a, StateId dst);
    void add_transition(StateId src, LabelId label, StateId dst);

    const std::vector<Action>& labels() const { return labels_; }
    const Action& label(LabelId id) const { return labels_.at(id); }
    const std::vector<Transition>& transitions() const { return transitions_; }
    std::size_t num_transitions() const { return transitions_.size(); }

    /// Opaque per-state encodings of the generating global state, when known.
    std::vector<std::string>& payload() { return payload_; }
    const std::vector<std::string>& payload() const { return payload_; }

private:
    std::size_t num_states_ = 0;
    StateId initial_ = 0;
    std::vector<Action> labels_;
    std::map<Action, LabelId> label_index_;
    std::vector<Transition> transitions_;
    std::vector<std::string> payload_;
};

/// Forward adjacency in compressed form.
class Adjacency {
public:
    explicit Adjacency(const Lts& lts, bool reverse = false);
    std::span<const Transition> out(StateId s) const {
        return {edges_.data() + offsets_[s], offsets_[s + 1] - offsets_[s]};
    }
    /// Position of an edge returned by out() within the flat edge array.
    std::size_t index_of(const Transition& t) const { return static_cast<std::size_t>(&t - edges_.data()); }
    const Transition& edge(std::size_t index) const { return edges_[index]; }

private:
    std::vector<std::size_t> offsets_;
    std::vector<Transition> edges_;
};

/// States without outgoing transitions.
std::vector<StateId> detect_deadlocks(const Lts& lts);

/// Sets of states reachable after following `trace` from the initial state.
/// Empty result means the trace does not replay.
std::vector<StateId> replay_labels(const Lts& lts, const std::vector<Action>& trace);

/// Shortest label sequence from the initial state to `target`.
std::vector<Action> shortest_trace_to(const Lts& lts, StateId target);

}  // namespace avm::kernel
