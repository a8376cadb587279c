#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "avmodel/kernel/action.hpp"
#include "avmodel/kernel/value.hpp"

namespace avm::kernel {

/// One local move of a component.
struct Step {
    Action action;
    Value next;
};

using StepFunction = std::function<std::vector<Step>(const Value&)>;

/// A process instance in a parallel composition. Actions on a gate of
/// `sync_set` rendezvous with every other component listing that gate;
/// actions on any other gate interleave. `step` must be pure.
struct Component {
    std::string id;
    std::set<std::string> sync_set;
    Value initial;
    StepFunction step;
};

using GlobalState = std::vector<Value>;

struct GlobalStep {
    Action action;
    GlobalState next;
};

class Composition {
public:
    Composition() = default;
    explicit Composition(std::vector<Component> components) : components_(std::move(components)) {}

    void add(Component c) { components_.push_back(std::move(c)); }
    const std::vector<Component>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }

    GlobalState initial_state() const;

private:
    std::vector<Component> components_;
};

/// Canonical byte encoding of a global state (the dedup key).
std::string encode_state(const GlobalState& state);

/// Memoizes component step results by encoded local state. Not thread-safe;
/// one cache per exploration.
class StepCache {
public:
    explicit StepCache(const Composition& comp) : comp_(&comp), tables_(comp.size()) {}
    const std::vector<Step>& steps(std::size_t component, const Value& local);

private:
    const Composition* comp_;
    std::vector<std::unordered_map<std::string, std::vector<Step>>> tables_;
};

/// Multiway rendezvous semantics: an action on gate g fires iff every
/// component whose sync_set holds g offers a unifiable pattern for it and at
/// least one component does. Synchronized actions advance exactly the
/// participants; other actions advance only their own component. Offers may
/// still contain `?any` when no participant supplied a value; the caller
/// decides whether that is legal at its level.
std::vector<GlobalStep> enabled_actions(const Composition& comp, const GlobalState& state);
std::vector<GlobalStep> enabled_actions(const Composition& comp, const GlobalState& state,
                                        StepCache& cache);

/// Wraps a composition as a single component, giving nested `par` blocks.
/// The local state is the list of child local states.
Component as_component(std::shared_ptr<const Composition> inner, std::string id,
                       std::set<std::string> sync_set);

}  // namespace avm::kernel
