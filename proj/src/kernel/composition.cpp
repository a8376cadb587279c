#include "avmodel/kernel/composition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace avm::kernel {

GlobalState Composition::initial_state() const {
    GlobalState s;
    s.reserve(components_.size());
    for (const auto& c : components_) s.push_back(c.initial);
    return s;
}

std::string encode_state(const GlobalState& state) {
    std::string out;
    for (const auto& v : state) v.encode(out);
    return out;
}

const std::vector<Step>& StepCache::steps(std::size_t component, const Value& local) {
    std::string key;
    local.encode(key);
    auto& table = tables_[component];
    auto it = table.find(key);
    if (it != table.end()) return it->second;
    auto steps = comp_->components()[component].step(local);
    // Sorted steps let enabled_actions binary-search concrete offers.
    std::stable_sort(steps.begin(), steps.end(),
                     [](const Step& a, const Step& b) { return a.action < b.action; });
    return table.emplace(std::move(key), std::move(steps)).first->second;
}

namespace {

struct Candidate {
    Action pattern;
    std::vector<const Value*> nexts;  // one per participant, in participant order
};

/// Steps of one participant on one gate, split for lookup.
struct GateOffers {
    std::vector<const Step*> concrete;  // sorted by action
    std::vector<const Step*> wildcard;
    std::size_t size() const { return concrete.size() + wildcard.size(); }
};

GateOffers offers_on(const std::vector<Step>& steps, const std::string& gate) {
    GateOffers out;
    auto lo = std::lower_bound(steps.begin(), steps.end(), gate,
                               [](const Step& s, const std::string& g) { return s.action.gate < g; });
    for (auto it = lo; it != steps.end() && it->action.gate == gate; ++it) {
        if (it->action.is_concrete())
            out.concrete.push_back(&*it);
        else
            out.wildcard.push_back(&*it);
    }
    return out;
}

void extend(const Candidate& cand, const Step& step, std::vector<Candidate>& out) {
    auto u = unify(cand.pattern, step.action);
    if (!u) return;
    Candidate next{std::move(*u), cand.nexts};
    next.nexts.push_back(&step.next);
    out.push_back(std::move(next));
}

}  // namespace

std::vector<GlobalStep> enabled_actions(const Composition& comp, const GlobalState& state) {
    StepCache cache(comp);
    return enabled_actions(comp, state, cache);
}

std::vector<GlobalStep> enabled_actions(const Composition& comp, const GlobalState& state,
                                        StepCache& cache) {
    const auto& components = comp.components();
    if (state.size() != components.size())
        throw std::invalid_argument("global state arity does not match the composition");

    std::vector<const std::vector<Step>*> local_steps(components.size());
    for (std::size_t c = 0; c < components.size(); ++c) local_steps[c] = &cache.steps(c, state[c]);

    std::map<std::string, std::vector<std::size_t>> participants;
    for (std::size_t c = 0; c < components.size(); ++c)
        for (const auto& g : components[c].sync_set) participants[g].push_back(c);

    std::vector<GlobalStep> result;

    for (const auto& [gate, members] : participants) {
        std::vector<GateOffers> offers;
        offers.reserve(members.size());
        bool blocked = false;
        for (auto c : members) {
            offers.push_back(offers_on(*local_steps[c], gate));
            if (offers.back().size() == 0) {
                blocked = true;
                break;
            }
        }
        if (blocked) continue;

        // Start from the participant with the fewest offers.
        std::vector<std::size_t> order(members.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](auto a, auto b) { return offers[a].size() < offers[b].size(); });

        std::vector<Candidate> cands;
        {
            const auto& first = offers[order[0]];
            for (const auto* s : first.concrete) cands.push_back({s->action, {&s->next}});
            for (const auto* s : first.wildcard) cands.push_back({s->action, {&s->next}});
        }
        for (std::size_t k = 1; k < order.size() && !cands.empty(); ++k) {
            const auto& part = offers[order[k]];
            std::vector<Candidate> next;
            for (const auto& cand : cands) {
                if (cand.pattern.is_concrete()) {
                    auto [lo, hi] = std::equal_range(
                        part.concrete.begin(), part.concrete.end(), cand.pattern,
                        [](const auto& a, const auto& b) {
                            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, Action>)
                                return a < b->action;
                            else
                                return a->action < b;
                        });
                    for (auto it = lo; it != hi; ++it) extend(cand, **it, next);
                } else {
                    for (const auto* s : part.concrete) extend(cand, *s, next);
                }
                for (const auto* s : part.wildcard) extend(cand, *s, next);
            }
            cands = std::move(next);
        }

        for (auto& cand : cands) {
            GlobalState succ = state;
            for (std::size_t k = 0; k < order.size(); ++k) succ[members[order[k]]] = *cand.nexts[k];
            result.push_back({std::move(cand.pattern), std::move(succ)});
        }
    }

    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& sync = components[c].sync_set;
        for (const auto& s : *local_steps[c]) {
            if (sync.count(s.action.gate)) continue;
            GlobalState succ = state;
            succ[c] = s.next;
            result.push_back({s.action, std::move(succ)});
        }
    }
    return result;
}

Component as_component(std::shared_ptr<const Composition> inner, std::string id,
                       std::set<std::string> sync_set) {
    Component c;
    c.id = std::move(id);
    c.sync_set = std::move(sync_set);
    c.initial = Value::list(inner->initial_state());
    c.step = [inner](const Value& local) {
        std::vector<Step> out;
        for (auto& gs : enabled_actions(*inner, local.items()))
            out.push_back({std::move(gs.action), Value::list(std::move(gs.next))});
        return out;
    };
    return c;
}

}  // namespace avm::kernel
