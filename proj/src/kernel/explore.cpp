#include "avmodel/kernel/explore.hpp"

#include <deque>
#include <unordered_map>

namespace avm::kernel {

Lts explore(const Composition& comp, const ExplorationLimits& limits) {
    if (limits.max_states < 1) throw std::invalid_argument("max_states must be at least 1");

    Lts lts;
    StepCache cache(comp);
    std::unordered_map<std::string, StateId> index;

    struct Pending {
        StateId id;
        GlobalState state;
        std::size_t depth;
    };
    std::deque<Pending> queue;

    auto init = comp.initial_state();
    auto key = encode_state(init);
    lts.add_state();
    lts.payload().push_back(key);
    index.emplace(std::move(key), 0);
    queue.push_back({0, std::move(init), 0});

    bool depth_truncated = false;
    while (!queue.empty()) {
        auto current = std::move(queue.front());
        queue.pop_front();

        auto steps = enabled_actions(comp, current.state, cache);
        if (limits.max_depth && current.depth >= limits.max_depth) {
            if (!steps.empty()) depth_truncated = true;
            continue;
        }
        for (auto& gs : steps) {
            if (!gs.action.is_concrete())
                throw std::logic_error("no component supplies a value for " + gs.action.to_string());
            auto next_key = encode_state(gs.next);
            auto it = index.find(next_key);
            StateId target;
            if (it != index.end()) {
                target = it->second;
            } else {
                if (lts.num_states() >= limits.max_states) {
                    auto count = lts.num_states();
                    throw LimitExceeded("state limit of " + std::to_string(limits.max_states) + " reached",
                                        std::move(lts), count);
                }
                target = lts.add_state();
                lts.payload().push_back(next_key);
                index.emplace(std::move(next_key), target);
                queue.push_back({target, std::move(gs.next), current.depth + 1});
            }
            lts.add_transition(current.id, gs.action, target);
        }
    }
    if (depth_truncated) {
        auto count = lts.num_states();
        throw LimitExceeded("depth limit of " + std::to_string(limits.max_depth) + " reached", std::move(lts),
                            count);
    }
    return lts;
}

}  // namespace avm::kernel
