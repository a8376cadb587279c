#pragma once

#include <cstddef>
#include <stdexcept>

#include "avmodel/kernel/composition.hpp"
#include "avmodel/kernel/lts.hpp"

namespace avm::kernel {

struct ExplorationLimits {
    std::size_t max_states = 5'000'000;
    std::size_t max_depth = 0;  // 0 = unlimited
};

/// Thrown when exploration hits a limit; carries what was built so far.
class LimitExceeded : public std::runtime_error {
public:
    LimitExceeded(std::string what, Lts partial, std::size_t count)
        : std::runtime_error(std::move(what)), partial_(std::move(partial)), count_(count) {}
    const Lts& partial() const { return partial_; }
    std::size_t count() const { return count_; }

private:
    Lts partial_;
    std::size_t count_;
};

/// Breadth-first reachability from the initial global state. States are
/// numbered in discovery order and deduplicated by canonical encoding; each
/// state's encoding is kept in the Lts payload.
Lts explore(const Composition& comp, const ExplorationLimits& limits = {});

}  // namespace avm::kernel
