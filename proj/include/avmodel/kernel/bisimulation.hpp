#pragma once

#include <vector>

#include "avmodel/kernel/lts.hpp"

namespace avm::kernel {

/// Block index per state for the coarsest strong bisimulation. Block ids are
/// numbered by first occurrence in state order.
std::vector<std::uint32_t> bisimulation_partition(const Lts& lts);

/// Quotient by strong bisimulation via signature-based partition refinement.
Lts minimize(const Lts& lts);

}  // namespace avm::kernel
