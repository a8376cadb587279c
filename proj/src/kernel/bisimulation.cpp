#include "avmodel/kernel/bisimulation.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace avm::kernel {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

std::vector<std::uint32_t> bisimulation_partition(const Lts& lts) {
    const auto n = lts.num_states();
    std::vector<std::uint32_t> block(n, 0);
    std::size_t num_blocks = n ? 1 : 0;
    Adjacency adj(lts);

    std::vector<std::pair<LabelId, std::uint32_t>> sig;
    std::string key;
    for (;;) {
        std::unordered_map<std::string, std::uint32_t> ids;
        std::vector<std::uint32_t> next(n);
        for (StateId s = 0; s < n; ++s) {
            sig.clear();
            for (const auto& t : adj.out(s)) sig.emplace_back(t.label, block[t.dst]);
            std::sort(sig.begin(), sig.end());
            sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
            key.clear();
            put_u32(key, block[s]);
            for (const auto& [label, b] : sig) {
                put_u32(key, label);
                put_u32(key, b);
            }
            auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(ids.size()));
            next[s] = it->second;
        }
        block = std::move(next);
        // Refinement only splits blocks, so an unchanged count is a fixpoint.
        if (ids.size() == num_blocks) break;
        num_blocks = ids.size();
    }
    return block;
}

Lts minimize(const Lts& lts) {
    auto block = bisimulation_partition(lts);
    std::size_t num_blocks = 0;
    for (auto b : block) num_blocks = std::max<std::size_t>(num_blocks, b + 1);

    Lts out(num_blocks, lts.num_states() ? block[lts.initial()] : 0);
    for (const auto& a : lts.labels()) out.intern(a);
    std::set<Transition> seen;
    for (const auto& t : lts.transitions()) {
        Transition q{block[t.src], t.label, block[t.dst]};
        if (seen.insert(q).second) out.add_transition(q.src, q.label, q.dst);
    }
    return out;
}

}  // namespace avm::kernel
