#pragma once

#include "hcb/counts.hpp"

namespace hcb {

template <LetterSource Past>
std::uint64_t resolve_block_ends(FutureScan& scan, Past& past, std::uint64_t cap) {
    std::vector<Letter> pending;
    for (const FutureBlock& b : scan.blocks) {
        pending.insert(pending.end(), static_cast<std::size_t>(b.hstar), Letter::H);
        pending.insert(pending.end(), static_cast<std::size_t>(b.cstar), Letter::C);
        pending.push_back(Letter::F);
    }
    // Orders left in the tail come last; its burgers never reach the past.
    for (Letter x : reduce(scan.tail).orders) pending.push_back(x);
    std::vector<MatchKind> kinds;
    const std::uint64_t read = resolve_left(pending, kinds, past, cap);
    for (std::size_t i = 0; i < scan.blocks.size(); ++i) scan.blocks[i].final_match = kinds[i];
    return read;
}

}  // namespace hcb
