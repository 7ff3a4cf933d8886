#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hcb/stream.hpp"
#include "hcb/word.hpp"

namespace hcb {

// Prefix counts of X(1..n). Index k-1 holds the value after k letters.
// F letters whose match lies beyond the backward cap are left unattributed:
// they enter S but neither H nor C, and D is undefined from the first of them on.
struct CountTrajectory {
    Word word;
    std::vector<std::int32_t> S, H, C;
    std::vector<MatchKind> f_kind;           // per position; none for non-F letters
    std::vector<std::size_t> unresolved;     // 0-based positions of unattributed F's
    std::uint64_t backward_letters = 0;      // how far left the lazy past was generated

    std::size_t size() const noexcept { return S.size(); }
    bool complete() const noexcept { return unresolved.empty(); }
    // D after k letters, k in 1..n.
    std::optional<std::int32_t> D(std::size_t k) const noexcept {
        if (!unresolved.empty() && unresolved.front() < k) return std::nullopt;
        return H[k - 1] - C[k - 1];
    }
};

struct TrajectoryOptions {
    WeightTable weights{0.5};
    std::uint64_t backward_cap = 0;  // letters; 0 means 64 * n
    bool resolve = true;             // false skips the past entirely; F's past the window stay unattributed
};

CountTrajectory trajectory(std::size_t n, std::uint64_t seed, std::uint64_t replica = 0,
                           const TrajectoryOptions& opt = {});

// Counts for a given window, resolving unmatched F's against `past`, which
// yields X(0), X(-1), ... in that order.
template <LetterSource Past>
CountTrajectory trajectory_of(const Word& w, Past& past, std::uint64_t backward_cap);

// The pending F's of a window in left-to-right order, attributed by reading
// the past. Returns the number of letters read. Unreached F's stay unknown.
template <LetterSource Past>
std::uint64_t resolve_left(const std::vector<Letter>& pending_orders, std::vector<MatchKind>& f_kinds,
                           Past& past, std::uint64_t cap);

struct Endpoint {
    std::int64_t S = 0;
    std::int64_t D = 0;
    std::uint64_t backward_letters = 0;
    std::uint64_t unresolved = 0;
};

// (S_n, D_n) without storing the path.
Endpoint endpoint_counts(std::size_t n, std::uint64_t seed, std::uint64_t replica, const TrajectoryOptions& opt = {});

}  // namespace hcb

#include "hcb/counts_impl.hpp"
