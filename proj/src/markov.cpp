#include "hcb/markov.hpp"

#include "hcb/counts.hpp"
#include "hcb/exploration.hpp"

namespace hcb {

namespace {

// Stream of the independent past; disjoint from forward/backward ids.
constexpr std::uint64_t alternate_past_stream(std::uint64_t replica) { return (std::uint64_t{1} << 62) + replica; }

}  // namespace

MarkovDecomposition approximate_markov(std::size_t n, std::uint64_t seed, std::uint64_t replica, const WeightTable& w) {
    const Word x = sample_word(n, w, seed, forward_stream(replica));
    const std::uint64_t cap = 64 * static_cast<std::uint64_t>(n);
    MarkovDecomposition m;

    LetterStream past_a(w, seed, backward_stream(replica));
    LetterStream past_b(w, seed, alternate_past_stream(replica));
    const CountTrajectory ta = trajectory_of(x, past_a, cap);
    const CountTrajectory tb = trajectory_of(x, past_b, cap);

    FutureScan sa = future_exploration(x);
    FutureScan sb = sa;
    LetterStream again_a(w, seed, backward_stream(replica));
    LetterStream again_b(w, seed, alternate_past_stream(replica));
    resolve_block_ends(sa, again_a, cap);
    resolve_block_ends(sb, again_b, cap);

    m.n_unmatched = sa.unmatched_f();
    const auto da = n ? ta.D(n) : std::optional<std::int32_t>(0);
    const auto db = n ? tb.D(n) : std::optional<std::int32_t>(0);
    const auto ea = sa.delta_f(m.n_unmatched);
    const auto eb = sb.delta_f(m.n_unmatched);
    m.resolved = da && db && ea && eb;
    if (m.resolved) {
        m.d_true = *da;
        m.d_prime = *db;
        m.delta = *ea;
        m.delta_prime = *eb;
    }
    return m;
}

}  // namespace hcb
