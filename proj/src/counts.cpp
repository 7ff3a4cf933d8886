#include "hcb/counts.hpp"

namespace hcb {

Word sample_word(std::size_t n, const WeightTable& w, std::uint64_t seed, std::uint64_t stream) {
    LetterStream src(w, seed, stream);
    Word out;
    out.letters.resize(n);
    for (auto& x : out.letters) x = src.next();
    return out;
}

CountTrajectory trajectory(std::size_t n, std::uint64_t seed, std::uint64_t replica, const TrajectoryOptions& opt) {
    const Word w = sample_word(n, opt.weights, seed, forward_stream(replica));
    LetterStream past(opt.weights, seed, backward_stream(replica));
    const std::uint64_t cap = opt.backward_cap ? opt.backward_cap : 64 * static_cast<std::uint64_t>(n);
    return trajectory_of(w, past, opt.resolve ? cap : 0);
}

Endpoint endpoint_counts(std::size_t n, std::uint64_t seed, std::uint64_t replica, const TrajectoryOptions& opt) {
    LetterStream fwd(opt.weights, seed, forward_stream(replica));
    std::vector<std::uint64_t> hs, cs;
    std::vector<Letter> pending;
    Endpoint e;
    for (std::uint64_t i = 0; i < n; ++i) {
        const Letter x = fwd.next();
        switch (x) {
            case Letter::h: hs.push_back(i), ++e.S, ++e.D; break;
            case Letter::c: cs.push_back(i), ++e.S, --e.D; break;
            case Letter::H:
                --e.S, --e.D;
                if (hs.empty()) pending.push_back(x);
                else hs.pop_back();
                break;
            case Letter::C:
                --e.S, ++e.D;
                if (cs.empty()) pending.push_back(x);
                else cs.pop_back();
                break;
            case Letter::F:
                --e.S;
                if (hs.empty() && cs.empty()) {
                    pending.push_back(x);
                } else if (cs.empty() || (!hs.empty() && hs.back() > cs.back())) {
                    hs.pop_back(), --e.D;
                } else {
                    cs.pop_back(), ++e.D;
                }
                break;
        }
    }
    LetterStream past(opt.weights, seed, backward_stream(replica));
    std::uint64_t cap = opt.backward_cap ? opt.backward_cap : 64 * static_cast<std::uint64_t>(n);
    if (!opt.resolve) cap = 0;
    std::vector<MatchKind> kinds;
    e.backward_letters = resolve_left(pending, kinds, past, cap);
    for (MatchKind k : kinds) {
        if (k == MatchKind::h) --e.D;
        else if (k == MatchKind::c) ++e.D;
        else ++e.unresolved;
    }
    return e;
}

}  // namespace hcb
