#pragma once

#include "hcb/automaton.hpp"

namespace hcb {

template <LetterSource Past>
std::uint64_t resolve_left(const std::vector<Letter>& pending_orders, std::vector<MatchKind>& f_kinds, Past& past,
                           std::uint64_t cap) {
    LeftwardMatcher m;
    for (auto it = pending_orders.rbegin(); it != pending_orders.rend(); ++it) m.feed(*it);
    const std::size_t window_f = m.separators();
    f_kinds.assign(window_f, MatchKind::unknown);
    std::size_t done = 0;
    std::uint64_t read = 0;
    while (done < window_f && read < cap) {
        const Letter x = past.next();
        ++read;
        const std::size_t above = m.separators();
        // Window F's sit at the bottom of the separator stack, so a consumed
        // separator belongs to the window exactly when nothing from the past
        // lies above it.
        if (m.feed(x) == LeftwardMatcher::Outcome::separator && above <= window_f - done) {
            f_kinds[done++] = x == Letter::h ? MatchKind::h : MatchKind::c;
        }
    }
    return read;
}

template <LetterSource Past>
CountTrajectory trajectory_of(const Word& w, Past& past, std::uint64_t backward_cap) {
    CountTrajectory t;
    t.word = w;
    const std::size_t n = w.size();
    const MatchTable mt = match_positions(w);
    t.f_kind = mt.kind;

    std::vector<Letter> pending;
    std::vector<std::size_t> pending_f;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_order(w[i]) && !mt.matched(i)) {
            pending.push_back(w[i]);
            if (w[i] == Letter::F) pending_f.push_back(i);
        }
    }
    std::vector<MatchKind> kinds;
    t.backward_letters = resolve_left(pending, kinds, past, backward_cap);
    for (std::size_t j = 0; j < pending_f.size(); ++j) {
        t.f_kind[pending_f[j]] = kinds[j];
        if (kinds[j] == MatchKind::unknown) t.unresolved.push_back(pending_f[j]);
    }

    t.S.resize(n);
    t.H.resize(n);
    t.C.resize(n);
    std::int32_t s = 0, h = 0, c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        switch (w[i]) {
            case Letter::h: ++s, ++h; break;
            case Letter::c: ++s, ++c; break;
            case Letter::H: --s, --h; break;
            case Letter::C: --s, --c; break;
            case Letter::F:
                --s;
                if (t.f_kind[i] == MatchKind::h) --h;
                if (t.f_kind[i] == MatchKind::c) --c;
                break;
        }
        t.S[i] = s;
        t.H[i] = h;
        t.C[i] = c;
    }
    return t;
}

}  // namespace hcb
