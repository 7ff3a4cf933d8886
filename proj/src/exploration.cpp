#include "hcb/exploration.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace hcb {

ExcursionStep ExcursionStep::of_letter(Letter x) {
    ExcursionStep s;
    s.kind = Kind::letter;
    s.letter = x;
    s.side = (x == Letter::h || x == Letter::H) ? Side::h : Side::c;
    s.xi = is_burger(x) ? -1 : 1;
    s.eta = 1;
    return s;
}

ExcursionStep ExcursionStep::of_excursion(Letter closing, std::int64_t xi, std::uint64_t eta) {
    ExcursionStep s;
    s.kind = Kind::excursion;
    s.letter = closing;
    // An excursion served by a c burger leaves H orders: it moves the h coordinate.
    s.side = closing == Letter::c ? Side::h : Side::c;
    s.xi = xi;
    s.eta = eta;
    return s;
}

PastDecomposition decompose_past(const Word& past) {
    PastDecomposition d;
    ReverseWordSource src(past);
    PastExplorer ex;
    std::uint64_t used = 0;
    while (src.remaining() > 0) {
        try {
            const ExcursionStep s = ex.next(src);
            d.offsets.push_back(used);
            d.steps.push_back(s);
            used += s.eta;
        } catch (const std::out_of_range&) {
            d.complete = false;
            break;
        }
    }
    return d;
}

ReducedWalkPath reduced_walk(std::span<const ExcursionStep> steps) {
    ReducedWalkPath p;
    p.h_lazy = {0};
    p.c_lazy = {0};
    p.sigma = {0};
    p.h = {0};
    p.c = {0};
    std::uint64_t pending_gap = 0;
    for (const ExcursionStep& s : steps) {
        const std::size_t n = p.h_lazy.size();  // index of the state after this step
        std::int64_t h = p.h_lazy.back(), c = p.c_lazy.back();
        p.sides.push_back(s.side);
        if (s.side == Side::h) {
            h += s.xi;
            p.h.push_back(h);
            p.gaps.push_back(pending_gap);
            p.h_step_at.push_back(n);
            pending_gap = 0;
            if (h == -1 && !p.tau_h) p.tau_h = p.h.size() - 1;
            if (h == -1 && !p.tau_h_lazy) p.tau_h_lazy = n;
        } else {
            c += s.xi;
            p.c.push_back(c);
            ++pending_gap;
            if (c == -1 && !p.tau_c) p.tau_c = p.c.size() - 1;
            if (c == -1 && !p.tau_c_lazy) p.tau_c_lazy = n;
        }
        p.h_lazy.push_back(h);
        p.c_lazy.push_back(c);
        p.sigma.push_back(p.sigma.back() + s.eta);
    }
    if (p.tau_h_lazy && p.tau_c_lazy) p.tau = std::min(*p.tau_h_lazy, *p.tau_c_lazy);
    else if (p.tau_h_lazy) p.tau = p.tau_h_lazy;
    else p.tau = p.tau_c_lazy;
    return p;
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> interleave(std::span<const std::int64_t> h,
                                                                           std::span<const std::int64_t> c,
                                                                           std::span<const Side> sides) {
    std::vector<std::int64_t> hl{0}, cl{0};
    std::size_t i = 0, j = 0;
    for (Side s : sides) {
        if (s == Side::h) ++i;
        else ++j;
        hl.push_back(h[i]);
        cl.push_back(c[j]);
    }
    return {hl, cl};
}

XiEta sample_xi_eta(std::uint64_t seed, std::uint64_t stream) {
    LetterStream src(WeightTable(0.5), seed, stream);
    PastExplorer ex;
    return sample_xi_eta(src, ex);
}

ObservableSample sample_typical_observables(std::uint64_t seed, std::uint64_t stream, std::uint64_t letter_cap) {
    LetterStream src(WeightTable(0.5), seed, stream);
    PastExplorer ex(letter_cap);
    return typical_observables(src, ex, letter_cap);
}

Word skeleton(const Word& e) {
    const std::size_t n = e.size();
    if (n < 2 || !is_burger(e[0]) || e[n - 1] != Letter::F) throw std::invalid_argument("not an F-excursion: " + e.str());
    const MatchTable mt = match_positions(e);
    if (mt.partner(n - 1) != std::optional<std::size_t>(0)) throw std::invalid_argument("final F does not match the first letter");

    Word inner(std::vector<Letter>(e.letters.begin(), e.letters.end() - 1));
    const PastDecomposition d = decompose_past(inner);
    const Side closing = e[0] == Letter::h ? Side::h : Side::c;
    // The last step is the closing burger itself; everything before it is on the loop.
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // [begin, end) in e
    for (std::size_t i = 0; i + 1 < d.steps.size(); ++i) {
        if (d.steps[i].side != closing) continue;
        const std::size_t end = inner.size() - d.offsets[i];
        spans.emplace_back(end - d.steps[i].eta, end);
    }
    Word sk;
    for (auto it = spans.rbegin(); it != spans.rend(); ++it)
        sk.letters.insert(sk.letters.end(), e.letters.begin() + static_cast<std::ptrdiff_t>(it->first),
                          e.letters.begin() + static_cast<std::ptrdiff_t>(it->second));
    return sk;
}

FutureScan future_exploration(const Word& window) {
    FutureScan scan;
    scan.h_fwd = {0};
    scan.c_fwd = {0};
    ForwardWordSource src(window);
    std::size_t start = 0;
    while (start < window.size()) {
        const FutureBlock b = next_future_block(src, true, window.size() - start);
        if (b.censored) {
            scan.tail = b.word;
            break;
        }
        start += b.length;
        scan.h_fwd.push_back(scan.h_fwd.back() + b.hstar);
        scan.c_fwd.push_back(scan.c_fwd.back() + b.cstar);
        scan.blocks.push_back(b);
    }
    return scan;
}

std::optional<std::int64_t> FutureScan::delta_f(std::size_t k) const {
    std::int64_t d = 0;
    for (std::size_t i = 0; i < k; ++i) {
        switch (blocks[i].final_match) {
            case MatchKind::h: --d; break;
            case MatchKind::c: ++d; break;
            default: return std::nullopt;
        }
    }
    return d;
}

BiasedExcursionSampler::BiasedExcursionSampler(std::uint64_t seed, std::uint64_t stream, std::uint64_t r_max,
                                               std::uint64_t letter_cap)
    : src_(WeightTable(0.5), seed, stream), ex_(letter_cap), r_max_(std::bit_ceil(std::max<std::uint64_t>(r_max, 1))) {}

Word BiasedExcursionSampler::next() {
    std::vector<Letter> read;
    std::vector<std::uint64_t> sigma;
    while (true) {
        ++attempts_;
        read.clear();
        sigma.clear();
        Recording rec(src_, read);
        const SuffixWalkResult r = visit_suffixes(
            rec, ex_, [&](std::uint64_t, std::uint64_t len, std::int64_t, std::int64_t) { sigma.push_back(len - 1); },
            ex_.cap());
        if (r.censored) {
            ++censored_;
            continue;
        }
        if (r.r > r_max_) {
            ++exceeded_;
            while (r_max_ < r.r) r_max_ *= 2;
            continue;
        }
        const std::uint64_t v = src_.engine()() & (r_max_ - 1);
        if (v >= r.r) continue;
        Word out;
        out.letters.assign(read.rend() - static_cast<std::ptrdiff_t>(sigma[v]), read.rend());
        out.letters.push_back(Letter::F);
        out.origin = -static_cast<std::int64_t>(sigma[v]);
        return out;
    }
}

ShortBiasedSampler::ShortBiasedSampler(std::uint64_t seed, std::uint64_t stream, std::uint64_t max_len)
    : src_(WeightTable(0.5), seed, stream), ex_(max_len), max_len_(std::max<std::uint64_t>(max_len, 1)) {}

Word ShortBiasedSampler::next() {
    while (true) {
        ++attempts_;
        const std::uint64_t u = src_.engine()() % max_len_;
        read_.clear();
        Recording rec(src_, read_);
        std::int64_t h = 0, c = 0;
        bool alive = true;
        for (std::uint64_t k = 0; k < u && alive; ++k) {
            // Another step adds at least one letter to a suffix of read_.size() + 1.
            if (read_.size() + 1 >= max_len_) {
                alive = false;
                break;
            }
            const ExcursionStep s = ex_.next(rec);
            (s.side == Side::h ? h : c) += s.xi;
            alive = !s.censored && h >= 0 && c >= 0;
        }
        if (!alive || read_.size() + 1 > max_len_) continue;
        Word out;
        out.letters.assign(read_.rbegin(), read_.rend());
        out.letters.push_back(Letter::F);
        out.origin = -static_cast<std::int64_t>(read_.size());
        return out;
    }
}

Word biased_excursion_PF(std::uint64_t seed, std::uint64_t stream) {
    BiasedExcursionSampler s(seed, stream);
    return s.next();
}

}  // namespace hcb
