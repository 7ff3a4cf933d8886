#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hcb/automaton.hpp"
#include "hcb/stream.hpp"
#include "hcb/word.hpp"

namespace hcb {

enum class Side : std::uint8_t { h, c };

// One step of the past exploration: a single non-F letter, or a maximal
// F-excursion read leftward from its F up to the burger that serves it.
struct ExcursionStep {
    enum class Kind : std::uint8_t { letter, excursion };
    Kind kind = Kind::letter;
    Letter letter = Letter::h;  // the letter, or the closing burger for excursions
    Side side = Side::h;
    std::int64_t xi = 0;        // reduced length contribution
    std::uint64_t eta = 1;      // letters consumed
    bool censored = false;      // excursion abandoned at the letter cap; xi and side unknown

    static ExcursionStep of_letter(Letter x);
    static ExcursionStep of_excursion(Letter closing, std::int64_t xi, std::uint64_t eta);
    bool operator==(const ExcursionStep&) const = default;
};

inline constexpr std::uint64_t kNoCap = std::numeric_limits<std::uint64_t>::max();

// Wraps a source and appends every letter it hands out.
template <LetterSource S>
class Recording {
public:
    Recording(S& src, std::vector<Letter>& out) : src_(&src), out_(&out) {}
    Letter next() {
        const Letter x = src_->next();
        out_->push_back(x);
        return x;
    }

private:
    S* src_;
    std::vector<Letter>* out_;
};

class PastExplorer {
public:
    explicit PastExplorer(std::uint64_t excursion_cap = kNoCap) : cap_(excursion_cap) {}

    // Next step of the decomposition, reading leftward from the current frontier.
    template <LetterSource S>
    ExcursionStep next(S& src) {
        const Letter x = src.next();
        if (x != Letter::F) return ExcursionStep::of_letter(x);
        return finish_excursion(src);
    }

    // Reads the rest of an excursion whose F has just been consumed.
    template <LetterSource S>
    ExcursionStep finish_excursion(S& src) {
        m_.reset();
        std::uint64_t eta = 1;
        while (eta < cap_) {
            const Letter x = src.next();
            ++eta;
            if (m_.feed(x) == LeftwardMatcher::Outcome::floor) {
                return ExcursionStep::of_excursion(x, x == Letter::h ? m_.top_c() : m_.top_h(), eta);
            }
        }
        ExcursionStep s;
        s.kind = ExcursionStep::Kind::excursion;
        s.eta = eta;
        s.censored = true;
        return s;
    }

    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t cap_;
    LeftwardMatcher m_;
};

struct PastDecomposition {
    std::vector<ExcursionStep> steps;     // Y(1), Y(2), ... in reading order
    std::vector<std::uint64_t> offsets;   // letters before each step, counted leftward from X(-1)
    bool complete = true;                 // false if the leftmost excursion runs off the word
};

// Decomposes a finite past, X(-1) being the last letter of `past`.
PastDecomposition decompose_past(const Word& past);

struct ReducedWalkPath {
    std::vector<std::int64_t> h_lazy, c_lazy;  // index n holds the value after n steps; index 0 is 0
    std::vector<std::uint64_t> sigma;          // letters consumed after n steps
    std::optional<std::size_t> tau_h_lazy, tau_c_lazy, tau;
    std::vector<std::int64_t> h, c;            // non-lazy projections, index 0 is 0
    std::optional<std::size_t> tau_h, tau_c;   // first non-lazy index at -1
    std::vector<std::uint64_t> gaps;           // G_i: c-steps before the i-th h-step
    std::vector<std::size_t> h_step_at;        // lazy index of the i-th h-step
    std::vector<Side> sides;
};

ReducedWalkPath reduced_walk(std::span<const ExcursionStep> steps);

// Rebuilds the lazy walk from its non-lazy projections and the side sequence.
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> interleave(std::span<const std::int64_t> h,
                                                                           std::span<const std::int64_t> c,
                                                                           std::span<const Side> sides);

struct XiEta {
    std::int64_t xi;
    std::uint64_t eta;
    Side side;
    bool censored;
};

template <LetterSource S>
XiEta sample_xi_eta(S& src, PastExplorer& ex) {
    const ExcursionStep s = ex.next(src);
    return {s.xi, s.eta, s.side, s.censored};
}
XiEta sample_xi_eta(std::uint64_t seed, std::uint64_t stream = 0);

struct ObservableSample {
    std::uint64_t loop_len = 0;           // tau<-
    std::uint64_t cluster_perimeter = 0;  // tau^h - 1 or tau^c - 1
    std::int64_t envelope_boundary = 0;   // reduced length of the envelope excursion
    Side match_type = Side::h;            // burger type that serves X(0)
    std::uint64_t letters = 0;
    bool censored = false;                // stopped at the letter cap; loop_len is then a lower bound
};

// The past walk seen from an F at 0, run until one coordinate reaches -1.
template <LetterSource S>
ObservableSample typical_observables(S& src, PastExplorer& ex, std::uint64_t letter_cap = kNoCap) {
    ObservableSample o;
    std::int64_t h = 0, c = 0;
    std::uint64_t h_steps = 0, c_steps = 0;
    while (true) {
        if (o.letters >= letter_cap) {
            o.censored = true;
            return o;
        }
        const ExcursionStep s = ex.next(src);
        o.letters += s.eta;
        ++o.loop_len;
        if (s.censored) {
            o.censored = true;
            return o;
        }
        if (s.side == Side::h) {
            h += s.xi;
            ++h_steps;
        } else {
            c += s.xi;
            ++c_steps;
        }
        if (h == -1 || c == -1) {
            o.match_type = h == -1 ? Side::h : Side::c;
            o.cluster_perimeter = (h == -1 ? h_steps : c_steps) - 1;
            o.envelope_boundary = h == -1 ? c : h;
            return o;
        }
    }
}
ObservableSample sample_typical_observables(std::uint64_t seed, std::uint64_t stream = 0,
                                            std::uint64_t letter_cap = kNoCap);

// Skeleton of an F-excursion: the steps on its closing side, kept in word order.
Word skeleton(const Word& excursion);

// ---- exploration into the future ----

struct FutureBlock {
    Word word;                    // kept only when requested
    std::uint64_t length = 0;     // tau_F
    std::int64_t hstar = 0, cstar = 0;
    MatchKind final_match = MatchKind::unknown;
    bool censored = false;        // stopped at the length cap; counts are lower bounds
    std::int64_t dstar() const noexcept { return hstar - cstar; }
};

// Reads one block: letters up to and including the first F that finds no
// burger. Unmatched H/C orders inside a block are never matched later.
template <LetterSource S>
FutureBlock next_future_block(S& src, bool keep_word = false, std::uint64_t length_cap = kNoCap) {
    FutureBlock b;
    // Surviving burgers in order; F takes the last one, H/C the last of its type.
    std::vector<std::uint64_t> hs, cs;
    while (b.length < length_cap) {
        const Letter x = src.next();
        if (keep_word) b.word.letters.push_back(x);
        const std::uint64_t i = b.length++;
        switch (x) {
            case Letter::h: hs.push_back(i); break;
            case Letter::c: cs.push_back(i); break;
            case Letter::H:
                if (hs.empty()) ++b.hstar;
                else hs.pop_back();
                break;
            case Letter::C:
                if (cs.empty()) ++b.cstar;
                else cs.pop_back();
                break;
            case Letter::F:
                if (hs.empty() && cs.empty()) return b;
                if (cs.empty() || (!hs.empty() && hs.back() > cs.back())) hs.pop_back();
                else cs.pop_back();
                break;
        }
    }
    b.censored = true;
    return b;
}

struct FutureScan {
    std::vector<FutureBlock> blocks;          // complete blocks inside X(1..n)
    std::vector<std::int64_t> h_fwd, c_fwd;   // running sums of hstar, cstar; index 0 is 0
    Word tail;                                // letters after the last block end
    std::uint64_t unmatched_f() const noexcept { return blocks.size(); }
    // Sum of D over the first k block-ending F's; needs resolved final matches.
    std::optional<std::int64_t> delta_f(std::size_t k) const;
};

FutureScan future_exploration(const Word& window);
template <LetterSource S>
FutureScan future_exploration(S& src, std::size_t n) {
    Word w;
    w.letters.resize(n);
    for (auto& x : w.letters) x = src.next();
    return future_exploration(w);
}

// Attributes the block-ending F's of `scan` by reading the past to the left of the window.
template <LetterSource Past>
std::uint64_t resolve_block_ends(FutureScan& scan, Past& past, std::uint64_t cap);

// ---- the size-biased excursion law ----

// Draws P_F by rejection: E is drawn given X(0) = F, accepted with
// probability r(E)/r_max where r(E) = tau<-, and the suffix ending at a
// uniform step U <= r(E) is returned. Excursions with r(E) > r_max double the
// cap and restart the draw.
class BiasedExcursionSampler {
public:
    BiasedExcursionSampler(std::uint64_t seed, std::uint64_t stream, std::uint64_t r_max = 16,
                           std::uint64_t letter_cap = std::uint64_t{1} << 24);
    Word next();
    std::uint64_t r_max() const noexcept { return r_max_; }
    std::uint64_t exceeded() const noexcept { return exceeded_; }
    std::uint64_t attempts() const noexcept { return attempts_; }
    std::uint64_t censored() const noexcept { return censored_; }

private:
    LetterStream src_;
    PastExplorer ex_;
    std::uint64_t r_max_;
    std::uint64_t exceeded_ = 0, attempts_ = 0, censored_ = 0;
};

Word biased_excursion_PF(std::uint64_t seed, std::uint64_t stream = 0);

// Draws P_F conditioned on having at most max_len letters. A step index U is
// uniform on {0, ..., max_len - 1}; E is read up to step U and the suffix
// ending there is kept if the walk is still alive and the suffix fits. Every
// admissible suffix thus has weight P(prefix) / max_len, as under P_F. Each
// attempt reads at most max_len letters.
class ShortBiasedSampler {
public:
    ShortBiasedSampler(std::uint64_t seed, std::uint64_t stream, std::uint64_t max_len);
    Word next();
    std::uint64_t attempts() const noexcept { return attempts_; }
    std::uint64_t max_len() const noexcept { return max_len_; }

private:
    LetterStream src_;
    PastExplorer ex_;
    std::uint64_t max_len_;
    std::uint64_t attempts_ = 0;
    std::vector<Letter> read_;
};


// One excursion E given X(0) = F, reported suffix by suffix: visit(j, length,
// hstar, cstar) for j = 0 .. r(E)-1, where the suffix Y(j)...Y(1)X(0) has the
// given length and reduced order counts. Averaging the visits and dividing by
// E[r(E)] = 4 gives expectations under the law of P_F.
struct SuffixWalkResult {
    std::uint64_t r = 0;
    std::uint64_t letters = 0;
    bool censored = false;
};

template <LetterSource S, class Visit>
SuffixWalkResult visit_suffixes(S& src, PastExplorer& ex, Visit&& visit, std::uint64_t letter_cap = kNoCap) {
    SuffixWalkResult res;
    std::int64_t h = 0, c = 0;
    while (true) {
        visit(res.r, res.letters + 1, h, c);
        ++res.r;
        if (res.letters >= letter_cap) {
            res.censored = true;
            return res;
        }
        const ExcursionStep s = ex.next(src);
        res.letters += s.eta;
        if (s.censored) {
            res.censored = true;
            return res;
        }
        (s.side == Side::h ? h : c) += s.xi;
        if (h < 0 || c < 0) return res;
    }
}

}  // namespace hcb

#include "hcb/exploration_impl.hpp"
