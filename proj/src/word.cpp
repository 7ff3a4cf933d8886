#include "hcb/word.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace hcb {

char to_char(Letter x) noexcept {
    static constexpr char table[] = {'h', 'c', 'H', 'C', 'F'};
    return table[static_cast<int>(x)];
}

Letter letter_from_char(char ch) {
    switch (ch) {
        case 'h': return Letter::h;
        case 'c': return Letter::c;
        case 'H': return Letter::H;
        case 'C': return Letter::C;
        case 'F': return Letter::F;
        default: throw std::invalid_argument(std::string("not a letter: '") + ch + "'");
    }
}

WeightTable::WeightTable(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
}

double WeightTable::weight(Letter x) const noexcept {
    switch (x) {
        case Letter::h:
        case Letter::c: return 0.25;
        case Letter::H:
        case Letter::C: return (1.0 - p_) / 4.0;
        case Letter::F: return p_ / 2.0;
    }
    return 0.0;
}

Word Word::parse(std::string_view s) {
    Word w;
    w.letters.reserve(s.size());
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        w.letters.push_back(letter_from_char(ch));
    }
    return w;
}

std::string Word::str() const {
    std::string s(letters.size(), ' ');
    std::transform(letters.begin(), letters.end(), s.begin(), to_char);
    return s;
}

Word ReducedWord::word() const {
    Word w;
    w.letters = orders;
    w.letters.insert(w.letters.end(), burgers.begin(), burgers.end());
    return w;
}

namespace {

// Two position stacks of surviving burgers. F takes whichever top is later.
struct BurgerStacks {
    std::vector<std::size_t> h, c;

    // Returns the matched position, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t take(Letter order, MatchKind* kind) {
        std::vector<std::size_t>* s = nullptr;
        if (order == Letter::H) {
            s = &h;
        } else if (order == Letter::C) {
            s = &c;
        } else if (!h.empty() || !c.empty()) {
            const bool use_h = c.empty() || (!h.empty() && h.back() > c.back());
            s = use_h ? &h : &c;
            if (kind) *kind = use_h ? MatchKind::h : MatchKind::c;
        }
        if (!s || s->empty()) return npos;
        const std::size_t j = s->back();
        s->pop_back();
        return j;
    }
};

}  // namespace

ReducedWord reduce(std::span<const Letter> w) {
    BurgerStacks st;
    ReducedWord out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Letter x = w[i];
        if (x == Letter::h) {
            st.h.push_back(i);
        } else if (x == Letter::c) {
            st.c.push_back(i);
        } else if (st.take(x, nullptr) == BurgerStacks::npos) {
            out.orders.push_back(x);
        }
    }
    std::vector<std::size_t> rest;
    rest.reserve(st.h.size() + st.c.size());
    std::merge(st.h.begin(), st.h.end(), st.c.begin(), st.c.end(), std::back_inserter(rest));
    out.burgers.reserve(rest.size());
    for (std::size_t i : rest) out.burgers.push_back(w[i]);
    return out;
}

MatchTable match_positions(std::span<const Letter> w) {
    MatchTable t;
    t.offset.assign(w.size(), 0);
    t.kind.assign(w.size(), MatchKind::none);
    BurgerStacks st;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Letter x = w[i];
        if (x == Letter::h) {
            st.h.push_back(i);
            continue;
        }
        if (x == Letter::c) {
            st.c.push_back(i);
            continue;
        }
        MatchKind k = x == Letter::F ? MatchKind::unknown : MatchKind::none;
        const std::size_t j = st.take(x, &k);
        t.kind[i] = k;
        if (j == BurgerStacks::npos) continue;
        const auto d = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j);
        t.offset[i] = -d;
        t.offset[j] = d;
    }
    return t;
}

std::size_t MatchTable::unmatched_count() const noexcept {
    return static_cast<std::size_t>(std::count(offset.begin(), offset.end(), 0));
}

}  // namespace hcb
