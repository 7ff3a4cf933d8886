#include <doctest.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>

#include "hcb/counts.hpp"
#include "hcb/philox.hpp"
#include "hcb/stats.hpp"
#include "hcb/stream.hpp"
#include "hcb/word.hpp"

using namespace hcb;

namespace {

constexpr std::array<Letter, 5> kAll{Letter::h, Letter::c, Letter::H, Letter::C, Letter::F};

// Calls fn on every word of length exactly n.
void for_each_word(std::size_t n, const std::function<void(const Word&)>& fn) {
    Word w;
    w.letters.assign(n, Letter::h);
    std::vector<int> idx(n, 0);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) w.letters[i] = kAll[static_cast<std::size_t>(idx[i])];
        fn(w);
        std::size_t k = 0;
        while (k < n && ++idx[k] == 5) idx[k++] = 0;
        if (k == n) return;
    }
}

// Reference reduction by local rewriting: cancel hH, cC, hF, cF and move an
// order left past a burger of the other type, until neither applies.
ReducedWord reduce_by_rewriting(Word w) {
    auto& v = w.letters;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const Letter x = v[i], y = v[i + 1];
            if (!is_burger(x)) continue;
            const Letter own = x == Letter::h ? Letter::H : Letter::C;
            if (y == own || y == Letter::F) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(i) + 2);
                changed = true;
                break;
            }
            if (y == swap_type(own)) {
                std::swap(v[i], v[i + 1]);
                changed = true;
            }
        }
    }
    ReducedWord r;
    for (Letter x : v) (is_burger(x) ? r.burgers : r.orders).push_back(x);
    return r;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32::encrypt(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::encrypt(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::encrypt(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox streams are distinct and reproducible") {
    Philox4x32 a(7, 0), b(7, 0), c(7, 1);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
    }
}

TEST_CASE("word parsing and printing") {
    CHECK(Word::parse("hcHFcH").str() == "hcHFcH");
    CHECK(Word::parse("hc HF").size() == 4);
    CHECK_THROWS_AS(Word::parse("hx"), std::invalid_argument);
    CHECK_THROWS_AS(WeightTable(1.5), std::invalid_argument);
}

TEST_CASE("weights") {
    for (double p : {0.0, 0.3, 0.5, 1.0}) {
        const WeightTable w(p);
        double s = 0;
        for (Letter x : kAll) s += w.weight(x);
        CHECK(s == doctest::Approx(1.0));
        CHECK(w.weight(Letter::h) == 0.25);
        CHECK(w.weight(Letter::F) == doctest::Approx(p / 2));
    }
}

TEST_CASE("reduce examples") {
    auto r = reduce(Word::parse("hcHFcH"));
    CHECK(r.orders == std::vector<Letter>{Letter::H});
    CHECK(r.burgers == std::vector<Letter>{Letter::c});
    CHECK(reduce(Word::parse("hH")).empty());
    r = reduce(Word::parse("HcFh"));
    CHECK(r.orders == std::vector<Letter>{Letter::H});
    CHECK(r.burgers == std::vector<Letter>{Letter::h});
    CHECK(reduce(Word::parse("cHC")).str() == "H");
    CHECK(reduce(Word::parse("hcF")).str() == "h");
    CHECK(reduce(Word{}).empty());
}

TEST_CASE("match examples") {
    const auto m = match_positions(Word::parse("hcHFcH"));
    CHECK(m.partner(0) == std::optional<std::size_t>(2));
    CHECK(m.partner(2) == std::optional<std::size_t>(0));
    CHECK(m.partner(1) == std::optional<std::size_t>(3));
    CHECK(m.kind[3] == MatchKind::c);
    CHECK_FALSE(m.matched(4));
    CHECK_FALSE(m.matched(5));
    const auto hf = match_positions(Word::parse("hF"));
    CHECK(hf.partner(0) == std::optional<std::size_t>(1));
    CHECK(hf.kind[1] == MatchKind::h);
    const auto fff = match_positions(Word::parse("FFF"));
    CHECK(fff.unmatched_count() == 3);
    for (auto k : fff.kind) CHECK(k == MatchKind::unknown);
}

TEST_CASE("reduction agrees with pair rewriting, exhaustive to length 8") {
    for (std::size_t n = 0; n <= 8; ++n) {
        for_each_word(n, [](const Word& w) {
            const ReducedWord a = reduce(w);
            const ReducedWord b = reduce_by_rewriting(w);
            if (a != b) FAIL_CHECK(w.str() << " -> " << a.str() << " vs " << b.str());
        });
    }
}

TEST_CASE("empty reduction iff every position is matched, exhaustive to length 10") {
    std::uint64_t empties = 0;
    for (std::size_t n = 0; n <= 10; ++n) {
        for_each_word(n, [&](const Word& w) {
            const bool empty = reduce(w).empty();
            const MatchTable m = match_positions(w);
            empties += empty;
            if (empty != (m.unmatched_count() == 0)) FAIL_CHECK(w.str());
        });
    }
    CHECK(empties > 0);
}

TEST_CASE("empty reduction iff every position is matched, balanced words of length 12") {
    // A word with unequal burger and order counts can be neither empty after
    // reduction nor fully matched, since both cancel one burger against one
    // order; that is checked first, then every balanced word of length 12.
    for (std::uint64_t s = 0; s < 2000; ++s) {
        const Word w = sample_word(11 + s % 2, WeightTable(0.5), 77, s);
        std::ptrdiff_t burgers = std::count_if(w.letters.begin(), w.letters.end(), is_burger);
        if (2 * burgers == static_cast<std::ptrdiff_t>(w.size())) continue;
        CHECK_FALSE(reduce(w).empty());
        CHECK(match_positions(w).unmatched_count() > 0);
    }
    std::uint64_t balanced = 0, empties = 0;
    for (unsigned mask = 0; mask < (1u << 12); ++mask) {
        if (std::popcount(mask) != 6) continue;
        // Bits of `mask` mark burger slots; 2^6 burger choices times 3^6 order choices.
        for (unsigned b = 0; b < 64; ++b) {
            for (unsigned o = 0; o < 729; ++o) {
                Word w;
                w.letters.resize(12);
                unsigned bb = b, oo = o;
                for (unsigned i = 0; i < 12; ++i) {
                    if (mask >> i & 1u) {
                        w.letters[i] = bb & 1u ? Letter::c : Letter::h;
                        bb >>= 1;
                    } else {
                        w.letters[i] = oo % 3 == 0 ? Letter::H : oo % 3 == 1 ? Letter::C : Letter::F;
                        oo /= 3;
                    }
                }
                const bool empty = reduce(w).empty();
                empties += empty;
                ++balanced;
                if (empty != (match_positions(w).unmatched_count() == 0)) FAIL_CHECK(w.str());
            }
        }
    }
    CHECK(balanced == 924u * 64u * 729u);
    CHECK(empties > 0);
}

TEST_CASE("concatenation law, every split of every word to length 8") {
    for (std::size_t n = 0; n <= 8; ++n) {
        for_each_word(n, [](const Word& w) {
            const ReducedWord whole = reduce(w);
            for (std::size_t k = 0; k <= w.size(); ++k) {
                const std::span<const Letter> all(w.letters);
                Word uv = reduce(all.subspan(0, k)).word();
                const Word rv = reduce(all.subspan(k)).word();
                uv.letters.insert(uv.letters.end(), rv.letters.begin(), rv.letters.end());
                if (reduce(uv) != whole) FAIL_CHECK(w.str() << " split " << k);
            }
        });
    }
}

TEST_CASE("appending letters never changes an existing order match") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const Word w = sample_word(60, WeightTable(0.5), 11, s);
        Word prefix(std::vector<Letter>(w.letters.begin(), w.letters.begin() + 30));
        const MatchTable a = match_positions(prefix), b = match_positions(w);
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            if (is_order(prefix[i]) && a.matched(i)) {
                CHECK(a.offset[i] == b.offset[i]);
                CHECK(a.kind[i] == b.kind[i]);
            }
        }
    }
}

TEST_CASE("sample_word determinism and frequencies") {
    CHECK(sample_word(0, WeightTable(0.5), 1).empty());
    CHECK(sample_word(10, WeightTable(0.5), 42) == sample_word(10, WeightTable(0.5), 42));
    CHECK_FALSE(sample_word(50, WeightTable(0.5), 42) == sample_word(50, WeightTable(0.5), 43));

    for (double p : {0.5, 0.3}) {
        const WeightTable wt(p);
        const std::size_t n = 1'000'000;
        const Word w = sample_word(n, wt, 2024);
        std::array<std::uint64_t, 5> counts{};
        for (Letter x : w.letters) ++counts[static_cast<std::size_t>(x)];
        double chi2 = 0;
        for (Letter x : kAll) {
            const double e = static_cast<double>(n) * wt.weight(x);
            const double d = static_cast<double>(counts[static_cast<std::size_t>(x)]) - e;
            chi2 += d * d / e;
        }
        CHECK(chi2 < 18.47);  // 0.999 quantile, 4 degrees of freedom
        CHECK(std::abs(binomial_z(counts[4], n, p / 2)) < 3);
    }
}

TEST_CASE("trajectory examples") {
    LetterStream past(WeightTable(0.5), 1, 1);
    auto t = trajectory_of(Word::parse("hH"), past, 100);
    CHECK(t.S == std::vector<std::int32_t>{1, 0});
    CHECK(*t.D(1) == 1);
    CHECK(*t.D(2) == 0);
    t = trajectory_of(Word::parse("cF"), past, 100);
    CHECK(t.S == std::vector<std::int32_t>{1, 0});
    CHECK(*t.D(1) == -1);
    CHECK(*t.D(2) == 0);
}

TEST_CASE("F matched beyond the window is attributed from the past") {
    // Past "...hC" then window "F": reading left, C waits, h is taken by F.
    Word past = Word::parse("hC");
    ReverseWordSource src(past);
    auto t = trajectory_of(Word::parse("F"), src, 10);
    CHECK(t.f_kind[0] == MatchKind::h);
    CHECK(*t.D(1) == -1);
    CHECK(t.backward_letters == 2);

    // Cap reached before the match: D is deferred.
    Word past2 = Word::parse("hHHC");
    ReverseWordSource src2(past2);
    t = trajectory_of(Word::parse("cFh"), src2, 4);
    CHECK(t.f_kind[1] == MatchKind::c);
    ReverseWordSource src3(past2);
    t = trajectory_of(Word::parse("Fh"), src3, 3);
    CHECK(t.unresolved == std::vector<std::size_t>{0});
    CHECK_FALSE(t.D(1).has_value());
    CHECK(t.S == std::vector<std::int32_t>{-1, 0});
}

TEST_CASE("lazy left resolution agrees with matching the concatenated word") {
    for (std::uint64_t r = 0; r < 300; ++r) {
        const Word past = sample_word(4000, WeightTable(0.5), 5, backward_stream(r));
        const Word window = sample_word(40, WeightTable(0.5), 5, forward_stream(r));
        Word past_in_order(std::vector<Letter>(past.letters.rbegin(), past.letters.rend()));
        Word joint = past_in_order;
        joint.letters.insert(joint.letters.end(), window.letters.begin(), window.letters.end());
        const MatchTable m = match_positions(joint);
        ReverseWordSource src(past_in_order);
        const auto t = trajectory_of(window, src, past.size());
        for (std::size_t i = 0; i < window.size(); ++i) {
            if (window[i] != Letter::F) continue;
            const std::size_t j = i + past.size();
            if (m.matched(j)) CHECK(t.f_kind[i] == m.kind[j]);
            else CHECK(t.f_kind[i] == MatchKind::unknown);
        }
    }
}

TEST_CASE("S moves by one; S = H + C; endpoint agrees with the full path") {
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto t = trajectory(2000, 99, r);
        std::int32_t prev = 0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            CHECK(std::abs(t.S[k] - prev) == 1);
            prev = t.S[k];
        }
        if (!t.complete()) continue;
        CHECK(t.S.back() == t.H.back() + t.C.back());
        const Endpoint e = endpoint_counts(2000, 99, r);
        CHECK(e.S == t.S.back());
        CHECK(e.D == *t.D(2000));
        CHECK(e.backward_letters == t.backward_letters);
    }
}

TEST_CASE("Var(S_n) = n at n = 10^4 over 10^4 replicas") {
    std::vector<double> xs;
    TrajectoryOptions opt;
    opt.resolve = false;
    for (std::uint64_t r = 0; r < 10'000; ++r) xs.push_back(static_cast<double>(endpoint_counts(10'000, 3, r, opt).S));
    const VarianceEstimate v = variance_with_se(xs);
    CHECK(std::abs(v.variance - 1e4) < 3 * v.se);
}
