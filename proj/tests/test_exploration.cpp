#include <doctest.h>

#include <cmath>
#include <map>

#include "hcb/analytics.hpp"
#include "hcb/counts.hpp"
#include "hcb/exploration.hpp"
#include "hcb/markov.hpp"
#include "hcb/stats.hpp"

using namespace hcb;

namespace {

const WeightTable kCritical(0.5);

// Raw counts over X(-m..-1) with F's attributed by matching inside that span.
struct RawBackward {
    std::int64_t h = 0, c = 0, s = 0;
};

RawBackward raw_counts(const Word& in_order) {
    const MatchTable m = match_positions(in_order);
    RawBackward r;
    for (std::size_t i = 0; i < in_order.size(); ++i) {
        switch (in_order[i]) {
            case Letter::h: --r.h, --r.s; break;
            case Letter::c: --r.c, --r.s; break;
            case Letter::H: ++r.h, ++r.s; break;
            case Letter::C: ++r.c, ++r.s; break;
            case Letter::F:
                ++r.s;
                if (m.kind[i] == MatchKind::h) ++r.h;
                if (m.kind[i] == MatchKind::c) ++r.c;
                break;
        }
    }
    return r;
}

Word reversed(const std::vector<Letter>& read, std::size_t count) {
    return Word(std::vector<Letter>(read.rend() - static_cast<std::ptrdiff_t>(count), read.rend()));
}

}  // namespace

TEST_CASE("decompose_past examples") {
    auto d = decompose_past(Word::parse("H"));
    REQUIRE(d.steps.size() == 1);
    CHECK(d.steps[0] == ExcursionStep::of_letter(Letter::H));
    CHECK(d.steps[0].side == Side::h);
    CHECK(d.steps[0].xi == 1);

    d = decompose_past(Word::parse("cF"));
    REQUIRE(d.steps.size() == 1);
    CHECK(d.steps[0].kind == ExcursionStep::Kind::excursion);
    CHECK(d.steps[0].letter == Letter::c);
    CHECK(d.steps[0].side == Side::h);
    CHECK(d.steps[0].xi == 0);
    CHECK(d.steps[0].eta == 2);

    d = decompose_past(Word::parse("cHF"));
    REQUIRE(d.steps.size() == 1);
    CHECK(d.steps[0].xi == 1);
    CHECK(d.steps[0].eta == 3);

    d = decompose_past(Word::parse("hCF"));
    CHECK(d.steps[0].side == Side::c);
    CHECK(d.steps[0].xi == 1);

    d = decompose_past(Word::parse("HF"));
    CHECK_FALSE(d.complete);
    CHECK(d.steps.empty());

    d = decompose_past(Word::parse("hhFCF"));
    REQUIRE(d.steps.size() == 1);  // the inner F takes the second h, the last F the first
    CHECK(d.steps[0].eta == 5);
    CHECK(d.steps[0].side == Side::c);
    CHECK(d.steps[0].xi == 1);
}

TEST_CASE("reduced_walk examples") {
    const std::vector<ExcursionStep> hhh{ExcursionStep::of_letter(Letter::H), ExcursionStep::of_letter(Letter::H),
                                         ExcursionStep::of_letter(Letter::h)};
    auto p = reduced_walk(hhh);
    CHECK(p.h_lazy == std::vector<std::int64_t>{0, 1, 2, 1});
    CHECK_FALSE(p.tau_h.has_value());
    CHECK_FALSE(p.tau.has_value());

    const std::vector<ExcursionStep> one{ExcursionStep::of_letter(Letter::h)};
    p = reduced_walk(one);
    CHECK(p.tau_h == std::optional<std::size_t>(1));
    CHECK(p.tau_h_lazy == std::optional<std::size_t>(1));
    CHECK(p.tau == std::optional<std::size_t>(1));

    const std::vector<ExcursionStep> mixed{ExcursionStep::of_letter(Letter::C), ExcursionStep::of_letter(Letter::c),
                                           ExcursionStep::of_letter(Letter::h)};
    p = reduced_walk(mixed);
    CHECK(p.gaps == std::vector<std::uint64_t>{2});
    CHECK(p.h_step_at == std::vector<std::size_t>{3});
    CHECK(p.tau_h == std::optional<std::size_t>(1));
    CHECK(p.tau_h_lazy == std::optional<std::size_t>(3));
}

TEST_CASE("step invariants and the time change, pathwise") {
    for (std::uint64_t r = 0; r < 3000; ++r) {
        LetterStream src(kCritical, 17, r);
        std::vector<Letter> read;
        Recording rec(src, read);
        PastExplorer ex(1 << 16);
        std::vector<ExcursionStep> steps;
        for (int i = 0; i < 30; ++i) {
            const ExcursionStep s = ex.next(rec);
            if (s.censored) break;
            steps.push_back(s);
        }
        for (const auto& s : steps) {
            if (s.kind == ExcursionStep::Kind::letter) {
                CHECK(s.eta == 1);
                CHECK(std::abs(s.xi) == 1);
                CHECK((s.side == Side::h) == (s.letter == Letter::h || s.letter == Letter::H));
            } else {
                CHECK(s.eta >= 2);
                CHECK(s.xi >= 0);
                CHECK((s.side == Side::h) == (s.letter == Letter::c));
            }
        }
        const ReducedWalkPath p = reduced_walk(steps);
        for (std::size_t n = 0; n <= steps.size(); ++n) {
            const RawBackward raw = raw_counts(reversed(read, p.sigma[n]));
            CHECK(p.h_lazy[n] == raw.h);
            CHECK(p.c_lazy[n] == raw.c);
        }
        const auto [hl, cl] = interleave(p.h, p.c, p.sides);
        CHECK(hl == p.h_lazy);
        CHECK(cl == p.c_lazy);
    }
}

TEST_CASE("gaps between h-steps are geometric(1/2)") {
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t total = 0;
    LetterStream src(kCritical, 8, 0);
    PastExplorer ex(1 << 16);
    std::vector<ExcursionStep> steps;
    while (steps.size() < 400'000) {
        const ExcursionStep s = ex.next(src);
        if (!s.censored) steps.push_back(s);
    }
    for (auto g : reduced_walk(steps).gaps) ++counts[g], ++total;
    for (std::uint64_t j = 0; j < 6; ++j) CHECK(std::abs(binomial_z(counts[j], total, std::ldexp(1.0, -int(j) - 1))) < 4);
}

TEST_CASE("the walk's first passage of the step sum equals the raw backward count's, pathwise") {
    std::uint64_t checked = 0;
    for (std::uint64_t r = 0; r < 100'000; ++r) {
        LetterStream src(kCritical, 23, r);
        std::vector<Letter> read;
        Recording rec(src, read);
        PastExplorer ex(1 << 14);
        std::int64_t sum = 0;
        std::uint64_t sigma = 0;
        bool censored = false;
        while (sum != -1 && sigma < (1 << 14)) {
            const ExcursionStep s = ex.next(rec);
            if (s.censored) {
                censored = true;
                break;
            }
            sum += s.xi;
            sigma += s.eta;
        }
        if (censored || sum != -1) continue;
        std::int64_t raw = 0;
        std::uint64_t first = 0;
        for (std::size_t m = 0; m < read.size(); ++m) {
            raw += is_burger(read[m]) ? -1 : 1;
            if (raw == -1) {
                first = m + 1;
                break;
            }
        }
        CHECK(first == sigma);
        ++checked;
    }
    CHECK(checked > 95'000);
}

TEST_CASE("single-letter steps have probability 3/4; the first h-step is h with probability 1/2") {
    LetterStream src(kCritical, 31, 0);
    PastExplorer ex(1 << 20);
    std::uint64_t single = 0;
    const std::uint64_t n = 1'000'000;
    for (std::uint64_t i = 0; i < n; ++i) single += sample_xi_eta(src, ex).eta == 1;
    CHECK(std::abs(binomial_z(single, n, 0.75)) < 3);

    std::uint64_t first_h = 0, runs = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        while (true) {
            const ExcursionStep s = ex.next(src);
            if (s.censored) break;
            if (s.side != Side::h) continue;
            first_h += s.kind == ExcursionStep::Kind::letter && s.letter == Letter::h;
            ++runs;
            break;
        }
    }
    CHECK(runs > n - 1000);
    CHECK(std::abs(binomial_z(first_h, runs, 0.5)) < 3);
}

TEST_CASE("step Laplace transform matches the exact value at lambda = 0.5") {
    const double lambda = 0.5;
    LetterStream src(kCritical, 41, 0);
    PastExplorer ex(1 << 17);
    RunningStats st;
    std::uint64_t censored = 0;
    for (std::uint64_t i = 0; i < 10'000'000; ++i) {
        const XiEta s = sample_xi_eta(src, ex);
        // A censored step has xi of order sqrt(2^17); its contribution is below e^-100.
        if (s.censored) {
            ++censored;
            st.add(0.0);
            continue;
        }
        st.add(std::exp(-lambda * static_cast<double>(s.xi)));
    }
    const ExactValue exact = laplace_xi(lambda);
    MESSAGE("MC " << st.mean() << " +- " << st.se() << " exact " << exact.value << " censored " << censored);
    CHECK(std::abs(st.mean() - exact.value) < 3 * st.se() + exact.err);
}

TEST_CASE("future exploration examples") {
    auto scan = future_exploration(Word::parse("F"));
    REQUIRE(scan.blocks.size() == 1);
    CHECK(scan.blocks[0].length == 1);
    CHECK(scan.blocks[0].hstar == 0);

    scan = future_exploration(Word::parse("hHF"));
    REQUIRE(scan.blocks.size() == 1);
    CHECK(scan.blocks[0].length == 3);
    CHECK(scan.blocks[0].hstar == 0);
    CHECK(scan.blocks[0].cstar == 0);

    scan = future_exploration(Word::parse("cHF"));
    CHECK(scan.blocks.empty());
    CHECK(scan.tail.str() == "cHF");

    scan = future_exploration(Word::parse("HCcFFhC"));
    REQUIRE(scan.blocks.size() == 1);
    CHECK(scan.blocks[0].word.str() == "HCcFF");
    CHECK(scan.blocks[0].hstar == 1);
    CHECK(scan.blocks[0].cstar == 1);
    CHECK(scan.h_fwd == std::vector<std::int64_t>{0, 1});
    CHECK(scan.tail.str() == "hC");
}

TEST_CASE("future blocks reduce to orders then one F, and P(tau_F = 1) = 1/4") {
    LetterStream src(kCritical, 5, 0);
    std::uint64_t ones = 0, n = 50'000;
    for (std::uint64_t i = 0; i < n; ++i) {
        const FutureBlock b = next_future_block(src, true, 1 << 14);
        if (b.censored) continue;
        ones += b.length == 1;
        const ReducedWord r = reduce(b.word);
        CHECK(r.burgers.empty());
        REQUIRE(!r.orders.empty());
        CHECK(r.orders.back() == Letter::F);
        const auto hs = std::count(r.orders.begin(), r.orders.end(), Letter::H);
        const auto cs = std::count(r.orders.begin(), r.orders.end(), Letter::C);
        CHECK(hs == b.hstar);
        CHECK(cs == b.cstar);
        CHECK(hs + cs + 1 == static_cast<std::ptrdiff_t>(r.orders.size()));
    }
    CHECK(std::abs(binomial_z(ones, n, 0.25)) < 3);
}

TEST_CASE("approximate Markov decomposition holds pathwise; the plus-sign variant does not") {
    std::uint64_t plus_fails = 0, checked = 0;
    for (std::uint64_t r = 0; r < 300; ++r) {
        const MarkovDecomposition m = approximate_markov(3000, 61, r);
        if (!m.resolved) continue;
        ++checked;
        CHECK(m.d_true == m.reconstructed());
        plus_fails += m.d_true != m.d_prime + m.delta + m.delta_prime;
    }
    CHECK(checked > 250);
    CHECK(plus_fails > 0);
}

TEST_CASE("block ends resolved from the past agree with the trajectory's F attribution") {
    for (std::uint64_t r = 0; r < 100; ++r) {
        const Word w = sample_word(500, kCritical, 71, forward_stream(r));
        LetterStream p1(kCritical, 71, backward_stream(r)), p2(kCritical, 71, backward_stream(r));
        const CountTrajectory t = trajectory_of(w, p1, 1 << 22);
        FutureScan scan = future_exploration(w);
        resolve_block_ends(scan, p2, 1 << 22);
        std::size_t pos = 0;
        for (const FutureBlock& b : scan.blocks) {
            pos += b.length;
            CHECK(t.f_kind[pos - 1] == b.final_match);
        }
    }
}

TEST_CASE("typical observables agree with the reduced walk") {
    for (std::uint64_t r = 0; r < 2000; ++r) {
        const ObservableSample o = sample_typical_observables(91, r, 1 << 16);
        LetterStream src(kCritical, 91, r);
        PastExplorer ex(1 << 16);
        std::vector<ExcursionStep> steps;
        while (steps.size() < o.loop_len) steps.push_back(ex.next(src));
        if (o.censored) continue;
        const ReducedWalkPath p = reduced_walk(steps);
        REQUIRE(p.tau.has_value());
        CHECK(*p.tau == o.loop_len);
        if (o.match_type == Side::h) {
            CHECK(o.cluster_perimeter + 1 == *p.tau_h);
            CHECK(o.envelope_boundary == p.c_lazy.back());
        } else {
            CHECK(o.cluster_perimeter + 1 == *p.tau_c);
        }
        CHECK(o.cluster_perimeter < o.loop_len);
        if (steps[0].kind == ExcursionStep::Kind::letter && steps[0].letter == Letter::h) {
            CHECK(o.loop_len == 1);
            CHECK(o.cluster_perimeter == 0);
        }
    }
}

TEST_CASE("skeleton words") {
    CHECK(skeleton(Word::parse("hChhCFHchcCHFCF")).str() == "hHchcCHF");
    CHECK(skeleton(Word::parse("hF")).empty());
    CHECK(skeleton(Word::parse("cHF")).str() == "");
    CHECK(skeleton(Word::parse("hhHF")).str() == "hH");
    CHECK_THROWS_AS(skeleton(Word::parse("hHhF")), std::invalid_argument);
    CHECK_THROWS_AS(skeleton(Word::parse("hFhF")), std::invalid_argument);
}

TEST_CASE("biased excursion sampler matches the future block law on small atoms") {
    BiasedExcursionSampler q(101, 0, 64, 1 << 16);
    LetterStream fwd(kCritical, 102, 0);
    const std::uint64_t n = 3'000;
    std::uint64_t q_f = 0, q_hhf = 0, f_f = 0, f_hhf = 0, f_n = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const Word w = q.next();
        CHECK(w.letters.back() == Letter::F);
        const ReducedWord r = reduce(w);
        CHECK(r.burgers.empty());
        CHECK(std::count(r.orders.begin(), r.orders.end(), Letter::F) == 1);
        q_f += w.str() == "F";
        q_hhf += w.str() == "hHF";
    }
    for (std::uint64_t i = 0; i < 100 * n; ++i) {
        const FutureBlock b = next_future_block(fwd, true, 1 << 12);
        ++f_n;
        f_f += b.length == 1;
        f_hhf += !b.censored && b.word.str() == "hHF";
    }
    MESSAGE("r_max " << q.r_max() << " exceeded " << q.exceeded() << " attempts " << q.attempts());
    CHECK(std::abs(binomial_z(q_f, n, 0.25)) < 3);
    const double p1 = double(q_hhf) / n, p2 = double(f_hhf) / f_n;
    CHECK(std::abs(difference_z(p1, std::sqrt(p1 * (1 - p1) / n), p2, std::sqrt(p2 * (1 - p2) / f_n))) < 3);
    CHECK(std::abs(p2 - 1.0 / 128) < 4 * std::sqrt(p2 / f_n));
}

TEST_CASE("suffix weighting reproduces P(P_F = F) and E[r] = 4 at small scale") {
    LetterStream src(kCritical, 111, 0);
    PastExplorer ex(1 << 20);
    RunningStats len1, r;
    for (int i = 0; i < 200'000; ++i) {
        std::uint64_t hits = 0;
        const SuffixWalkResult res = visit_suffixes(
            src, ex, [&](std::uint64_t, std::uint64_t len, std::int64_t, std::int64_t) { hits += len == 1; },
            1 << 20);
        len1.add(static_cast<double>(hits) / 4.0);
        r.add(static_cast<double>(res.r));
    }
    CHECK(std::abs(len1.mean() - 0.25) < 1e-12);
    CHECK(std::abs(r.mean() - 4.0) < 0.4);
}

TEST_CASE("suffix-weighted Laplace transform of H* matches the closed form at lambda = 1") {
    LetterStream src(kCritical, 121, 0);
    PastExplorer ex(1 << 20);
    RunningStats st;
    for (int i = 0; i < 300'000; ++i) {
        double sum = 0.0;
        visit_suffixes(
            src, ex, [&](std::uint64_t, std::uint64_t, std::int64_t h, std::int64_t) { sum += std::exp(-double(h)); },
            1 << 24);
        st.add(sum / 4.0);
    }
    CHECK(std::abs(st.mean() - laplace_HPF(1.0).value) < 3 * st.se());
}
