#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "hcb/analytics.hpp"
#include "hcb/exploration.hpp"
#include "hcb/oracle.hpp"
#include "hcb/stream.hpp"

using namespace hcb;

namespace {

bool always(const Word&) { return true; }

const StepAtom* find_atom(const StepPmf& pmf, bool excursion, Letter l, std::int64_t xi, std::uint64_t eta) {
    for (const auto& a : pmf.atoms)
        if (a.excursion == excursion && a.letter == l && a.xi == xi && a.eta == eta) return &a;
    return nullptr;
}

}  // namespace

TEST_CASE("product measure: all words of length n carry total weight 1") {
    for (std::size_t n = 1; n <= 8; ++n) {
        const auto e = enumerate_words(n, always, "all");
        CHECK(e.matching_words == static_cast<std::uint64_t>(std::pow(5, n)));
        CHECK(e.numerator == (std::uint64_t{1} << (3 * n)));
        CHECK(e.weight == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto e10 = enumerate_reduced(10, [](const ReducedWord&) { return true; }, "all");
    CHECK(e10.numerator == (std::uint64_t{1} << 30));
    const auto p3 = enumerate_words(3, always, "all", WeightTable(0.3));
    CHECK_FALSE(p3.exact);
    CHECK(p3.weight == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("weights of small events") {
    const auto empty2 = enumerate_words(2, [](const Word& w) { return reduce(w).empty(); }, "empty reduction");
    CHECK(empty2.matching_words == 4);
    CHECK(empty2.numerator == 12);  // 3/16 = 12/64
    CHECK(word_weight_numerator(Word::parse("hcHFcH")) == 16);  // 2^-14 = 16 / 8^6
    CHECK(word_weight(Word::parse("hcHFcH")) == std::ldexp(1.0, -14));
    CHECK_THROWS_AS(enumerate_words(17, always, "too long"), std::invalid_argument);
}

TEST_CASE("reduction-state dynamic program agrees with brute force") {
    const std::vector<std::pair<std::string, std::function<bool(const ReducedWord&)>>> preds{
        {"empty", [](const ReducedWord& r) { return r.empty(); }},
        {"= H", [](const ReducedWord& r) { return r.word() == Word::parse("H"); }},
        {"no burgers", [](const ReducedWord& r) { return r.burgers.empty(); }},
        {"size 2", [](const ReducedWord& r) { return r.size() == 2; }},
    };
    for (std::size_t n = 1; n <= 7; ++n) {
        for (const auto& [name, p] : preds) {
            const auto a = enumerate_reduced(n, p, name);
            const auto b = enumerate_words(n, [&](const Word& w) { return p(reduce(w)); }, name);
            CHECK(a.matching_words == b.matching_words);
            CHECK(a.numerator == b.numerator);
        }
    }
}

TEST_CASE("closed word generator lists exactly the words with empty reduction") {
    for (std::size_t n = 2; n <= 8; n += 2) {
        std::uint64_t listed = 0;
        for_each_closed_word(n, [&](const Word& w) {
            CHECK(reduce(w).empty());
            ++listed;
        });
        const auto e = enumerate_reduced(n, [](const ReducedWord& r) { return r.empty(); }, "empty");
        CHECK(listed == e.matching_words);
    }
}

TEST_CASE("step law atoms") {
    const StepPmf pmf = excursion_pmf(10);
    double one = 0.0;
    for (const auto& a : pmf.atoms)
        if (a.eta == 1) one += a.prob;
    CHECK(one == 0.75);
    const StepAtom* hf = find_atom(pmf, true, Letter::h, 0, 2);
    const StepAtom* cf = find_atom(pmf, true, Letter::c, 0, 2);
    REQUIRE(hf);
    REQUIRE(cf);
    CHECK(hf->prob == 1.0 / 16);
    CHECK(cf->prob == 1.0 / 16);
    const StepAtom* chf = find_atom(pmf, true, Letter::c, 1, 3);
    REQUIRE(chf);
    CHECK(chf->prob == 1.0 / 128);
    CHECK(chf->numerator == 2 * 1 * 2);
    for (const auto& a : pmf.atoms) CHECK(a.prob == std::ldexp(static_cast<double>(a.numerator), -3 * static_cast<int>(a.eta)));
    CHECK(pmf.excursion_mass(Letter::h) == doctest::Approx(pmf.excursion_mass(Letter::c)).epsilon(1e-14));
    CHECK(pmf.enumerated + pmf.residual == doctest::Approx(1.0));
    CHECK(excursion_pmf(12).enumerated > pmf.enumerated);
}

TEST_CASE("step law matches the leftward explorer") {
    const StepPmf pmf = excursion_pmf(12);
    constexpr std::uint64_t N = 1'000'000;
    std::map<std::tuple<bool, Letter, std::int64_t, std::uint64_t>, std::uint64_t> freq;
    LetterStream src(WeightTable(0.5), 77, 0);
    PastExplorer ex(64);
    for (std::uint64_t i = 0; i < N; ++i) {
        const ExcursionStep s = ex.next(src);
        if (s.censored || s.eta > 12) continue;
        ++freq[{s.kind == ExcursionStep::Kind::excursion, s.letter, s.xi, s.eta}];
    }
    std::size_t tested = 0;
    for (const auto& a : pmf.atoms) {
        if (a.prob < 1e-4) continue;
        const double f = static_cast<double>(freq[{a.excursion, a.letter, a.xi, a.eta}]) / N;
        const double se = std::sqrt(a.prob * (1 - a.prob) / N);
        CHECK_MESSAGE(std::abs(f - a.prob) < 4 * se, "eta " << a.eta << " xi " << a.xi);
        ++tested;
    }
    CHECK(tested > 20);
}

TEST_CASE("enumerated step mass and the drift of xi") {
    const StepPmf p14 = excursion_pmf(14);
    MESSAGE("enumerated step mass at length 14: " << p14.enumerated);
    CHECK(p14.enumerated > 0.95);
    // Letters alone contribute -1/4; excursions bring the mean back to 0 only through the tail.
    const StepPmf p1 = excursion_pmf(1);
    CHECK(p1.mean_xi() == -0.25);
    double prev = -1.0;
    for (std::size_t L : {2, 6, 10, 14}) {
        const double m = excursion_pmf(L).mean_xi();
        CHECK(m < 0.0);
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("hitting law from enumeration brackets the quadrature") {
    const TauPmf tau = exact_tau_pmf(14, 6);
    CHECK(tau.lower[1] == 0.5);
    CHECK(tau.upper[1] == 0.5);
    double total = 0.0;
    for (std::size_t m = 1; m <= 6; ++m) {
        const ExactValue q = hitting_pmf(m - 1);
        CHECK(tau.lower[m] <= q.value + q.err + 1e-12);
        CHECK(q.value - q.err - 1e-12 <= tau.upper[m]);
        CHECK(tau.lower[m] <= tau.upper[m]);
        total += tau.lower[m];
    }
    CHECK(total <= 1.0);
}

TEST_CASE("exhaustive bijection verification") {
    const BijectionReport r1 = verify_bijection(1);
    CHECK(r1.words == 4);
    CHECK(r1.with_F == 2);
    const BijectionReport r3 = verify_bijection(3);
    CHECK(r3.words > 0);
    std::uint64_t sum = 0;
    for (const auto& [loops, n] : r3.by_loops) sum += n;
    CHECK(sum == r3.words);
    CHECK(r3.text().find("words ") != std::string::npos);
    CHECK_THROWS_AS(verify_bijection(6), std::invalid_argument);
}
