#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hcb/word.hpp"

namespace hcb {

// Word weights at p = 1/2 are k / 8^n with integer k; `numerator` holds k
// there and is zero otherwise.
struct WeightedEnumeration {
    std::string predicate;
    std::size_t length = 0;
    std::uint64_t matching_words = 0;
    double weight = 0.0;
    std::uint64_t numerator = 0;
    bool exact = false;
};

double word_weight(const Word& w, const WeightTable& t = WeightTable(0.5));
std::uint64_t word_weight_numerator(const Word& w);  // over 8^|w|, p = 1/2

// Visits all 5^n words. Throws std::invalid_argument for n > 16.
WeightedEnumeration enumerate_words(std::size_t n, const std::function<bool(const Word&)>& predicate,
                                    std::string description, const WeightTable& t = WeightTable(0.5));
// Same, for predicates of the reduced word only; runs a dynamic program over
// reduction states instead of visiting every word.
WeightedEnumeration enumerate_reduced(std::size_t n, const std::function<bool(const ReducedWord&)>& predicate,
                                      std::string description, const WeightTable& t = WeightTable(0.5));

// One atom of the step law of the past decomposition.
struct StepAtom {
    bool excursion = false;
    Letter letter = Letter::h;  // the letter, or the burger that closes the excursion
    std::int64_t xi = 0;
    std::uint64_t eta = 1;
    double prob = 0.0;
    std::uint64_t numerator = 0;  // over 8^eta at p = 1/2
};

struct TruncatedPmf {
    std::map<std::int64_t, double> prob;
    double enumerated = 0.0;
    double residual = 0.0;  // certified upper bound on the mass not listed
};

struct StepPmf {
    std::vector<StepAtom> atoms;
    std::size_t max_len = 0;
    double enumerated = 0.0;
    double residual = 0.0;  // 1 - enumerated; every step has finite length
    // Mass of excursions closed by `closing` (h or c) with eta <= max_len.
    double excursion_mass(Letter closing) const;
    double mean_xi() const;  // over the listed atoms only
};

// Exact law of a step restricted to eta <= max_len (max_len <= 16).
StepPmf excursion_pmf(std::size_t max_len, const WeightTable& t = WeightTable(0.5));

// P(tau^h = m) for m = 1..max_m from the truncated step law. prob[m] is a
// lower bound and prob[m] + residual_at[m] an upper bound.
struct TauPmf {
    std::vector<double> lower;  // index m; index 0 unused
    std::vector<double> upper;
};
TauPmf exact_tau_pmf(std::size_t max_len, std::size_t max_m, const WeightTable& t = WeightTable(0.5));

struct BijectionReport {
    std::size_t k = 0;
    std::uint64_t words = 0;
    std::map<std::size_t, std::uint64_t> by_loops;  // loop count -> words
    std::uint64_t with_F = 0;
    std::string text() const;
};

// Round trip, loop count, Euler relations and the cluster count identity on
// every closed word of length 2k (k <= 5). Throws std::logic_error naming the
// first failing word.
BijectionReport verify_bijection(std::size_t k);
// The same checks on one word.
void verify_word(const Word& w);

// Every word of length n that reduces to the empty word, in lexicographic order of letters.
void for_each_closed_word(std::size_t n, const std::function<void(const Word&)>& fn);

}  // namespace hcb
