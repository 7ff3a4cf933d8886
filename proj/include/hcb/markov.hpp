#pragma once

#include <cstdint>

#include "hcb/word.hpp"

namespace hcb {

// D(1,n) computed twice: against the true past and against an independent
// one. Only the F's of X(1..n) that end future blocks see the past, so
//   D(1,n) = D'(1,n) + Delta_F(N) - Delta'_F(N),
// with N the number of such F's and Delta_F the sum of their D values.
struct MarkovDecomposition {
    std::int64_t d_true = 0, d_prime = 0;
    std::int64_t delta = 0, delta_prime = 0;
    std::uint64_t n_unmatched = 0;
    bool resolved = true;

    std::int64_t reconstructed() const noexcept { return d_prime + delta - delta_prime; }
};

MarkovDecomposition approximate_markov(std::size_t n, std::uint64_t seed, std::uint64_t replica,
                                       const WeightTable& w = WeightTable(0.5));

}  // namespace hcb
