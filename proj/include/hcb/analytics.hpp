#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace hcb {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    unsigned max_subintervals = 2000;  // per grid interval
};

// A certified number: value with an error estimate and the formula it came from.
// For quantities too large for a double, log_value carries the logarithm.
struct ExactValue {
    double value = 0.0;
    double err = 0.0;
    std::string tag;
    double log_value = 0.0;
};

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt2 = std::numbers::sqrt2;
inline constexpr double n_loop = 2.0;
inline constexpr double x_c = 1.0 / (4.0 * sqrt2);
inline constexpr double cut_a = (2.0 - pi) * sqrt2;
inline constexpr double cut_b = 2.0 * sqrt2;
inline constexpr double a_tilde = pi / sqrt2;
inline constexpr double c0 = 1.0 / sqrt2;
inline constexpr double hitting_tail = 4.0 / (pi * pi);          // P(tau^h = l) ~ hitting_tail log l / l^2
inline constexpr double partition_tail = 8.0 / (pi * pi);        // F_l ~ partition_tail (2 sqrt2)^l log l / l^2
inline constexpr double loop_tail = 256.0 / (pi * pi * pi * pi);  // P(|L(0)| = l) ~ loop_tail log^2 l / l^3
inline constexpr double cluster_tail = 32.0 / (pi * pi * pi * pi);  // P(|dc(0)| = l), same shape
inline constexpr double envelope_tail = pi * pi;                  // P(|de(0)| >= l) ~ envelope_tail / (l log^3 l)
inline constexpr double variance_lo = 4.0 * pi * pi;
inline constexpr double variance_hi = 8.0 * pi * pi;
inline constexpr double a1 = 2.0 / (pi * pi);
inline const double a2 = 4.0 / (pi * pi) * std::log(pi);
}  // namespace constants

// L(u) = log((1 + sqrt(1 - u^2)) / u), the kernel shared by every formula below.
double kernel_L(double u);

// F_l = 2 (2 sqrt2)^l * int_0^1 u (1 - pi u / 2)^l L(u) du. value overflows to
// inf for huge l; log_value and partition_F_scaled stay finite.
ExactValue partition_F(std::uint64_t l, const QuadratureSpec& q = {});
// F_l / (2 sqrt2)^l.
ExactValue partition_F_scaled(std::uint64_t l, const QuadratureSpec& q = {});

// P(tau^h = l + 1).
ExactValue hitting_pmf(std::uint64_t l, const QuadratureSpec& q = {});
// P(tau^h <= l + 1), summed in closed form under the integral.
ExactValue hitting_cdf(std::uint64_t l, const QuadratureSpec& q = {});
// Upper bound on sum_{j > l} P(tau^h = j + 1) from the asymptotic tail.
double hitting_tail_bound(std::uint64_t l);

ExactValue spectral_density(double v);  // throws std::domain_error outside (0, pi/sqrt2)
ExactValue spectral_mass(const QuadratureSpec& q = {});

ExactValue resolvent(double z, const QuadratureSpec& q = {});  // z > 2 sqrt2, or std::domain_error
ExactValue resolvent_series(double z, std::uint64_t terms, const QuadratureSpec& q = {});

// Generating function r(s) = E[s^tau^h] and 1 - r(s) evaluated stably.
ExactValue hitting_pgf(double s, const QuadratureSpec& q = {});
ExactValue one_minus_hitting_pgf(double s, const QuadratureSpec& q = {});

// E[exp(-lambda xi)] for lambda > 0.
ExactValue laplace_xi(double lambda, const QuadratureSpec& q = {});

// e^{-f(t)} = E[e^{-tT}] for the simple walk hitting time T of -1.
double f_helper(double t);

// E[exp(-lambda H*(P_F))].
ExactValue laplace_HPF(double lambda, const QuadratureSpec& q = {.abs_tol = 1e-9, .rel_tol = 1e-9});

struct StableLaplace {
    double zeta;      // exp(pi^2 lambda log lambda)
    double zeta_hat;  // exp(-lambda log lambda)
};
StableLaplace stable_limit_laplace(double lambda);

// int_0^1 L(u) / (eps + u) du, and the limit of its difference with
// log^2(1/eps)/2 + log 2 log(1/eps) as eps -> 0.
ExactValue kernel_resolvent_integral(double eps, const QuadratureSpec& q = {});
ExactValue kernel_resolvent_constant(const QuadratureSpec& q = {});

}  // namespace hcb
