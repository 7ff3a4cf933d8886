#include "hcb/analytics.hpp"

#include <algorithm>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hcb {

using constants::pi;

namespace {


struct Integral {
    double value = 0.0;
    double err = 0.0;
};

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

template <class Fn>
double call(double x, void* fn) {
    return (*static_cast<const Fn*>(fn))(x);
}

// One grid interval by QAGS; the error budget is shared in proportion to width.
template <class Fn>
Integral piece(const Fn& f, double a, double b, double abs_tol, double rel_tol, std::size_t limit) {
    struct Workspace {
        gsl_integration_workspace* w;
        explicit Workspace(std::size_t n) : w(gsl_integration_workspace_alloc(n)) {}
        ~Workspace() { gsl_integration_workspace_free(w); }
    };
    // Per call, since integrands may themselves integrate.
    const Workspace ws(limit);
    gsl_function g{&call<Fn>, const_cast<Fn*>(&f)};
    Integral r;
    const int status = gsl_integration_qags(&g, a, b, abs_tol, rel_tol, limit, ws.w,
                                            &r.value, &r.err);
    // Roundoff and iteration-limit statuses still carry a usable estimate, judged by the caller.
    if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EMAXITER && status != GSL_ESING)
        r.err = std::numeric_limits<double>::infinity();
    return r;
}

// Sums quadrature over consecutive breakpoints and checks the combined error
// estimate against the requested tolerance. Integrands may carry a log
// singularity at 0, removed by u = w^2, and a square-root one at 1, removed by
// u = 1 - w^2.
template <class Fn>
Integral integrate(Fn&& f, std::vector<double> pts, const QuadratureSpec& q, const char* what) {
    static const bool quiet = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)quiet;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const auto g0 = [&f](double w) {
        const double u = w * w;
        return u == 0.0 ? 0.0 : 2.0 * w * f(u);
    };
    const auto g1 = [&f](double w) { return 2.0 * w * f(1.0 - w * w); };
    const double span = pts.back() - pts.front();
    Integral r;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const double tol = q.abs_tol * (b - a) / span;
        Integral p;
        if (a == 0.0) p = piece(g0, 0.0, std::sqrt(b), tol, q.rel_tol, q.max_subintervals);
        else if (b == 1.0) p = piece(g1, 0.0, std::sqrt(1.0 - a), tol, q.rel_tol, q.max_subintervals);
        else p = piece(f, a, b, tol, q.rel_tol, q.max_subintervals);
        r.value += p.value;
        r.err += p.err;
    }
    if (!(r.err <= std::max(q.abs_tol, q.rel_tol * std::abs(r.value))) || !std::isfinite(r.value))
        throw std::runtime_error(std::string(what) + ": quadrature tolerance not met (value " + fmt_g(r.value) +
                                 ", err " + fmt_g(r.err) + ")");
    return r;
}

// Breakpoints lo + s 2^k for k >= 0, resolving a feature of width s at lo.
std::vector<double> grid(double lo, double hi, double s) {
    std::vector<double> pts{lo, hi};
    for (double k = 1.0; lo + s * k < hi; k *= 2.0) pts.push_back(lo + s * k);
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double x) { return x < lo || x > hi; }), pts.end());
    return pts;
}

std::vector<double> merge(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

constexpr double kTwoOverPi = 2.0 / pi;

// (1 - pi u / 2)^m, computed through log1p on [0, 2/pi) and by sign on (2/pi, 1].
double power_term(double u, double m) {
    if (m == 0.0) return 1.0;
    const double base = 1.0 - pi * u / 2.0;
    if (base >= 0.0) return std::exp(m * std::log1p(-pi * u / 2.0));
    const double mag = std::exp(m * std::log(-base));
    return std::fmod(m, 2.0) == 0.0 ? mag : -mag;
}

// Breakpoints for integrands concentrated on u of order 1/(m + 1).
std::vector<double> power_grid(double m) {
    return merge(grid(0.0, kTwoOverPi, 1.0 / (m + 1.0)), {kTwoOverPi, 1.0});
}

// int_0^1 u L(u) (1 - pi u/2)^l du, i.e. F_l / (2 (2 sqrt2)^l).
Integral moment(std::uint64_t l, const QuadratureSpec& q) {
    const double m = static_cast<double>(l);
    return integrate([m](double u) { return u * kernel_L(u) * power_term(u, m); }, power_grid(m), q, "partition_F");
}

// 1 - r(s) = (2/pi) d int_0^1 L(u) / (d + pi (1 - d) u / 2) du with d = 1 - s.
Integral one_minus_pgf_from_gap(double d, const QuadratureSpec& q) {
    const double k = pi * (1.0 - d) / 2.0;
    const double scale = k > 0 ? std::min(1.0, d / k) : 1.0;
    const Integral i =
        integrate([d, k](double u) { return kernel_L(u) / (d + k * u); }, merge(grid(0.0, 1.0, scale), {1.0}), q,
                  "one_minus_hitting_pgf");
    return {kTwoOverPi * d * i.value, kTwoOverPi * d * i.err};
}

// d = 1 - s solving 1 - r(s) = 1 - e^{-lambda}; the left side increases in d.
double xi_gap(double lambda, const QuadratureSpec& q) {
    const double target = -std::expm1(-lambda);
    const auto below = [&](double log_d) { return one_minus_pgf_from_gap(std::exp(log_d), q).value < target; };
    // 1 - r grows like d log^2(1/d), so the root sits a few decades under the target.
    double hi = std::min(0.0, std::log(target) + 1.0), lo = hi - 8.0;
    while (!below(lo)) lo -= 8.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (below(mid)) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace

double kernel_L(double u) {
    // Written through 1/u to stay accurate as u -> 0.
    return std::log1p(std::sqrt((1.0 - u) * (1.0 + u))) - std::log(u);
}

ExactValue partition_F_scaled(std::uint64_t l, const QuadratureSpec& q) {
    const Integral i = moment(l, q);
    return {2.0 * i.value, 2.0 * i.err, "2 int u L(u) (1 - pi u/2)^l du", std::log(2.0 * i.value)};
}

ExactValue partition_F(std::uint64_t l, const QuadratureSpec& q) {
    const Integral i = moment(l, q);
    ExactValue v;
    v.tag = "F_l = 2 (2 sqrt2)^l int u L(u) (1 - pi u/2)^l du";
    v.log_value = std::log(2.0 * i.value) + static_cast<double>(l) * std::log(2.0 * constants::sqrt2);
    v.value = std::exp(v.log_value);
    v.err = v.value * (i.err / i.value);
    return v;
}

ExactValue hitting_pmf(std::uint64_t l, const QuadratureSpec& q) {
    const Integral i = moment(l, q);
    return {i.value, i.err, "P(tau^h = l+1) = sqrt2 (2 x_c)^(l+1) F_l", std::log(i.value)};
}

ExactValue hitting_cdf(std::uint64_t l, const QuadratureSpec& q) {
    const double m = static_cast<double>(l) + 1.0;
    const auto f = [m](double u) {
        const double base = 1.0 - pi * u / 2.0;
        const double one_minus = base >= 0.0 ? -std::expm1(m * std::log1p(-pi * u / 2.0)) : 1.0 - power_term(u, m);
        return kernel_L(u) * one_minus;
    };
    const Integral i = integrate(f, power_grid(m), q, "hitting_cdf");
    return {kTwoOverPi * i.value, kTwoOverPi * i.err, "(2/pi) int L(u) (1 - (1 - pi u/2)^(l+1)) du", 0.0};
}

double hitting_tail_bound(std::uint64_t l) {
    // int_l^inf (4/pi^2) log x / x^2 dx; the pmf is eventually below its asymptote times (1 + 1/log l).
    const double x = static_cast<double>(std::max<std::uint64_t>(l, 3));
    return constants::hitting_tail * (std::log(x) + 1.0) / x * (1.0 + 1.0 / std::log(x));
}

ExactValue spectral_density(double v) {
    if (!(v > 0.0 && v < constants::a_tilde)) throw std::domain_error("spectral_density: v outside (0, pi/sqrt2)");
    const double at = constants::a_tilde;
    return {v / (at * at) * kernel_L(v / at), 0.0, "(v/a^2) log(v / (a - sqrt(a^2 - v^2)))", 0.0};
}

ExactValue spectral_mass(const QuadratureSpec& q) {
    const double at = constants::a_tilde;
    // v = a u, so the density vanishes at both ends of [0, 1].
    const auto f = [at](double u) {
        const double v = at * u;
        return v > 0.0 && v < at ? at * spectral_density(v).value : 0.0;
    };
    const Integral i = integrate(f, grid(0.0, 1.0, 0.125), q, "spectral_mass");
    return {i.value, i.err, "int rho(v) dv", 0.0};
}

ExactValue resolvent(double z, const QuadratureSpec& q) {
    const double d = z - constants::cut_b;
    if (!(d > 0.0)) throw std::domain_error("resolvent: z must exceed 2 sqrt2");
    const double k = 2.0 * constants::a_tilde;
    // W(z) = int 2 rho(v) / (z - 2 sqrt2 + 2v) dv with v = a u.
    const Integral i = integrate([d, k](double u) { return 2.0 * u * kernel_L(u) / (d + k * u); },
                                 merge(grid(0.0, 1.0, std::min(1.0, d / k)), {1.0}), q, "resolvent");
    return {i.value, i.err, "W(z) = int 2 rho(v) / (z - 2 sqrt2 + 2 v) dv", 0.0};
}

ExactValue resolvent_series(double z, std::uint64_t terms, const QuadratureSpec& q) {
    const double ratio = constants::cut_b / z;
    if (!(ratio < 1.0)) throw std::domain_error("resolvent_series: needs z > 2 sqrt2");
    double sum = 0.0, err = 0.0, pw = 1.0 / z;
    for (std::uint64_t l = 0; l < terms; ++l) {
        const ExactValue f = partition_F_scaled(l, q);
        sum += f.value * pw;
        err += f.err * pw;
        pw *= ratio;
    }
    // F_l / (2 sqrt2)^l <= 1, so the remainder is a geometric tail.
    err += pw / (1.0 - ratio);
    return {sum, err, "sum F_l / z^(l+1)", 0.0};
}

ExactValue hitting_pgf(double s, const QuadratureSpec& q) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("hitting_pgf: s outside [0, 1]");
    const double k = pi * s / 2.0, d = 1.0 - s;
    const Integral i = integrate([s, k, d](double u) { return s * u * kernel_L(u) / (d + k * u); },
                                 merge(grid(0.0, 1.0, k > 0 ? std::min(1.0, d / k) : 1.0), {1.0}), q, "hitting_pgf");
    return {i.value, i.err, "sum s^(l+1) P(tau^h = l+1)", 0.0};
}

ExactValue one_minus_hitting_pgf(double s, const QuadratureSpec& q) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("one_minus_hitting_pgf: s outside [0, 1]");
    const Integral i = one_minus_pgf_from_gap(1.0 - s, q);
    return {i.value, i.err, "(2/pi)(1-s) int L(u) / (1 - s + pi s u/2) du", 0.0};
}

ExactValue laplace_xi(double lambda, const QuadratureSpec& q) {
    if (!(lambda > 0.0)) throw std::domain_error("laplace_xi: lambda must be positive");
    const double d = xi_gap(lambda, q);
    ExactValue v;
    v.value = 1.0 / (1.0 - d);
    // Bisection stops at relative width 1e-14 in d; quadrature error enters through the same root.
    v.err = v.value * v.value * d * 1e-12 + 1e-15;
    v.tag = "1 / s with r(s) = e^-lambda";
    v.log_value = -std::log1p(-d);
    return v;
}

double f_helper(double t) {
    if (!(t >= 0.0)) throw std::domain_error("f_helper: t must be non-negative");
    return t + std::log1p(std::sqrt(-std::expm1(-2.0 * t)));
}

ExactValue laplace_HPF(double lambda, const QuadratureSpec& q) {
    if (!(lambda >= 0.0)) throw std::domain_error("laplace_HPF: lambda must be non-negative");
    double eps = 0.0;
    if (lambda > 0.0) {
        const double d = xi_gap(lambda, q);
        eps = kTwoOverPi * d / (1.0 - d);
    }
    QuadratureSpec inner_q = q;
    inner_q.abs_tol = q.abs_tol * 1e-2;
    // Between consecutive h-steps the lazy walk visits G + 1 c-positions, G ~ Geometric(1/2),
    // so the c-side factor is E[sum of a^j over them] = 2 (2 - a)^-(k+1).
    const auto g = [&inner_q](double u) { return 2.0 * kernel_resolvent_integral(u, inner_q).value; };
    const auto outer = [&](double u) { return kernel_L(u) * u / (u + eps) * g(u); };
    std::vector<double> pts{0.0, 0.5, 1.0};
    if (eps > 0.0) pts = merge(pts, grid(0.0, 1.0, std::min(1.0, eps)));
    const Integral i = integrate(outer, pts, q, "laplace_HPF");
    const double c = 2.0 / (pi * pi * pi) * std::exp(lambda);
    return {c * i.value, c * i.err, "(2/pi^3) e^lambda int int L(u) L(v) 2u / ((u+eps)(u+v))", 0.0};
}

StableLaplace stable_limit_laplace(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("stable_limit_laplace: lambda must be positive");
    const double ll = lambda * std::log(lambda);
    return {std::exp(pi * pi * ll), std::exp(-ll)};
}

ExactValue kernel_resolvent_integral(double eps, const QuadratureSpec& q) {
    if (!(eps > 0.0)) throw std::domain_error("kernel_resolvent_integral: eps must be positive");
    const Integral i = integrate([eps](double u) { return kernel_L(u) / (eps + u); },
                                 merge(grid(0.0, 1.0, std::min(1.0, eps)), {1.0}), q, "kernel_resolvent_integral");
    return {i.value, i.err, "int L(u) / (eps + u) du", 0.0};
}

ExactValue kernel_resolvent_constant(const QuadratureSpec& q) {
    const Integral i = integrate(
        [](double u) { return (std::log1p(std::sqrt((1.0 - u) * (1.0 + u))) - std::log(2.0)) / u; },
        {0.0, 0.5, 0.9, 0.99, 1.0}, q, "kernel_resolvent_constant");
    return {pi * pi / 6.0 + i.value, i.err, "pi^2/6 + int log((1 + sqrt(1-u^2))/2) / u du", 0.0};
}

}  // namespace hcb
