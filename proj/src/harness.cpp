#include "hcb/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "hcb/bijection.hpp"
#include "hcb/counts.hpp"
#include "hcb/exploration.hpp"
#include "hcb/oracle.hpp"
#include "hcb/replicas.hpp"
#include "hcb/stats.hpp"
#include "hcb/stream.hpp"

#ifndef HCB_VERSION
#define HCB_VERSION "unknown"
#endif

namespace hcb {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
    const std::string s = trim(v);
    T out{};
    // Accept 1e6 style integers as well.
    if constexpr (std::is_integral_v<T>) {
        double d = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec != std::errc{} || p != s.data() + s.size() || d < 0 || d != std::floor(d) || d > 1.8e19)
            throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, s));
        out = static_cast<T>(d);
    } else {
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(out))
            throw ConfigError(fmt::format("{}: '{}' is not a number", key, s));
    }
    return out;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view v) {
    std::vector<T> out;
    std::string s(v);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_number<T>(key, item));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    const std::string s = trim(v);
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, s));
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt::format("{}", xs[i]);
    return s;
}

std::string num(double x) { return fmt::format("{:.10g}", x); }

// Splits `total` items over kChunks fixed chunks and runs fn(chunk, count) on each.
template <class Fn>
auto chunked(std::uint64_t total, bool parallel, Fn&& fn) {
    const std::uint64_t chunks = std::min<std::uint64_t>(kChunks, std::max<std::uint64_t>(total, 1));
    return run_replicas(
        chunks, [&](std::uint64_t i) { return fn(i, total / chunks + (i < total % chunks ? 1 : 0)); }, parallel);
}

MeanEstimate to_estimate(const RunningStats& s, std::uint64_t censored) {
    return {s.mean(), s.se(), s.count(), censored};
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) return std::nan("");
    std::sort(xs.begin(), xs.end());
    const double at = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(at));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (at - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

RunManifest start(const ExperimentConfig& cfg, std::string_view command) {
    RunManifest m;
    m.command = std::string(command);
    m.config = cfg.echo();
    m.version = version_string();
    fs::create_directories(cfg.out);
    return m;
}

void emit(RunManifest& m, const ExperimentConfig& cfg, const std::string& name, std::string_view content) {
    write_file_atomic(fs::path(cfg.out) / name, content);
    m.outputs.push_back(name);
}

void finish(RunManifest& m, const ExperimentConfig& cfg, const Timer& t) {
    m.wall_clock_seconds = t.seconds();
    m.write(fs::path(cfg.out) / (m.command + ".manifest.json"));
}

nlohmann::json chunk_seeds(std::uint64_t seed, std::uint64_t stream_base, std::uint64_t total) {
    return {{"seed", seed},
            {"stream_first", stream_base},
            {"stream_count", std::min<std::uint64_t>(kChunks, std::max<std::uint64_t>(total, 1))},
            {"rule", "chunk i reads Philox stream stream_first + i"}};
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, double x0, double x1, double y0,
                     double y1, double w, double h, const char* colour) {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i)
        pts += fmt::format("{:.1f},{:.1f} ", (xs[i] - x0) / (x1 - x0) * w, h - (ys[i] - y0) / (y1 - y0) * h);
    return fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="1"/>)" "\n", pts, colour);
}

}  // namespace

// ---- configuration ----

void ExperimentConfig::set(std::string_view key_in, std::string_view value) {
    const std::string key = trim(key_in);
    if (key == "command") command = trim(value);
    else if (key == "p") p = parse_number<double>(key, value);
    else if (key == "n") n = parse_number<std::uint64_t>(key, value);
    else if (key == "replicas") replicas = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out") out = trim(value);
    else if (key == "tol") tol = parse_number<double>(key, value);
    else if (key == "quad_abs_tol") quad.abs_tol = parse_number<double>(key, value);
    else if (key == "quad_rel_tol") quad.rel_tol = parse_number<double>(key, value);
    else if (key == "quad_max_subintervals") quad.max_subintervals = parse_number<unsigned>(key, value);
    else if (key == "ell_max") ell_max = parse_number<std::uint64_t>(key, value);
    else if (key == "letter_cap") letter_cap = parse_number<std::uint64_t>(key, value);
    else if (key == "backward_cap") backward_cap = parse_number<std::uint64_t>(key, value);
    else if (key == "max_len") max_len = parse_number<std::uint64_t>(key, value);
    else if (key == "stride") stride = parse_number<std::uint64_t>(key, value);
    else if (key == "k") k = parse_number<std::uint64_t>(key, value);
    else if (key == "word") word = trim(value);
    else if (key == "n_grid") n_grid = parse_list<std::uint64_t>(key, value);
    else if (key == "replicas_grid") replicas_grid = parse_list<std::uint64_t>(key, value);
    else if (key == "grid") grid = parse_list<double>(key, value);
    else if (key == "parallel") parallel = parse_bool(key, value);
    else throw ConfigError(fmt::format("unknown key '{}'", key));
}

void ExperimentConfig::load_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key=value", lineno));
        set(t.substr(0, eq), t.substr(eq + 1));
    }
}

void ExperimentConfig::load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    load_text(ss.str());
}

void ExperimentConfig::validate() const {
    const auto positive = [](const char* name, auto v) {
        if (!(v > 0)) throw ConfigError(fmt::format("{} must be positive", name));
    };
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
    positive("n", n);
    positive("replicas", replicas);
    positive("tol", tol);
    positive("quad_abs_tol", quad.abs_tol);
    positive("quad_rel_tol", quad.rel_tol);
    positive("quad_max_subintervals", quad.max_subintervals);
    positive("ell_max", ell_max);
    positive("letter_cap", letter_cap);
    positive("max_len", max_len);
    positive("stride", stride);
    positive("k", k);
    for (auto v : n_grid) positive("n_grid entries", v);
    for (auto v : replicas_grid) positive("replicas_grid entries", v);
    if (!replicas_grid.empty() && replicas_grid.size() != n_grid.size())
        throw ConfigError("replicas_grid must have one entry per n_grid entry");
    if (out.empty()) throw ConfigError("out must not be empty");
    if (!command.empty()) {
        const auto& names = command_names();
        if (std::find(names.begin(), names.end(), command) == names.end())
            throw ConfigError("unknown command '" + command + "'");
    }
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    return {{"command", command},
            {"p", num(p)},
            {"n", std::to_string(n)},
            {"replicas", std::to_string(replicas)},
            {"seed", std::to_string(seed)},
            {"out", out},
            {"tol", num(tol)},
            {"quad_abs_tol", num(quad.abs_tol)},
            {"quad_rel_tol", num(quad.rel_tol)},
            {"quad_max_subintervals", std::to_string(quad.max_subintervals)},
            {"ell_max", std::to_string(ell_max)},
            {"letter_cap", std::to_string(letter_cap)},
            {"backward_cap", std::to_string(backward_cap)},
            {"max_len", std::to_string(max_len)},
            {"stride", std::to_string(stride)},
            {"k", std::to_string(k)},
            {"word", word},
            {"n_grid", join(n_grid)},
            {"replicas_grid", join(replicas_grid)},
            {"grid", join(grid)},
            {"parallel", parallel ? "true" : "false"}};
}

// ---- manifest ----

std::string version_string() { return HCB_VERSION; }

void write_file_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

nlohmann::json RunManifest::to_json() const {
    return {{"command", command}, {"config", config},    {"version", version},
            {"seeds", seeds},     {"wall_clock_seconds", wall_clock_seconds},
            {"summary", summary}, {"outputs", outputs}};
}

void RunManifest::write(const fs::path& path) const { write_file_atomic(path, to_json().dump(2) + "\n"); }

// ---- Monte Carlo building blocks ----

HittingLawResult hitting_law_mc(std::uint64_t seed, std::uint64_t replicas, std::uint64_t ell_max,
                                std::uint64_t letter_cap, bool parallel) {
    const auto parts = chunked(replicas, parallel, [&](std::uint64_t chunk, std::uint64_t count) {
        HittingLawResult r;
        r.hits.assign(ell_max + 1, 0);
        LetterStream src(WeightTable(0.5), seed, chunk);
        PastExplorer ex(letter_cap);
        for (std::uint64_t i = 0; i < count; ++i) {
            std::int64_t h = 0;
            std::uint64_t steps = 0;
            bool censored = false;
            while (steps <= ell_max) {
                const ExcursionStep s = ex.next(src);
                if (s.censored) {
                    censored = true;
                    break;
                }
                if (s.side != Side::h) continue;
                ++steps;
                h += s.xi;
                if (h == -1) break;
            }
            if (censored) {
                ++r.censored;
                continue;
            }
            ++r.samples;
            if (h == -1) ++r.hits[steps - 1];
        }
        return r;
    });
    HittingLawResult out;
    out.hits.assign(ell_max + 1, 0);
    for (const auto& r : parts) {
        out.samples += r.samples;
        out.censored += r.censored;
        for (std::size_t l = 0; l <= ell_max; ++l) out.hits[l] += r.hits[l];
    }
    return out;
}

std::vector<MeanEstimate> martingale_mc(std::uint64_t seed, std::uint64_t samples, const std::vector<double>& ts,
                                        std::uint64_t letter_cap, bool parallel) {
    std::vector<double> f(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) f[i] = f_helper(ts[i]);
    struct Part {
        std::vector<RunningStats> st;
        std::uint64_t censored = 0;
    };
    const auto parts = chunked(samples, parallel, [&](std::uint64_t chunk, std::uint64_t count) {
        Part p;
        p.st.resize(ts.size());
        LetterStream src(WeightTable(0.5), seed, chunk);
        PastExplorer ex(letter_cap);
        for (std::uint64_t i = 0; i < count; ++i) {
            const XiEta s = sample_xi_eta(src, ex);
            p.censored += s.censored;
            for (std::size_t j = 0; j < ts.size(); ++j) {
                if (s.censored) p.st[j].add(ts[j] == 0.0 ? 1.0 : 0.0);
                else p.st[j].add(std::exp(-ts[j] * static_cast<double>(s.eta) - f[j] * static_cast<double>(s.xi)));
            }
        }
        return p;
    });
    std::vector<MeanEstimate> out(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
        RunningStats all;
        std::uint64_t censored = 0;
        for (const auto& p : parts) all.merge(p.st[j]), censored += p.censored;
        out[j] = to_estimate(all, censored);
    }
    return out;
}

SuffixLaplace suffix_laplace_mc(std::uint64_t seed, std::uint64_t samples, const std::vector<double>& lambdas,
                                std::uint64_t letter_cap, bool parallel, bool keep_r) {
    struct Part {
        std::vector<RunningStats> st;
        std::vector<double> r;
        std::uint64_t censored = 0;
    };
    const auto parts = chunked(samples, parallel, [&](std::uint64_t chunk, std::uint64_t count) {
        Part p;
        p.st.resize(lambdas.size());
        LetterStream src(WeightTable(0.5), seed, chunk);
        PastExplorer ex(std::min<std::uint64_t>(letter_cap, std::uint64_t{1} << 20));
        std::vector<double> sum(lambdas.size());
        for (std::uint64_t i = 0; i < count; ++i) {
            std::fill(sum.begin(), sum.end(), 0.0);
            const SuffixWalkResult res = visit_suffixes(
                src, ex,
                [&](std::uint64_t, std::uint64_t, std::int64_t h, std::int64_t) {
                    for (std::size_t j = 0; j < lambdas.size(); ++j) sum[j] += std::exp(-lambdas[j] * double(h));
                },
                letter_cap);
            p.censored += res.censored;
            for (std::size_t j = 0; j < lambdas.size(); ++j) p.st[j].add(sum[j] / 4.0);
            if (keep_r) p.r.push_back(static_cast<double>(res.r));
        }
        return p;
    });
    SuffixLaplace out;
    out.laplace.resize(lambdas.size());
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        RunningStats all;
        for (const auto& p : parts) all.merge(p.st[j]);
        out.laplace[j] = to_estimate(all, 0);
    }
    for (const auto& p : parts) {
        out.censored += p.censored;
        out.r_values.insert(out.r_values.end(), p.r.begin(), p.r.end());
    }
    for (auto& e : out.laplace) e.censored = out.censored;
    return out;
}

std::vector<LaplaceBracket> future_laplace_mc(std::uint64_t seed, std::uint64_t samples,
                                              const std::vector<double>& lambdas, std::uint64_t length_cap,
                                              bool parallel) {
    struct Part {
        std::vector<RunningStats> lo, hi;
        std::uint64_t censored = 0;
    };
    const auto parts = chunked(samples, parallel, [&](std::uint64_t chunk, std::uint64_t count) {
        Part p;
        p.lo.resize(lambdas.size());
        p.hi.resize(lambdas.size());
        LetterStream src(WeightTable(0.5), seed, chunk);
        for (std::uint64_t i = 0; i < count; ++i) {
            const FutureBlock b = next_future_block(src, false, length_cap);
            p.censored += b.censored;
            for (std::size_t j = 0; j < lambdas.size(); ++j) {
                const double v = std::exp(-lambdas[j] * static_cast<double>(b.hstar));
                p.lo[j].add(b.censored ? 0.0 : v);
                p.hi[j].add(v);
            }
        }
        return p;
    });
    std::vector<LaplaceBracket> out(lambdas.size());
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        RunningStats lo, hi;
        for (const auto& p : parts) lo.merge(p.lo[j]), hi.merge(p.hi[j]), out[j].censored += p.censored;
        out[j].lower = lo.mean();
        out[j].upper = hi.mean();
        out[j].se = std::max(lo.se(), hi.se());
        out[j].samples = lo.count();
    }
    return out;
}

SamplerComparison compare_pf_samplers(std::uint64_t seed, std::uint64_t samples, std::uint64_t max_len,
                                      double min_prob, bool parallel) {
    struct Part {
        std::map<std::int64_t, std::uint64_t> len_b, len_f, h_b, h_f;
        std::uint64_t attempts = 0, censored = 0;
    };
    const auto parts = chunked(samples, parallel, [&](std::uint64_t chunk, std::uint64_t count) {
        Part p;
        ShortBiasedSampler biased(seed, 2 * chunk, max_len);
        LetterStream fwd(WeightTable(0.5), seed, 2 * chunk + 1);
        for (std::uint64_t i = 0; i < count; ++i) {
            const Word w = biased.next();
            const ReducedWord r = reduce(w);
            ++p.len_b[static_cast<std::int64_t>(w.size())];
            ++p.h_b[std::count(r.orders.begin(), r.orders.end(), Letter::H)];
        }
        p.attempts = biased.attempts();
        for (std::uint64_t i = 0; i < count;) {
            const FutureBlock b = next_future_block(fwd, false, max_len);
            if (b.censored) {
                ++p.censored;
                continue;
            }
            ++p.len_f[static_cast<std::int64_t>(b.length)];
            ++p.h_f[b.hstar];
            ++i;
        }
        return p;
    });
    Part all;
    for (const auto& p : parts) {
        for (const auto& [k, v] : p.len_b) all.len_b[k] += v;
        for (const auto& [k, v] : p.len_f) all.len_f[k] += v;
        for (const auto& [k, v] : p.h_b) all.h_b[k] += v;
        for (const auto& [k, v] : p.h_f) all.h_f[k] += v;
        all.attempts += p.attempts;
        all.censored += p.censored;
    }
    SamplerComparison out;
    out.samples = samples;
    out.biased_attempts = all.attempts;
    out.future_censored = all.censored;
    const double n = static_cast<double>(samples);
    const auto compare = [&](const char* name, const std::map<std::int64_t, std::uint64_t>& a,
                             const std::map<std::int64_t, std::uint64_t>& b) {
        std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> both;
        for (const auto& [k, v] : a) both[k].first = v;
        for (const auto& [k, v] : b) both[k].second = v;
        for (const auto& [k, v] : both) {
            const double pa = double(v.first) / n, pb = double(v.second) / n;
            if ((pa + pb) / 2 < min_prob) continue;
            const double z = difference_z(pa, std::sqrt(pa * (1 - pa) / n), pb, std::sqrt(pb * (1 - pb) / n));
            out.atoms.push_back({name, k, pa, pb, z});
            out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
        }
    };
    compare("length", all.len_b, all.len_f);
    compare("hstar", all.h_b, all.h_f);
    return out;
}

std::vector<EndpointSample> endpoint_replicas(std::uint64_t n, std::uint64_t replicas, std::uint64_t seed,
                                              std::uint64_t backward_cap_factor, bool parallel) {
    TrajectoryOptions opt;
    opt.backward_cap = backward_cap_factor * n;
    return run_replicas(
        replicas,
        [&](std::uint64_t r) {
            const Endpoint e = endpoint_counts(n, seed, r, opt);
            return EndpointSample{double(e.S), double(e.D), e.unresolved == 0};
        },
        parallel);
}

VariancePoint variance_point(std::uint64_t n, std::uint64_t replicas, std::uint64_t seed,
                             std::uint64_t backward_cap_factor, bool parallel) {
    const auto xs = endpoint_replicas(n, replicas, seed, backward_cap_factor, parallel);
    VariancePoint v;
    v.n = n;
    v.replicas = replicas;
    std::vector<double> s, d;
    for (const auto& x : xs) {
        s.push_back(x.S);
        if (x.resolved) d.push_back(x.D);
        else ++v.unresolved;
    }
    const double nn = static_cast<double>(n), scale = std::log(nn) * std::log(nn) / nn;
    const VarianceEstimate vs = variance_with_se(s);
    v.var_s_over_n = vs.variance / nn;
    v.var_s_over_n_se = vs.se / nn;
    RunningStats ds;
    for (double x : d) ds.add(x);
    v.mean_d = ds.mean();
    v.mean_d_se = ds.se();
    const VarianceEstimate vd = variance_with_se(d);
    v.scaled_var_d = vd.variance * scale;
    v.scaled_var_d_se = vd.se * scale;
    const Interval ci = bootstrap_variance_ci(d, 1000, 0.95, seed ^ n);
    v.boot_lo = ci.lo * scale;
    v.boot_hi = ci.hi * scale;
    return v;
}

// ---- commands ----

RunManifest cmd_fig1(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "fig1");
    const std::vector<double> ps = cfg.grid.empty() ? std::vector<double>{cfg.p} : cfg.grid;
    const std::uint64_t cap = cfg.backward_cap ? cfg.backward_cap : 4096;
    const double N = static_cast<double>(cfg.n), sq = std::sqrt(N);
    std::string svg = fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}">)" "\n", 640,
                                  200 * ps.size());
    m.seeds = nlohmann::json::array();
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        const double p = ps[pi];
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("fig1 needs 0 < p < 1");
        TrajectoryOptions opt;
        opt.weights = WeightTable(p);
        opt.backward_cap = cap * cfg.n;
        CountTrajectory t;
        std::uint64_t replica = 0, breaches = 0;
        for (;; ++replica) {
            t = trajectory(cfg.n, cfg.seed, replica, opt);
            if (t.complete() || replica >= 16) break;
            ++breaches;
        }
        m.seeds.push_back({{"p", p}, {"seed", cfg.seed}, {"replica", replica}});
        const bool critical = p == 0.5;
        std::string csv = critical ? "step,S,D,S_over_sqrtN,D_over_sqrtN,D_logN_over_2pi_sqrtN\n"
                                   : "step,S,D,S_over_sqrtN,D_over_sqrtN\n";
        double dmin = 0, dmax = 0;
        std::vector<double> xs, s_pts, d_pts;
        const std::uint64_t plot_stride = std::max<std::uint64_t>(1, cfg.n / 2000);
        for (std::uint64_t k = 1; k <= cfg.n; ++k) {
            const auto d = t.D(k);
            const double S = t.S[k - 1];
            if (d) {
                dmin = std::min(dmin, *d / sq);
                dmax = std::max(dmax, *d / sq);
            }
            if (k % cfg.stride == 0 || k == cfg.n) {
                const std::string dv = d ? std::to_string(*d) : "";
                const std::string dn = d ? num(*d / sq) : "";
                csv += fmt::format("{},{},{},{},{}", k, t.S[k - 1], dv, num(S / sq), dn);
                if (critical) csv += "," + (d ? num(*d * std::log(N) / (2 * constants::pi * sq)) : std::string());
                csv += '\n';
            }
            if (k % plot_stride == 0 && d) {
                xs.push_back(double(k) / N);
                s_pts.push_back(S / sq);
                d_pts.push_back(*d / sq);
            }
        }
        const std::string tag = fmt::format("p{}", p);
        emit(m, cfg, "fig1_" + tag + ".csv", csv);
        svg += fmt::format(R"svg(<g transform="translate(0,{})"><text x="4" y="14" font-size="12">p = {}</text>)svg" "\n",
                           200 * pi, p);
        svg += polyline(xs, s_pts, 0, 1, -3, 3, 640, 200, "#1f5fbf");
        svg += polyline(xs, d_pts, 0, 1, -3, 3, 640, 200, "#bf3f1f");
        svg += "</g>\n";
        m.summary["p=" + num(p)] = {{"D_over_sqrtN_range", dmax - dmin},
                                    {"S_over_sqrtN_final", t.S.back() / sq},
                                    {"unresolved_retries", breaches},
                                    {"complete", t.complete()}};
    }
    svg += "</svg>\n";
    emit(m, cfg, "fig1.svg", svg);
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_hitting_law(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "hitting_law");
    const HittingLawResult r = hitting_law_mc(cfg.seed, cfg.replicas, cfg.ell_max, cfg.letter_cap, cfg.parallel);
    m.seeds = chunk_seeds(cfg.seed, 0, cfg.replicas);
    std::string csv = "ell,mc_prob,mc_se,exact_prob,z_score\n";
    double max_z = 0;
    const double n = static_cast<double>(r.samples);
    for (std::uint64_t l = 0; l <= cfg.ell_max; ++l) {
        const double f = double(r.hits[l]) / n;
        const ExactValue e = hitting_pmf(l, cfg.quad);
        const double se = std::sqrt(e.value * (1 - e.value) / n);
        const double z = binomial_z(r.hits[l], r.samples, e.value);
        max_z = std::max(max_z, std::abs(z));
        csv += fmt::format("{},{},{},{},{}\n", l, num(f), num(se), num(e.value), num(z));
    }
    emit(m, cfg, "hitting_law.csv", csv);
    m.summary = {{"samples", r.samples}, {"censored", r.censored}, {"max_abs_z", max_z}, {"tol", cfg.tol},
                 {"pass", max_z < cfg.tol}};
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_variance_scan(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "variance_scan");
    const std::vector<std::uint64_t> grid = cfg.n_grid.empty() ? std::vector<std::uint64_t>{cfg.n} : cfg.n_grid;
    const std::uint64_t cap = cfg.backward_cap ? cfg.backward_cap : 4096;
    std::string csv =
        "n,replicas,unresolved,var_S_over_n,var_S_over_n_se,mean_D,mean_D_se,log2n_over_n_var_D,se,boot_lo,boot_hi\n";
    m.seeds = {{"seed", cfg.seed}, {"rule", "replica r reads Philox streams 2r (forward) and 2r+1 (backward)"}};
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::uint64_t reps = cfg.replicas_grid.empty() ? cfg.replicas : cfg.replicas_grid[i];
        const VariancePoint v = variance_point(grid[i], reps, cfg.seed, cap, cfg.parallel);
        csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", v.n, v.replicas, v.unresolved, num(v.var_s_over_n),
                           num(v.var_s_over_n_se), num(v.mean_d), num(v.mean_d_se), num(v.scaled_var_d),
                           num(v.scaled_var_d_se), num(v.boot_lo), num(v.boot_hi));
        pts.push_back({{"n", v.n},
                       {"scaled_var_D", v.scaled_var_d},
                       {"se", v.scaled_var_d_se},
                       {"unresolved", v.unresolved},
                       {"var_S_over_n", v.var_s_over_n},
                       {"mean_D", v.mean_d}});
    }
    emit(m, cfg, "variance_scan.csv", csv);
    m.summary = {{"points", pts},
                 {"asymptotic_bracket", {constants::variance_lo, constants::variance_hi}},
                 {"backward_cap_factor", cap}};
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_observables(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "observables");
    struct Part {
        std::vector<double> loop, perim, env;
        std::uint64_t censored = 0, violations = 0;
    };
    const auto parts = chunked(cfg.replicas, cfg.parallel, [&](std::uint64_t chunk, std::uint64_t count) {
        Part p;
        LetterStream src(WeightTable(0.5), cfg.seed, chunk);
        PastExplorer ex(std::min<std::uint64_t>(cfg.letter_cap, std::uint64_t{1} << 20));
        for (std::uint64_t i = 0; i < count; ++i) {
            const ObservableSample o = typical_observables(src, ex, cfg.letter_cap);
            if (o.censored) {
                ++p.censored;
                continue;
            }
            p.violations += o.cluster_perimeter >= o.loop_len;
            p.loop.push_back(double(o.loop_len));
            p.perim.push_back(double(o.cluster_perimeter));
            p.env.push_back(double(o.envelope_boundary));
        }
        return p;
    });
    Part all;
    for (const auto& p : parts) {
        all.loop.insert(all.loop.end(), p.loop.begin(), p.loop.end());
        all.perim.insert(all.perim.end(), p.perim.begin(), p.perim.end());
        all.env.insert(all.env.end(), p.env.begin(), p.env.end());
        all.censored += p.censored;
        all.violations += p.violations;
    }
    const double pi4 = std::pow(constants::pi, 4);
    const auto theory = [&](const std::string& q, double l) {
        const double lg = std::log(l);
        if (q == "loop") return 128.0 / pi4 * lg * lg / (l * l);
        if (q == "perimeter") return 16.0 / pi4 * lg * lg / (l * l);
        return constants::envelope_tail / (l * lg * lg * lg);
    };
    // The pmf tails integrate to ccdf tails (c/2) log^2 l / l^2 at leading order.
    std::string csv = "quantity,ell,ccdf,ccdf_se,theory_ccdf,ratio\n";
    const auto table = [&](const std::string& q, std::vector<double>& xs) {
        std::sort(xs.begin(), xs.end());
        const double n = double(xs.size()) + double(all.censored);
        for (double l = 2; l <= 1 << 20; l *= 2) {
            const auto ge = double(xs.end() - std::lower_bound(xs.begin(), xs.end(), l));
            const double c = ge / n;
            if (ge == 0) break;
            const double th = theory(q, l);
            csv += fmt::format("{},{},{},{},{},{}\n", q, l, num(c), num(std::sqrt(c * (1 - c) / n)), num(th),
                               num(l >= 8 ? c / th : std::nan("")));
        }
    };
    table("loop", all.loop);
    table("perimeter", all.perim);
    table("envelope", all.env);
    emit(m, cfg, "observables.csv", csv);
    m.seeds = chunk_seeds(cfg.seed, 0, cfg.replicas);
    m.summary = {{"samples", all.loop.size()},
                 {"censored", all.censored},
                 {"perimeter_not_below_loop", all.violations},
                 {"min_loop_length", all.loop.empty() ? 0.0 : all.loop.front()}};
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_martingale(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "martingale");
    const std::vector<double> ts = cfg.grid.empty() ? std::vector<double>{0.0, 0.01, 0.1, 1.0} : cfg.grid;
    const auto est = martingale_mc(cfg.seed, cfg.replicas, ts, cfg.letter_cap, cfg.parallel);
    std::string csv = "t,f_t,mean,se,z,censored\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const double z = est[j].se > 0 ? (est[j].mean - 1.0) / est[j].se : (est[j].mean == 1.0 ? 0.0 : INFINITY);
        csv += fmt::format("{},{},{},{},{},{}\n", num(ts[j]), num(f_helper(ts[j])), num(est[j].mean), num(est[j].se),
                           num(z), est[j].censored);
        rows.push_back({{"t", ts[j]}, {"mean", est[j].mean}, {"se", est[j].se}, {"z", z}});
    }
    emit(m, cfg, "martingale.csv", csv);
    // Rescaled sums over n steps, to compare with (sigma, -pi^2/2).
    const std::uint64_t cloud = std::min<std::uint64_t>(cfg.replicas, 200);
    const double n = static_cast<double>(cfg.n), lg = std::log(n);
    std::string pts = "replica,sum_eta_scaled,sum_xi_scaled,censored\n";
    RunningStats xi_scaled;
    const auto sums = run_replicas(
        cloud,
        [&](std::uint64_t r) {
            LetterStream src(WeightTable(0.5), cfg.seed, kChunks + r);
            PastExplorer ex(cfg.letter_cap);
            double eta = 0, xi = 0;
            std::uint64_t cens = 0;
            for (std::uint64_t i = 0; i < cfg.n; ++i) {
                const XiEta s = sample_xi_eta(src, ex);
                eta += double(s.eta);
                xi += double(s.xi);
                cens += s.censored;
            }
            return std::array<double, 3>{eta / (n * n / std::pow(lg, 4)), xi / (n / (lg * lg)), double(cens)};
        },
        cfg.parallel);
    for (std::size_t r = 0; r < sums.size(); ++r) {
        pts += fmt::format("{},{},{},{}\n", r, num(sums[r][0]), num(sums[r][1]), sums[r][2]);
        xi_scaled.add(sums[r][1]);
    }
    emit(m, cfg, "martingale_cloud.csv", pts);
    m.seeds = chunk_seeds(cfg.seed, 0, cfg.replicas);
    m.seeds["cloud_streams"] = {kChunks, kChunks + cloud};
    m.summary = {{"rows", rows}, {"cloud_mean_xi_scaled", xi_scaled.mean()}, {"target", -constants::pi * constants::pi / 2}};
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_future_stats(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "future_stats");
    const std::vector<double> ls = cfg.grid.empty() ? std::vector<double>{0.1, 0.5, 1.0} : cfg.grid;
    const SuffixLaplace route1 = suffix_laplace_mc(cfg.seed, cfg.replicas, ls, cfg.letter_cap, cfg.parallel);
    const auto route2 = future_laplace_mc(cfg.seed + 1, cfg.replicas, ls, std::uint64_t{1} << 18, cfg.parallel);
    std::string csv = "lambda,exact,suffix_mean,suffix_se,suffix_z,block_lower,block_upper,block_se,block_censored\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t j = 0; j < ls.size(); ++j) {
        const ExactValue e = laplace_HPF(ls[j]);
        const double z = (route1.laplace[j].mean - e.value) / route1.laplace[j].se;
        csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", num(ls[j]), num(e.value), num(route1.laplace[j].mean),
                           num(route1.laplace[j].se), num(z), num(route2[j].lower), num(route2[j].upper),
                           num(route2[j].se), route2[j].censored);
        rows.push_back({{"lambda", ls[j]}, {"exact", e.value}, {"suffix_mean", route1.laplace[j].mean},
                        {"suffix_se", route1.laplace[j].se}, {"z", z}, {"block_lower", route2[j].lower},
                        {"block_upper", route2[j].upper}});
    }
    emit(m, cfg, "future_laplace.csv", csv);

    const SamplerComparison cmp = compare_pf_samplers(cfg.seed + 2, cfg.replicas, cfg.max_len, 1e-3, cfg.parallel);
    std::string atoms = "quantity,value,p_biased,p_future,z\n";
    for (const auto& a : cmp.atoms)
        atoms += fmt::format("{},{},{},{},{}\n", a.quantity, a.value, num(a.p_biased), num(a.p_future), num(a.z));
    emit(m, cfg, "pf_samplers.csv", atoms);

    const std::vector<std::uint64_t> grid =
        cfg.n_grid.empty() ? std::vector<std::uint64_t>{10'000, 100'000, 1'000'000} : cfg.n_grid;
    std::string q = "n,replicas,q50,q95,frac_positive\n";
    const std::uint64_t reps = std::min<std::uint64_t>(cfg.replicas, 200);
    for (std::uint64_t n : grid) {
        const double scale = std::sqrt(double(n)) / (std::log(double(n)) * std::log(double(n)));
        const auto counts = run_replicas(
            reps,
            [&](std::uint64_t r) {
                LetterStream src(WeightTable(0.5), cfg.seed + 3, r);
                return double(future_exploration(src, n).unmatched_f());
            },
            cfg.parallel);
        std::vector<double> scaled;
        double pos = 0;
        for (double c : counts) scaled.push_back(c / scale), pos += c >= 1;
        q += fmt::format("{},{},{},{},{}\n", n, reps, num(quantile(scaled, 0.5)), num(quantile(scaled, 0.95)),
                         num(pos / double(reps)));
    }
    emit(m, cfg, "unmatched_f_quantiles.csv", q);
    m.seeds = {{"suffix_route", chunk_seeds(cfg.seed, 0, cfg.replicas)},
               {"block_route", chunk_seeds(cfg.seed + 1, 0, cfg.replicas)},
               {"sampler_comparison", {{"seed", cfg.seed + 2}, {"rule", "chunk i: streams 2i (biased), 2i+1 (blocks)"}}},
               {"unmatched_f", {{"seed", cfg.seed + 3}, {"rule", "replica r reads stream r"}}}};
    m.summary = {{"laplace", rows},
                 {"suffix_censored", route1.censored},
                 {"sampler_max_abs_z", cmp.max_abs_z},
                 {"sampler_atoms", cmp.atoms.size()},
                 {"sampler_max_len", cfg.max_len}};
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_exact_eval(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "exact_eval");
    std::string csv = "quantity,argument,value,err,log_value,formula\n";
    const auto row = [&](const std::string& q, double arg, const ExactValue& v) {
        csv += fmt::format("{},{},{},{},{},\"{}\"\n", q, num(arg), num(v.value), num(v.err), num(v.log_value), v.tag);
    };
    std::vector<std::uint64_t> ells;
    for (std::uint64_t l = 0; l <= cfg.ell_max; ++l) ells.push_back(l);
    for (std::uint64_t l : {100ULL, 1000ULL, 10000ULL, 100000ULL}) ells.push_back(l);
    for (std::uint64_t l : ells) {
        row("F_scaled", double(l), partition_F_scaled(l, cfg.quad));
        row("hitting_pmf", double(l), hitting_pmf(l, cfg.quad));
    }
    row("hitting_cdf", double(cfg.ell_max), hitting_cdf(cfg.ell_max, cfg.quad));
    row("spectral_mass", 0, spectral_mass(cfg.quad));
    for (double z : {2 * constants::sqrt2 + 1e-6, 3.5, 4.0, 8.0}) row("resolvent", z, resolvent(z, cfg.quad));
    const std::vector<double> ls = cfg.grid.empty() ? std::vector<double>{0.0, 0.1, 0.5, 1.0} : cfg.grid;
    for (double l : ls) {
        row("laplace_HPF", l, laplace_HPF(l));
        if (l > 0) row("laplace_xi", l, laplace_xi(l, cfg.quad));
    }
    row("kernel_resolvent_constant", 0, kernel_resolvent_constant(cfg.quad));
    emit(m, cfg, "exact_eval.csv", csv);
    m.seeds = nullptr;
    m.summary = {{"F0", partition_F(0, cfg.quad).value},
                 {"spectral_mass", spectral_mass(cfg.quad).value},
                 {"laplace_HPF_0", laplace_HPF(0).value}};
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_oracle_verify(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "oracle_verify");
    const BijectionReport r = verify_bijection(cfg.k);
    emit(m, cfg, "bijection_report.txt", r.text());
    const std::size_t L = std::min<std::uint64_t>(cfg.max_len, 14);
    const StepPmf pmf = excursion_pmf(L);
    std::string csv = "kind,letter,xi,eta,prob,numerator_over_8_pow_eta\n";
    for (const auto& a : pmf.atoms)
        csv += fmt::format("{},{},{},{},{},{}\n", a.excursion ? "excursion" : "letter",
                           Word(std::vector<Letter>{a.letter}).str(), a.xi, a.eta, num(a.prob), a.numerator);
    emit(m, cfg, "step_pmf.csv", csv);
    const TauPmf tau = exact_tau_pmf(L, 6);
    std::string t = "tau,lower,upper,quadrature\n";
    for (std::size_t k = 1; k < tau.lower.size(); ++k)
        t += fmt::format("{},{},{},{}\n", k, num(tau.lower[k]), num(tau.upper[k]), num(hitting_pmf(k - 1).value));
    emit(m, cfg, "tau_pmf.csv", t);
    m.seeds = nullptr;
    m.summary = {{"k", cfg.k}, {"words", r.words}, {"step_mass_enumerated", pmf.enumerated}, {"max_len", L}};
    finish(m, cfg, timer);
    return m;
}

RunManifest cmd_bijection(const ExperimentConfig& cfg) {
    const Timer timer;
    RunManifest m = start(cfg, "bijection");
    const Word w = Word::parse(cfg.word.empty() ? "hcHhhcHcHCFhhhHCHF" : cfg.word);
    const LoopTriangulation t = word_to_triangulation(w);
    const DecoratedMap map = extract_fk_map(t);
    emit(m, cfg, "triangulation.txt", text_dump(t));
    emit(m, cfg, "triangulation.svg", render_svg(t));
    m.seeds = nullptr;
    m.summary = {{"word", w.str()},
                 {"triangles", t.size()},
                 {"loops", t.loop_count()},
                 {"map_vertices", map.vertex_count},
                 {"map_edges", map.edges.size()},
                 {"open_edges", map.open_edges()},
                 {"map_faces", map.face_count}};
    finish(m, cfg, timer);
    return m;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"fig1",        "hitting_law",  "variance_scan",
                                                "observables", "martingale",   "future_stats",
                                                "exact_eval",  "oracle_verify", "bijection"};
    return names;
}

RunManifest run_command(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::string& c = cfg.command;
    if (c == "fig1") return cmd_fig1(cfg);
    if (c == "hitting_law") return cmd_hitting_law(cfg);
    if (c == "variance_scan") return cmd_variance_scan(cfg);
    if (c == "observables") return cmd_observables(cfg);
    if (c == "martingale") return cmd_martingale(cfg);
    if (c == "future_stats") return cmd_future_stats(cfg);
    if (c == "exact_eval") return cmd_exact_eval(cfg);
    if (c == "oracle_verify") return cmd_oracle_verify(cfg);
    if (c == "bijection") return cmd_bijection(cfg);
    throw ConfigError("no command given");
}

}  // namespace hcb
