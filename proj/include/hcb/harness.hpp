#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hcb/analytics.hpp"

namespace hcb {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Flat key=value configuration; unknown keys and malformed values throw ConfigError.
struct ExperimentConfig {
    std::string command;
    double p = 0.5;
    std::uint64_t n = 1000;
    std::uint64_t replicas = 10000;
    std::uint64_t seed = 1;
    std::string out = ".";
    double tol = 4.0;  // |z| threshold
    QuadratureSpec quad;
    std::uint64_t ell_max = 20;
    std::uint64_t letter_cap = std::uint64_t{1} << 24;
    std::uint64_t backward_cap = 0;  // in units of n; 0 picks the command's default
    std::uint64_t max_len = 128;
    std::uint64_t stride = 1;
    std::uint64_t k = 3;
    std::string word;
    std::vector<std::uint64_t> n_grid;
    std::vector<std::uint64_t> replicas_grid;  // per n_grid entry; empty means `replicas` everywhere
    std::vector<double> grid;                  // t, lambda or p values, by command
    bool parallel = true;

    void set(std::string_view key, std::string_view value);
    // Lines of key=value; blank lines and lines starting with '#' are skipped.
    void load_text(std::string_view text);
    void load_file(const std::filesystem::path& path);
    void validate() const;
    std::map<std::string, std::string> echo() const;
};

// Written next to every output by write(); outputs lists the files produced.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::string version;
    nlohmann::json seeds;
    double wall_clock_seconds = 0.0;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
    // Writes to a temporary file in the same directory and renames it into place.
    void write(const std::filesystem::path& path) const;
};

std::string version_string();

// Writes `content` to `path` atomically.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// ---- Monte Carlo building blocks shared by the commands and the acceptance run ----

// Work is split into fixed chunks, chunk i reading Philox stream base + i,
// so results do not depend on the number of threads.
inline constexpr std::uint64_t kChunks = 64;

struct HittingLawResult {
    std::uint64_t samples = 0;    // replicas with a decided outcome
    std::uint64_t censored = 0;   // replicas stopped by an excursion longer than the letter cap
    std::vector<std::uint64_t> hits;  // hits[l] = #{tau^h = l + 1}, l <= ell_max
};
HittingLawResult hitting_law_mc(std::uint64_t seed, std::uint64_t replicas, std::uint64_t ell_max,
                                std::uint64_t letter_cap, bool parallel);

struct MeanEstimate {
    double mean = 0.0, se = 0.0;
    std::uint64_t samples = 0, censored = 0;
};
// E[exp(-t eta - f(t) xi)] per t over single steps. A censored step (eta above
// the cap) has xi >= -1 and contributes at most exp(-t cap + f(t)); it is
// counted as 0 for t > 0 and as 1 for t = 0.
std::vector<MeanEstimate> martingale_mc(std::uint64_t seed, std::uint64_t samples, const std::vector<double>& ts,
                                        std::uint64_t letter_cap, bool parallel);

// sum_j exp(-lambda H*(suffix_j)) / 4 over the suffixes of E given X(0) = F;
// its mean is E[exp(-lambda H*(P_F))]. Also returns r(E) to estimate E[r] = 4.
struct SuffixLaplace {
    std::vector<MeanEstimate> laplace;  // per lambda
    std::vector<double> r_values;       // r(E) per excursion, in chunk order
    std::uint64_t censored = 0;
};
SuffixLaplace suffix_laplace_mc(std::uint64_t seed, std::uint64_t samples, const std::vector<double>& lambdas,
                                std::uint64_t letter_cap, bool parallel, bool keep_r = false);

// Future blocks with a length cap: a censored block has H* at least its
// current count, so E[exp(-lambda H*)] lies in [lower, upper].
struct LaplaceBracket {
    double lower = 0.0, upper = 0.0, se = 0.0;
    std::uint64_t samples = 0, censored = 0;
};
std::vector<LaplaceBracket> future_laplace_mc(std::uint64_t seed, std::uint64_t samples,
                                              const std::vector<double>& lambdas, std::uint64_t length_cap,
                                              bool parallel);

// Block length and H* laws of P_F given length <= max_len, from the size-biased
// sampler and from future blocks.
struct AtomComparison {
    std::string quantity;  // "length" or "hstar"
    std::int64_t value = 0;
    double p_biased = 0.0, p_future = 0.0, z = 0.0;
};
struct SamplerComparison {
    std::vector<AtomComparison> atoms;  // atoms with pooled probability >= min_prob
    std::uint64_t samples = 0;
    std::uint64_t biased_attempts = 0, future_censored = 0;
    double max_abs_z = 0.0;
};
SamplerComparison compare_pf_samplers(std::uint64_t seed, std::uint64_t samples, std::uint64_t max_len,
                                      double min_prob, bool parallel);

struct EndpointSample {
    double S = 0, D = 0;
    bool resolved = true;
};
std::vector<EndpointSample> endpoint_replicas(std::uint64_t n, std::uint64_t replicas, std::uint64_t seed,
                                              std::uint64_t backward_cap_factor, bool parallel);

struct VariancePoint {
    std::uint64_t n = 0, replicas = 0, unresolved = 0;
    double var_s_over_n = 0, var_s_over_n_se = 0;
    double mean_d = 0, mean_d_se = 0;
    double scaled_var_d = 0, scaled_var_d_se = 0;  // log^2 n / n Var(D_n)
    double boot_lo = 0, boot_hi = 0;
};
VariancePoint variance_point(std::uint64_t n, std::uint64_t replicas, std::uint64_t seed,
                             std::uint64_t backward_cap_factor, bool parallel);

// ---- commands: each writes its files under cfg.out and a manifest ----

RunManifest cmd_fig1(const ExperimentConfig& cfg);
RunManifest cmd_hitting_law(const ExperimentConfig& cfg);
RunManifest cmd_variance_scan(const ExperimentConfig& cfg);
RunManifest cmd_observables(const ExperimentConfig& cfg);
RunManifest cmd_martingale(const ExperimentConfig& cfg);
RunManifest cmd_future_stats(const ExperimentConfig& cfg);
RunManifest cmd_exact_eval(const ExperimentConfig& cfg);
RunManifest cmd_oracle_verify(const ExperimentConfig& cfg);
RunManifest cmd_bijection(const ExperimentConfig& cfg);

// Dispatches on cfg.command after validation.
RunManifest run_command(const ExperimentConfig& cfg);
const std::vector<std::string>& command_names();

}  // namespace hcb
