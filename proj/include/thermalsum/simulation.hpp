#pragma once

// Monte Carlo simulation of daily temperature paths and their first-passage
// times over a thermal-sum threshold.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "thermalsum/model.hpp"

namespace thermalsum {

enum class TrendKind {
    LinearTrend,       // mu_i = alpha + beta * i
    PiecewiseSeasonal, // mu_i = alpha for i <= breakpoint, alpha + beta * (i - breakpoint) after
};

enum class NoiseLaw {
    Gaussian, // Normal(0, sigma^2)
    TwoPoint, // +sigma or -sigma with probability 1/2 each
};

inline constexpr int kDefaultMaxHorizon = 10000;
inline constexpr int kDefaultBreakpointDay = 90;

struct TemperatureProcessSpec {
    TrendKind kind = TrendKind::LinearTrend;
    double alpha = 0.0;
    double beta = 0.0;
    int breakpoint_day = kDefaultBreakpointDay; // PiecewiseSeasonal only
    double noise_sigma = 0.0;
    NoiseLaw noise_law = NoiseLaw::Gaussian;
    bool clip_at_base = false; // set negative daily values to 0
    int max_horizon = kDefaultMaxHorizon;

    static TemperatureProcessSpec linear(double alpha, double beta, double sigma);
    static TemperatureProcessSpec piecewise(double alpha, double beta, double sigma,
                                            int breakpoint_day = kDefaultBreakpointDay);

    // Expected temperature on day i (1-based). The piecewise ramp continues
    // linearly past the end of spring.
    double mean_temperature(int day) const;
};

void validate(const TemperatureProcessSpec& spec);

using Rng = std::mt19937_64;

// Generator for replicate `index` of a run seeded with `master_seed`. The
// stream depends only on (master_seed, index).
Rng replicate_rng(std::uint64_t master_seed, std::uint64_t index);

// Seed for sub-run `index` (a grid cell, say) of a run seeded with `master_seed`.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// Draws the noise sequence eps_1, eps_2, ... The sequence consumed from a
// given generator state does not depend on the trend parameters, so two
// specs sharing a seed share a noise path.
class NoiseSource {
public:
    NoiseSource(NoiseLaw law, double sigma);
    double operator()(Rng& rng);

private:
    NoiseLaw law_;
    double sigma_;
    std::normal_distribution<double> normal_;
};

struct Passage {
    int day = 0;              // nu(tau)
    double sum_before = 0.0;  // Z_{nu - 1} (<= tau)
    double sum_at = 0.0;      // Z_nu (> tau)
};

// First n with Z_n > tau (strict). Throws HorizonExceeded.
Passage first_passage(const TemperatureProcessSpec& spec, double tau, Rng& rng);

int simulate_hitting_time(const TemperatureProcessSpec& spec, double tau, Rng& rng);

// One hitting time per replicate, index-ordered. Replicate r uses
// replicate_rng(seed, r), so the result does not depend on `threads`
// (0 = hardware concurrency).
std::vector<int> simulate_replicates(const TemperatureProcessSpec& spec, double tau, int replicates,
                                     std::uint64_t seed, unsigned threads = 0);

struct SampleSummary {
    double mean = 0.0;
    double sd = 0.0; // n - 1 denominator
    double variance = 0.0;
};

// Reduction over the sorted sample so the result is independent of order.
SampleSummary summarize(std::span<const int> hitting_times);

// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and the
// standard normal CDF. Requires at least two samples.
double ks_distance(std::span<const double> samples);

double standard_normal_cdf(double x);

struct SimulationResult {
    RegimeParams params;
    int replicates = 0;
    std::uint64_t seed = 0;
    int max_horizon = kDefaultMaxHorizon;

    std::vector<int> hitting_times;
    double mean = 0.0;
    double sd = 0.0;
    double variance = 0.0;

    // Theory the z-values are standardized against.
    HittingTimeApprox theory;
    // Empty when the theoretical sd is zero (sigma == 0).
    std::vector<double> z_values;
    bool z_defined = false;
    // KS distance of z_values vs Normal(0, 1); NaN when z is undefined.
    double ks = 0.0;
    // KS distance when standardizing spring runs by the exact crossing time
    // and linearized variance instead. Equal to `ks` in winter.
    double ks_linearized = 0.0;
};

struct MonteCarloOptions {
    int replicates = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    int max_horizon = kDefaultMaxHorizon;
};

// Hitting times under X_i = alpha + beta i + eps_i with Gaussian noise,
// standardized by the matching closed-form approximation.
SimulationResult run_simulation_1(const RegimeParams& params, const MonteCarloOptions& options);

struct Sim2Cell {
    double alpha = 0.0;
    double beta = 0.0;
    double tau = 0.0;
    std::uint64_t seed = 0;
    SampleSummary summary;
    std::vector<int> hitting_times;
};

struct Sim2Grid {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> taus;
    double sigma = 20.0;
    int replicates = 0;
    std::uint64_t seed = 0;
    // Ordered tau-major, then alpha, then beta.
    std::vector<Sim2Cell> cells;

    const Sim2Cell& at(std::size_t tau_index, std::size_t alpha_index, std::size_t beta_index) const;
};

struct Sim2Config {
    std::vector<double> alphas{4.0, 8.0, 10.0};
    std::vector<double> betas{0.2, 0.4, 0.8};
    std::vector<double> taus{1000.0, 2000.0};
    double sigma = 20.0;
    int breakpoint_day = kDefaultBreakpointDay;
};

// Piecewise seasonal mean, unclipped Gaussian noise. Cell k of the grid is
// seeded with derive_seed(options.seed, k).
Sim2Grid run_simulation_2(const Sim2Config& config, const MonteCarloOptions& options);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    long count = 0;
};

// Equal-width bins over [lo, hi]; values outside are dropped.
std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi, int bins);

} // namespace thermalsum
