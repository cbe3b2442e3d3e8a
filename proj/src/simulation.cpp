#include "thermalsum/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "thermalsum/errors.hpp"

namespace thermalsum {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

unsigned resolve_threads(unsigned requested, int work)
{
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(std::max(work, 1))));
}

std::vector<double> standardize(std::span<const int> values, double mean, double sd)
{
    std::vector<double> z;
    z.reserve(values.size());
    for (int v : values) {
        z.push_back((static_cast<double>(v) - mean) / sd);
    }
    return z;
}

} // namespace

TemperatureProcessSpec TemperatureProcessSpec::linear(double alpha, double beta, double sigma)
{
    TemperatureProcessSpec spec;
    spec.kind = TrendKind::LinearTrend;
    spec.alpha = alpha;
    spec.beta = beta;
    spec.noise_sigma = sigma;
    return spec;
}

TemperatureProcessSpec TemperatureProcessSpec::piecewise(double alpha, double beta, double sigma,
                                                         int breakpoint_day)
{
    TemperatureProcessSpec spec;
    spec.kind = TrendKind::PiecewiseSeasonal;
    spec.alpha = alpha;
    spec.beta = beta;
    spec.noise_sigma = sigma;
    spec.breakpoint_day = breakpoint_day;
    return spec;
}

double TemperatureProcessSpec::mean_temperature(int day) const
{
    if (kind == TrendKind::LinearTrend) {
        return alpha + beta * day;
    }
    return day <= breakpoint_day ? alpha : alpha + beta * (day - breakpoint_day);
}

void validate(const TemperatureProcessSpec& spec)
{
    if (!std::isfinite(spec.alpha) || !std::isfinite(spec.beta)) {
        throw PreconditionError("trend parameters must be finite");
    }
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
        throw PreconditionError("noise sigma must be >= 0");
    }
    if (spec.kind == TrendKind::PiecewiseSeasonal && spec.breakpoint_day < 1) {
        throw PreconditionError("breakpoint_day must be >= 1");
    }
    if (spec.max_horizon < 1) {
        throw PreconditionError("max_horizon must be >= 1");
    }
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index)
{
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Rng replicate_rng(std::uint64_t master_seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

NoiseSource::NoiseSource(NoiseLaw law, double sigma) : law_(law), sigma_(sigma), normal_(0.0, 1.0) {}

double NoiseSource::operator()(Rng& rng)
{
    if (law_ == NoiseLaw::TwoPoint) {
        return (rng() >> 63) != 0 ? sigma_ : -sigma_;
    }
    return sigma_ * normal_(rng);
}

Passage first_passage(const TemperatureProcessSpec& spec, double tau, Rng& rng)
{
    if (!(tau > 0.0)) {
        throw PreconditionError("tau must be > 0");
    }
    NoiseSource noise(spec.noise_law, spec.noise_sigma);
    double sum = 0.0;
    for (int day = 1; day <= spec.max_horizon; ++day) {
        double x = spec.mean_temperature(day) + noise(rng);
        if (spec.clip_at_base && x < 0.0) {
            x = 0.0;
        }
        const double next = sum + x;
        if (next > tau) {
            return {day, sum, next};
        }
        sum = next;
    }
    throw HorizonExceeded(spec.max_horizon);
}

int simulate_hitting_time(const TemperatureProcessSpec& spec, double tau, Rng& rng)
{
    return first_passage(spec, tau, rng).day;
}

std::vector<int> simulate_replicates(const TemperatureProcessSpec& spec, double tau, int replicates,
                                     std::uint64_t seed, unsigned threads)
{
    validate(spec);
    if (replicates < 1) {
        throw PreconditionError("replicate count must be >= 1");
    }
    if (!(tau > 0.0)) {
        throw PreconditionError("tau must be > 0");
    }
    std::vector<int> out(static_cast<std::size_t>(replicates), 0);
    const unsigned workers = resolve_threads(threads, replicates);

    auto run_range = [&](int begin, int end) {
        for (int r = begin; r < end; ++r) {
            Rng rng = replicate_rng(seed, static_cast<std::uint64_t>(r));
            out[static_cast<std::size_t>(r)] = simulate_hitting_time(spec, tau, rng);
        }
    };

    if (workers == 1) {
        run_range(0, replicates);
        return out;
    }

    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const int chunk = (replicates + static_cast<int>(workers) - 1) / static_cast<int>(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const int begin = static_cast<int>(w) * chunk;
            const int end = std::min(replicates, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    run_range(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

SampleSummary summarize(std::span<const int> hitting_times)
{
    if (hitting_times.empty()) {
        throw PreconditionError("cannot summarize an empty sample");
    }
    std::vector<int> sorted(hitting_times.begin(), hitting_times.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (int v : sorted) {
        const double d = v - mean;
        ss += d * d;
    }
    SampleSummary s;
    s.mean = mean;
    s.variance = sorted.size() > 1 ? ss / (n - 1.0) : 0.0;
    s.sd = std::sqrt(s.variance);
    return s;
}

double standard_normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double ks_distance(std::span<const double> samples)
{
    if (samples.size() < 2) {
        throw PreconditionError("ks_distance needs at least two samples");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = standard_normal_cdf(sorted[i]);
        const double below = static_cast<double>(i) / n;
        const double above = static_cast<double>(i + 1) / n;
        d = std::max({d, above - f, f - below});
    }
    return d;
}

SimulationResult run_simulation_1(const RegimeParams& params, const MonteCarloOptions& options)
{
    validate(params);
    SimulationResult result;
    result.params = params;
    result.replicates = options.replicates;
    result.seed = options.seed;
    result.max_horizon = options.max_horizon;
    result.theory = approximate(params);

    auto spec = TemperatureProcessSpec::linear(params.alpha, params.beta, params.sigma);
    spec.max_horizon = options.max_horizon;
    result.hitting_times = simulate_replicates(spec, params.tau, options.replicates, options.seed, options.threads);

    const SampleSummary s = summarize(result.hitting_times);
    result.mean = s.mean;
    result.sd = s.sd;
    result.variance = s.variance;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (result.theory.variance > 0.0 && result.hitting_times.size() >= 2) {
        result.z_defined = true;
        result.z_values = standardize(result.hitting_times, result.theory.mean, result.theory.sd());
        result.ks = ks_distance(result.z_values);
        if (result.theory.regime == Regime::Spring) {
            const auto z_lin = standardize(result.hitting_times, *result.theory.crossing_time,
                                           std::sqrt(*result.theory.linearized_variance));
            result.ks_linearized = ks_distance(z_lin);
        } else {
            result.ks_linearized = result.ks;
        }
    } else {
        result.ks = nan;
        result.ks_linearized = nan;
    }
    return result;
}

const Sim2Cell& Sim2Grid::at(std::size_t tau_index, std::size_t alpha_index, std::size_t beta_index) const
{
    const std::size_t k = (tau_index * alphas.size() + alpha_index) * betas.size() + beta_index;
    return cells.at(k);
}

Sim2Grid run_simulation_2(const Sim2Config& config, const MonteCarloOptions& options)
{
    Sim2Grid grid;
    grid.alphas = config.alphas;
    grid.betas = config.betas;
    grid.taus = config.taus;
    grid.sigma = config.sigma;
    grid.replicates = options.replicates;
    grid.seed = options.seed;

    std::uint64_t index = 0;
    for (double tau : config.taus) {
        for (double alpha : config.alphas) {
            for (double beta : config.betas) {
                auto spec = TemperatureProcessSpec::piecewise(alpha, beta, config.sigma, config.breakpoint_day);
                spec.max_horizon = options.max_horizon;
                Sim2Cell cell;
                cell.alpha = alpha;
                cell.beta = beta;
                cell.tau = tau;
                cell.seed = derive_seed(options.seed, index++);
                cell.hitting_times = simulate_replicates(spec, tau, options.replicates, cell.seed, options.threads);
                cell.summary = summarize(cell.hitting_times);
                grid.cells.push_back(std::move(cell));
            }
        }
    }
    return grid;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi, int bins)
{
    if (bins < 1 || !(hi > lo)) {
        throw PreconditionError("histogram needs bins >= 1 and hi > lo");
    }
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        out[static_cast<std::size_t>(b)].left = lo + b * width;
        out[static_cast<std::size_t>(b)].right = b + 1 == bins ? hi : lo + (b + 1) * width;
    }
    for (double v : values) {
        if (v < lo || v > hi) {
            continue;
        }
        auto b = static_cast<int>((v - lo) / width);
        b = std::min(b, bins - 1);
        ++out[static_cast<std::size_t>(b)].count;
    }
    return out;
}

} // namespace thermalsum
