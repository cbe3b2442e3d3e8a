#include "thermalsum/model.hpp"

#include <cmath>
#include <string>

#include "thermalsum/errors.hpp"

namespace thermalsum {

const char* to_string(Regime regime) noexcept
{
    return regime == Regime::Winter ? "winter" : "spring";
}

void validate(const RegimeParams& params)
{
    auto require = [](bool ok, const char* what, double value) {
        if (!ok) {
            throw PreconditionError(std::string(what) + " (got " + std::to_string(value) + ")");
        }
    };
    require(std::isfinite(params.alpha) && params.alpha > 0.0, "alpha must be > 0", params.alpha);
    require(std::isfinite(params.beta) && params.beta >= 0.0, "beta must be >= 0", params.beta);
    require(std::isfinite(params.sigma) && params.sigma >= 0.0, "sigma must be >= 0", params.sigma);
    require(std::isfinite(params.tau) && params.tau > 0.0, "tau must be > 0", params.tau);
}

double HittingTimeApprox::sd() const
{
    return std::sqrt(variance);
}

double deterministic_cumsum(const RegimeParams& params, long n)
{
    if (n < 0) {
        throw PreconditionError("day count must be >= 0");
    }
    const auto days = static_cast<double>(n);
    return params.alpha * days + 0.5 * params.beta * days * (days + 1.0);
}

double deterministic_cumsum(const RegimeParams& params, double n)
{
    return params.alpha * n + 0.5 * params.beta * n * (n + 1.0);
}

CrossingTime crossing_time(const RegimeParams& params)
{
    if (!(params.alpha > 0.0)) {
        throw PreconditionError("crossing_time: alpha must be > 0");
    }
    if (!(params.tau > 0.0)) {
        throw PreconditionError("crossing_time: tau must be > 0");
    }
    if (params.beta < 0.0) {
        throw PreconditionError("crossing_time: beta must be >= 0");
    }
    if (params.beta == 0.0) {
        return {params.tau / params.alpha, std::nullopt};
    }
    const double gamma = params.alpha / params.beta + 0.5;
    const double bg = params.beta * gamma;
    // Rationalized form of (-bg + sqrt(bg^2 + 2 beta tau)) / beta; no
    // cancellation as tau -> 0.
    const double m = 2.0 * params.tau / (bg + std::sqrt(bg * bg + 2.0 * params.beta * params.tau));
    return {m, gamma};
}

HittingTimeApprox approx_winter(const RegimeParams& params)
{
    validate(params);
    if (params.beta != 0.0) {
        throw PreconditionError("approx_winter requires beta == 0");
    }
    HittingTimeApprox out;
    out.regime = Regime::Winter;
    out.mean = params.tau / params.alpha;
    out.variance = params.sigma * params.sigma * params.tau / std::pow(params.alpha, 3);
    return out;
}

HittingTimeApprox approx_spring(const RegimeParams& params)
{
    validate(params);
    if (params.beta == 0.0) {
        throw PreconditionError("approx_spring requires beta > 0");
    }
    const CrossingTime ct = crossing_time(params);
    const double mean = std::sqrt(2.0 * params.tau / params.beta) - *ct.gamma;
    if (!(mean > 0.0)) {
        throw PreconditionError("approx_spring: sqrt(2 tau / beta) - gamma = " + std::to_string(mean) +
                                " <= 0; tau is too small for the spring asymptotics");
    }
    const double s2 = params.sigma * params.sigma;
    const double slope = params.alpha + params.beta * ct.m_tau;

    HittingTimeApprox out;
    out.regime = Regime::Spring;
    out.mean = mean;
    out.variance = s2 / (std::pow(params.beta, 1.5) * std::sqrt(2.0 * params.tau));
    out.linearized_variance = s2 * ct.m_tau / (slope * slope);
    out.crossing_time = ct.m_tau;
    out.asymptotic_ok = ct.m_tau >= kMinAsymptoticCrossingDays;
    return out;
}

HittingTimeApprox approximate(const RegimeParams& params)
{
    return params.regime() == Regime::Winter ? approx_winter(params) : approx_spring(params);
}

Sensitivity sensitivity(const RegimeParams& params)
{
    validate(params);
    Sensitivity out;
    out.regime = params.regime();
    if (out.regime == Regime::Winter) {
        out.d_alpha = -params.tau / (params.alpha * params.alpha);
        return out;
    }
    const double leading = -0.5 * std::sqrt(2.0 * params.tau / std::pow(params.beta, 3));
    out.d_alpha = -1.0 / params.beta;
    out.d_beta_leading = leading;
    out.d_beta = leading + params.alpha / (params.beta * params.beta);
    return out;
}

double sensitivity_beta(const RegimeParams& params)
{
    validate(params);
    if (params.beta == 0.0) {
        throw PreconditionError("d mean / d beta is undefined in the winter regime (beta == 0)");
    }
    return *sensitivity(params).d_beta;
}

} // namespace thermalsum
