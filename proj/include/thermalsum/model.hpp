#pragma once

// Closed-form asymptotics for the first day on which cumulative daily
// temperature exceeds a thermal-sum threshold.
//
// Daily temperature is X_i = alpha + beta * i + eps_i with Var(eps_i) =
// sigma^2. With beta == 0 ("winter", stationary mean) the hitting time is
// approximately Normal(tau/alpha, sigma^2 tau / alpha^3). With beta > 0
// ("spring", linearly warming mean) it is approximately Normal centred near
// the deterministic crossing time, with a variance that shrinks as tau grows.
//
// Units: alpha in degC/day, beta in degC/day^2, sigma in degC, tau in
// degree-days. Days are real-valued here; the simulator uses integer days.

#include <optional>

namespace thermalsum {

enum class Regime { Winter, Spring };

const char* to_string(Regime regime) noexcept;

struct RegimeParams {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma = 0.0;
    double tau = 0.0;

    // Exact comparison against zero; there is no tolerance band.
    Regime regime() const noexcept { return beta == 0.0 ? Regime::Winter : Regime::Spring; }
};

// Throws PreconditionError naming the first violated bound.
void validate(const RegimeParams& params);

struct HittingTimeApprox {
    double mean = 0.0;     // days
    double variance = 0.0; // days^2
    Regime regime = Regime::Winter;

    // Spring only: variance linearized around the exact crossing time,
    // sigma^2 m / (alpha + beta m)^2, before the large-tau simplification.
    std::optional<double> linearized_variance;
    // Spring only: exact crossing time m(tau). The reported mean is the
    // simplified sqrt(2 tau / beta) - gamma.
    std::optional<double> crossing_time;
    // False when the approximation is used outside its asymptotic range
    // (spring crossing before day 30).
    bool asymptotic_ok = true;

    double sd() const;
};

struct CrossingTime {
    double m_tau = 0.0;
    // gamma = alpha / beta + 1/2; absent in the winter regime.
    std::optional<double> gamma;
};

// Threshold below which a spring approximation is flagged as pre-asymptotic.
inline constexpr double kMinAsymptoticCrossingDays = 30.0;

// xi_n = alpha n + (beta / 2) n (n + 1), the expected cumulative sum after n days.
double deterministic_cumsum(const RegimeParams& params, long n);

// Same polynomial evaluated at a real-valued day.
double deterministic_cumsum(const RegimeParams& params, double n);

// Positive root of (beta/2) m^2 + beta gamma m = tau; tau / alpha when beta == 0.
CrossingTime crossing_time(const RegimeParams& params);

HittingTimeApprox approx_winter(const RegimeParams& params);

// Throws PreconditionError when the simplified mean is not positive, since
// tau is then far too small for the asymptotics to say anything.
HittingTimeApprox approx_spring(const RegimeParams& params);

// Dispatches on params.regime().
HittingTimeApprox approximate(const RegimeParams& params);

/// Derivatives of the approximate mean hitting time.
///
/// `d_alpha` and `d_beta` are the exact derivatives of the mean reported by
/// approximate(): -tau/alpha^2 in winter; -1/beta and
/// -(1/2) sqrt(2 tau / beta^3) + alpha / beta^2 in spring.
/// `d_beta_leading` is the leading-order spring sensitivity
/// -(1/2) sqrt(2 tau / beta^3), i.e. the derivative of sqrt(2 tau / beta).
struct Sensitivity {
    Regime regime = Regime::Winter;
    double d_alpha = 0.0;
    std::optional<double> d_beta;
    std::optional<double> d_beta_leading;
};

Sensitivity sensitivity(const RegimeParams& params);

// Throws PreconditionError in the winter regime.
double sensitivity_beta(const RegimeParams& params);

} // namespace thermalsum
