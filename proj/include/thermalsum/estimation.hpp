#pragma once

// Winter level (alpha) and spring warming rate (beta) estimated from one
// site-year of daily effective temperatures.

#include <optional>
#include <string>
#include <vector>
#include <ostream>

namespace thermalsum {

bool is_leap_year(int year) noexcept;
int days_in_year(int year) noexcept;

// Inclusive day-of-year range.
struct DayWindow {
    int first = 1;
    int last = 1;
    int length() const noexcept { return last - first + 1; }
};

DayWindow jan_feb_window(int year) noexcept; // Jan 1 .. Feb 28/29
DayWindow mar_apr_window(int year) noexcept; // Mar 1 .. Apr 30

struct DailyTemperatureSeries {
    std::string site_id;
    int year = 0;
    // values[d - 1] is day-of-year d (day 1 = Jan 1); nullopt means missing.
    std::vector<std::optional<double>> values;

    DailyTemperatureSeries() = default;
    DailyTemperatureSeries(std::string site, int year);

    std::optional<double> at(int day) const;
    void set(int day, std::optional<double> value);

    // Fraction of days in `window` that are present.
    double completeness(DayWindow window) const;
    // Completeness over Jan 1 .. Apr 30.
    double completeness() const;
};

// Elementwise max(value, 0); missing stays missing.
DailyTemperatureSeries clip_base(DailyTemperatureSeries series);

inline constexpr double kDefaultCompleteness = 0.8;

struct AlphaEstimate {
    double alpha = 0.0;
    int n_days = 0;
};

struct BetaEstimate {
    double beta = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0; // 1 when the series is constant over the window
    int n_days = 0;
};

// Mean over the present Jan-Feb days. Throws InsufficientData.
AlphaEstimate estimate_alpha(const DailyTemperatureSeries& series, double min_completeness = kDefaultCompleteness);

// OLS slope of temperature on day-of-year over Mar-Apr. Throws
// InsufficientData, or DegenerateDesign with fewer than 3 distinct days.
BetaEstimate estimate_beta(const DailyTemperatureSeries& series, double min_completeness = kDefaultCompleteness);

struct RegimeEstimate {
    std::string site_id;
    int year = 0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    int n_alpha_days = 0;
    int n_beta_days = 0;
    double r_squared_beta = 0.0;
};

// Both estimators on an already clipped series.
RegimeEstimate estimate_regime(const DailyTemperatureSeries& series, double min_completeness = kDefaultCompleteness);

// Header: site,year,alpha,beta,n_alpha,n_beta,r2
void write_regime_csv(std::ostream& out, const std::vector<RegimeEstimate>& rows);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n = 0;
};

// Single-pass OLS with running co-moments.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace thermalsum
