#include "thermalsum/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "thermalsum/errors.hpp"
#include "thermalsum/format.hpp"

namespace thermalsum {

bool is_leap_year(int year) noexcept
{
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_year(int year) noexcept
{
    return is_leap_year(year) ? 366 : 365;
}

DayWindow jan_feb_window(int year) noexcept
{
    return {1, is_leap_year(year) ? 60 : 59};
}

DayWindow mar_apr_window(int year) noexcept
{
    const int shift = is_leap_year(year) ? 1 : 0;
    return {60 + shift, 120 + shift};
}

DailyTemperatureSeries::DailyTemperatureSeries(std::string site, int y)
    : site_id(std::move(site)), year(y), values(static_cast<std::size_t>(days_in_year(y)))
{
}

std::optional<double> DailyTemperatureSeries::at(int day) const
{
    if (day < 1 || day > static_cast<int>(values.size())) {
        return std::nullopt;
    }
    return values[static_cast<std::size_t>(day - 1)];
}

void DailyTemperatureSeries::set(int day, std::optional<double> value)
{
    if (day < 1 || day > static_cast<int>(values.size())) {
        throw PreconditionError("day-of-year " + std::to_string(day) + " outside year " + std::to_string(year));
    }
    values[static_cast<std::size_t>(day - 1)] = value;
}

double DailyTemperatureSeries::completeness(DayWindow window) const
{
    int present = 0;
    for (int d = window.first; d <= window.last; ++d) {
        if (at(d)) {
            ++present;
        }
    }
    return static_cast<double>(present) / window.length();
}

double DailyTemperatureSeries::completeness() const
{
    return completeness(DayWindow{1, mar_apr_window(year).last});
}

DailyTemperatureSeries clip_base(DailyTemperatureSeries series)
{
    for (auto& v : series.values) {
        if (v && *v < 0.0) {
            v = 0.0;
        }
    }
    return series;
}

namespace {

void require_complete(const DailyTemperatureSeries& s, DayWindow w, double min_completeness, const char* name)
{
    const double c = s.completeness(w);
    if (c < min_completeness) {
        throw InsufficientData(std::string(name) + " window of " + s.site_id + "/" + std::to_string(s.year) +
                               " is " + std::to_string(c * 100.0) + "% complete (need " +
                               std::to_string(min_completeness * 100.0) + "%)");
    }
}

} // namespace

AlphaEstimate estimate_alpha(const DailyTemperatureSeries& series, double min_completeness)
{
    const DayWindow w = jan_feb_window(series.year);
    require_complete(series, w, min_completeness, "Jan-Feb");
    double sum = 0.0;
    int n = 0;
    for (int d = w.first; d <= w.last; ++d) {
        if (auto v = series.at(d)) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) {
        throw InsufficientData("no Jan-Feb observations");
    }
    return {sum / n, n};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) {
        throw PreconditionError("fit_line: x and y differ in length");
    }
    // Welford-style running means and co-moments.
    double mx = 0.0, my = 0.0, cxx = 0.0, cxy = 0.0, cyy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ++n;
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        mx += dx / n;
        my += dy / n;
        cxx += dx * (x[i] - mx);
        cxy += dx * (y[i] - my);
        cyy += dy * (y[i] - my);
    }
    if (n < 2 || cxx <= 0.0) {
        throw DegenerateDesign("regression needs at least two distinct x values");
    }
    LineFit fit;
    fit.n = n;
    fit.slope = cxy / cxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
    return fit;
}

BetaEstimate estimate_beta(const DailyTemperatureSeries& series, double min_completeness)
{
    const DayWindow w = mar_apr_window(series.year);
    require_complete(series, w, min_completeness, "Mar-Apr");
    std::vector<double> days;
    std::vector<double> temps;
    for (int d = w.first; d <= w.last; ++d) {
        if (auto v = series.at(d)) {
            days.push_back(d);
            temps.push_back(*v);
        }
    }
    if (std::set<double>(days.begin(), days.end()).size() < 3) {
        throw DegenerateDesign("Mar-Apr regression needs at least 3 distinct days");
    }
    const LineFit fit = fit_line(days, temps);
    return {fit.slope, fit.intercept, fit.r_squared, fit.n};
}

RegimeEstimate estimate_regime(const DailyTemperatureSeries& series, double min_completeness)
{
    const AlphaEstimate a = estimate_alpha(series, min_completeness);
    const BetaEstimate b = estimate_beta(series, min_completeness);
    RegimeEstimate out;
    out.site_id = series.site_id;
    out.year = series.year;
    out.alpha_hat = a.alpha;
    out.beta_hat = b.beta;
    out.n_alpha_days = a.n_days;
    out.n_beta_days = b.n_days;
    out.r_squared_beta = b.r_squared;
    return out;
}

void write_regime_csv(std::ostream& out, const std::vector<RegimeEstimate>& rows)
{
    out << "site,year,alpha,beta,n_alpha,n_beta,r2\n";
    for (const auto& r : rows) {
        out << r.site_id << ',' << r.year << ',' << fmt_sig6(r.alpha_hat) << ',' << fmt_sig6(r.beta_hat) << ','
            << r.n_alpha_days << ',' << r.n_beta_days << ',' << fmt_sig6(r.r_squared_beta) << '\n';
    }
}

} // namespace thermalsum
