#pragma once

// Constant-forcing (winter regime) weighted least-squares fit, and the
// quantile-binned location/scale grid for observational bloom dates.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermalsum {

struct ForcingObservation {
    double alpha = 0.0; // forcing temperature, degC
    int n = 0;          // replicate count
    double mean_days = 0.0;
    double sd_days = 0.0;
};

void validate(const ForcingObservation& obs);

/// Two-stage fit of mean tau/alpha and variance sigma^2 tau/alpha^3.
///
/// Stage 1 regresses observed means on 1/alpha without intercept, weighting
/// each level by n * alpha^3 (the inverse model variance of a mean, up to the
/// common factor sigma^2 tau). Stage 2 regresses observed variances on
/// tau_hat/alpha^3 without intercept, weighting by (n - 1) * alpha^6 (the
/// inverse variance of a normal sample variance, up to a common factor).
struct WinterFit {
    double tau_hat = 0.0;
    double sigma_hat = 0.0;
    std::vector<double> alphas;
    std::vector<double> fitted_means;
    std::vector<double> fitted_sds;
    std::vector<double> mean_residuals;
    std::vector<double> variance_residuals;
    std::vector<double> mean_weights;
    std::vector<double> variance_weights;
    // 1 - sum w (y - yhat)^2 / sum w (y - ybar_w)^2 over the observed means.
    double weighted_r_squared = 0.0;
};

// Throws SingularFit when fewer than two distinct alpha levels are given and
// NonPositiveEstimate when tau_hat or sigma_hat^2 comes out <= 0.
WinterFit fit_winter_wls(const std::vector<ForcingObservation>& observations);

// Objective minimized by stage 1 at a candidate tau.
double winter_mean_objective(const std::vector<ForcingObservation>& observations, double tau);
// Objective minimized by stage 2 at a candidate sigma, given tau.
double winter_variance_objective(const std::vector<ForcingObservation>& observations, double tau, double sigma);

// Reads alpha,n,mean,sd rows (header required).
std::vector<ForcingObservation> read_forcing_csv(std::istream& in);

// Linear-interpolation sample quantile (R type 7) at probability p.
double quantile_type7(std::vector<double> values, double p);

struct BinEdges {
    // k + 1 non-decreasing edges: data min, k - 1 interior quantiles, data max.
    // Intervals are (e[j], e[j + 1]] except the first, which is closed.
    std::vector<double> edges;
    // Some interval is empty because neighbouring edges coincide.
    bool degenerate = false;

    std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
    // Bin holding `value`; values outside [front, back] clamp to the outer bins.
    std::size_t locate(double value) const;
    bool contains(double value) const;
    std::string label(std::size_t bin, int digits = 2) const;
};

// Throws PreconditionError for k < 2 or fewer than k values.
BinEdges quantile_bin_edges(const std::vector<double>& values, int k = 4);

BinEdges make_bin_edges(std::vector<double> edges);

struct BloomObservation {
    double alpha = 0.0;
    double beta = 0.0;
    double bloom_doy = 0.0;
};

struct GridCell {
    long count = 0;
    std::optional<double> mean;
    std::optional<double> sd; // missing when count < 2
};

struct BinnedGrid {
    BinEdges alpha_edges; // rows
    BinEdges beta_edges;  // columns
    std::vector<GridCell> cells; // row-major
    long clamped = 0;             // observations outside the outer edges

    const GridCell& at(std::size_t row, std::size_t col) const;
    long total() const;
};

BinnedGrid bin_location_scale(const std::vector<BloomObservation>& observations, const BinEdges& alpha_edges,
                              const BinEdges& beta_edges);

// Quartile edges (k = 4) computed from the observations themselves.
BinnedGrid bin_location_scale(const std::vector<BloomObservation>& observations, int k = 4);

// alpha_lo,alpha_hi,beta_lo,beta_hi,count,mean,sd
void write_grid_csv(std::ostream& out, const BinnedGrid& grid);

// Aligned text with alpha intervals as rows and beta intervals as columns.
enum class GridStat { Mean, Sd };
void write_grid_table(std::ostream& out, const BinnedGrid& grid, GridStat stat, const std::string& title);

} // namespace thermalsum
