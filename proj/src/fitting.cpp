#include "thermalsum/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "thermalsum/errors.hpp"
#include "thermalsum/format.hpp"

namespace thermalsum {

void validate(const ForcingObservation& obs)
{
    if (!(obs.alpha > 0.0)) {
        throw PreconditionError("forcing alpha must be > 0");
    }
    if (obs.n < 2) {
        throw PreconditionError("forcing replicate count must be >= 2");
    }
    if (!(obs.sd_days > 0.0)) {
        throw PreconditionError("forcing sd must be > 0");
    }
}

namespace {

double mean_weight(const ForcingObservation& o)
{
    return o.n * std::pow(o.alpha, 3);
}

double variance_weight(const ForcingObservation& o)
{
    return (o.n - 1) * std::pow(o.alpha, 6);
}

} // namespace

double winter_mean_objective(const std::vector<ForcingObservation>& observations, double tau)
{
    double total = 0.0;
    for (const auto& o : observations) {
        const double r = o.mean_days - tau / o.alpha;
        total += mean_weight(o) * r * r;
    }
    return total;
}

double winter_variance_objective(const std::vector<ForcingObservation>& observations, double tau, double sigma)
{
    double total = 0.0;
    for (const auto& o : observations) {
        const double r = o.sd_days * o.sd_days - sigma * sigma * tau / std::pow(o.alpha, 3);
        total += variance_weight(o) * r * r;
    }
    return total;
}

WinterFit fit_winter_wls(const std::vector<ForcingObservation>& observations)
{
    std::set<double> levels;
    for (const auto& o : observations) {
        validate(o);
        levels.insert(o.alpha);
    }
    if (levels.size() < 2) {
        throw SingularFit("winter fit needs at least two distinct forcing temperatures");
    }

    WinterFit fit;
    // Stage 1: mean = tau * (1 / alpha).
    double sxy = 0.0, sxx = 0.0;
    for (const auto& o : observations) {
        const double w = mean_weight(o);
        const double x = 1.0 / o.alpha;
        sxy += w * x * o.mean_days;
        sxx += w * x * x;
    }
    fit.tau_hat = sxy / sxx;
    if (!(fit.tau_hat > 0.0)) {
        throw NonPositiveEstimate("tau_hat = " + std::to_string(fit.tau_hat));
    }

    // Stage 2: variance = sigma^2 * (tau_hat / alpha^3).
    double vxy = 0.0, vxx = 0.0;
    for (const auto& o : observations) {
        const double w = variance_weight(o);
        const double x = fit.tau_hat / std::pow(o.alpha, 3);
        vxy += w * x * o.sd_days * o.sd_days;
        vxx += w * x * x;
    }
    const double sigma2 = vxy / vxx;
    if (!(sigma2 > 0.0)) {
        throw NonPositiveEstimate("sigma_hat^2 = " + std::to_string(sigma2));
    }
    fit.sigma_hat = std::sqrt(sigma2);

    double wsum = 0.0, wy = 0.0;
    for (const auto& o : observations) {
        const double model_var = sigma2 * fit.tau_hat / std::pow(o.alpha, 3);
        fit.alphas.push_back(o.alpha);
        fit.fitted_means.push_back(fit.tau_hat / o.alpha);
        fit.fitted_sds.push_back(std::sqrt(model_var));
        fit.mean_residuals.push_back(o.mean_days - fit.tau_hat / o.alpha);
        fit.variance_residuals.push_back(o.sd_days * o.sd_days - model_var);
        fit.mean_weights.push_back(mean_weight(o));
        fit.variance_weights.push_back(variance_weight(o));
        wsum += mean_weight(o);
        wy += mean_weight(o) * o.mean_days;
    }
    const double ybar = wy / wsum;
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const double w = fit.mean_weights[i];
        sse += w * fit.mean_residuals[i] * fit.mean_residuals[i];
        const double d = observations[i].mean_days - ybar;
        sst += w * d * d;
    }
    fit.weighted_r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
    return fit;
}

std::vector<ForcingObservation> read_forcing_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw EmptyFile("forcing CSV is empty");
    }
    const auto header = split_csv_line(line);
    auto column = [&](std::string_view name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) {
                return i;
            }
        }
        throw MissingHeader("forcing CSV lacks column '" + std::string(name) + "'");
    };
    const std::size_t ca = column("alpha"), cn = column("n"), cm = column("mean"), cs = column("sd");

    std::vector<ForcingObservation> out;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() < header.size()) {
            throw PreconditionError("short forcing CSV row: " + line);
        }
        ForcingObservation o;
        o.alpha = std::stod(f[ca]);
        o.n = std::stoi(f[cn]);
        o.mean_days = std::stod(f[cm]);
        o.sd_days = std::stod(f[cs]);
        validate(o);
        out.push_back(o);
    }
    return out;
}

double quantile_type7(std::vector<double> values, double p)
{
    if (values.empty()) {
        throw PreconditionError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) {
        return values.back();
    }
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

BinEdges make_bin_edges(std::vector<double> edges)
{
    if (edges.size() < 2) {
        throw PreconditionError("bin edges need at least two entries");
    }
    BinEdges out;
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] < edges[i - 1]) {
            throw PreconditionError("bin edges must be non-decreasing");
        }
        // The first interval is closed, so a zero-width first bin still holds its edge value.
        if (i > 1 && edges[i] == edges[i - 1]) {
            out.degenerate = true;
        }
    }
    if (edges.size() > 2 && edges.front() == edges.back()) {
        out.degenerate = true;
    }
    out.edges = std::move(edges);
    return out;
}

BinEdges quantile_bin_edges(const std::vector<double>& values, int k)
{
    if (k < 2) {
        throw PreconditionError("quantile binning needs k >= 2");
    }
    if (values.size() < static_cast<std::size_t>(k)) {
        throw PreconditionError("quantile binning needs at least k values");
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges{sorted.front()};
    for (int j = 1; j < k; ++j) {
        edges.push_back(quantile_type7(sorted, static_cast<double>(j) / k));
    }
    edges.push_back(sorted.back());
    return make_bin_edges(std::move(edges));
}

std::size_t BinEdges::locate(double value) const
{
    const std::size_t n = bins();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (value <= edges[j + 1]) {
            return j;
        }
    }
    return n - 1;
}

bool BinEdges::contains(double value) const
{
    return value >= edges.front() && value <= edges.back();
}

std::string BinEdges::label(std::size_t bin, int digits) const
{
    std::string out = bin == 0 ? "[" : "(";
    out += fmt_fixed(edges.at(bin), digits) + ", " + fmt_fixed(edges.at(bin + 1), digits) + "]";
    return out;
}

const GridCell& BinnedGrid::at(std::size_t row, std::size_t col) const
{
    return cells.at(row * beta_edges.bins() + col);
}

long BinnedGrid::total() const
{
    long n = 0;
    for (const auto& c : cells) {
        n += c.count;
    }
    return n;
}

BinnedGrid bin_location_scale(const std::vector<BloomObservation>& observations, const BinEdges& alpha_edges,
                              const BinEdges& beta_edges)
{
    BinnedGrid grid;
    grid.alpha_edges = alpha_edges;
    grid.beta_edges = beta_edges;
    const std::size_t rows = alpha_edges.bins();
    const std::size_t cols = beta_edges.bins();
    if (rows == 0 || cols == 0) {
        throw PreconditionError("binning needs at least one alpha and one beta bin");
    }

    std::vector<std::vector<double>> members(rows * cols);
    for (const auto& o : observations) {
        if (!alpha_edges.contains(o.alpha) || !beta_edges.contains(o.beta)) {
            ++grid.clamped;
        }
        members[alpha_edges.locate(o.alpha) * cols + beta_edges.locate(o.beta)].push_back(o.bloom_doy);
    }

    grid.cells.resize(rows * cols);
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& m = members[k];
        GridCell& cell = grid.cells[k];
        cell.count = static_cast<long>(m.size());
        if (m.empty()) {
            continue;
        }
        double mean = 0.0;
        for (double v : m) {
            mean += v;
        }
        mean /= static_cast<double>(m.size());
        cell.mean = mean;
        if (m.size() >= 2) {
            double ss = 0.0;
            for (double v : m) {
                ss += (v - mean) * (v - mean);
            }
            cell.sd = std::sqrt(ss / static_cast<double>(m.size() - 1));
        }
    }
    return grid;
}

BinnedGrid bin_location_scale(const std::vector<BloomObservation>& observations, int k)
{
    std::vector<double> alphas, betas;
    for (const auto& o : observations) {
        alphas.push_back(o.alpha);
        betas.push_back(o.beta);
    }
    return bin_location_scale(observations, quantile_bin_edges(alphas, k), quantile_bin_edges(betas, k));
}

void write_grid_csv(std::ostream& out, const BinnedGrid& grid)
{
    out << "alpha_lo,alpha_hi,beta_lo,beta_hi,count,mean,sd\n";
    for (std::size_t r = 0; r < grid.alpha_edges.bins(); ++r) {
        for (std::size_t c = 0; c < grid.beta_edges.bins(); ++c) {
            const GridCell& cell = grid.at(r, c);
            out << fmt_sig6(grid.alpha_edges.edges[r]) << ',' << fmt_sig6(grid.alpha_edges.edges[r + 1]) << ','
                << fmt_sig6(grid.beta_edges.edges[c]) << ',' << fmt_sig6(grid.beta_edges.edges[c + 1]) << ','
                << cell.count << ',' << (cell.mean ? fmt_sig6(*cell.mean) : "NA") << ','
                << (cell.sd ? fmt_sig6(*cell.sd) : "NA") << '\n';
        }
    }
}

void write_grid_table(std::ostream& out, const BinnedGrid& grid, GridStat stat, const std::string& title)
{
    const std::size_t rows = grid.alpha_edges.bins();
    const std::size_t cols = grid.beta_edges.bins();
    std::vector<std::string> row_labels;
    std::size_t label_width = std::string("alpha \\ beta").size();
    for (std::size_t r = 0; r < rows; ++r) {
        row_labels.push_back(grid.alpha_edges.label(r, 1));
        label_width = std::max(label_width, row_labels.back().size());
    }
    std::vector<std::string> col_labels;
    std::size_t col_width = 8;
    for (std::size_t c = 0; c < cols; ++c) {
        col_labels.push_back(grid.beta_edges.label(c, 2));
        col_width = std::max(col_width, col_labels.back().size());
    }

    out << title << '\n';
    out << std::left << std::setw(static_cast<int>(label_width)) << "alpha \\ beta";
    for (const auto& l : col_labels) {
        out << "  " << std::right << std::setw(static_cast<int>(col_width)) << l;
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        out << std::left << std::setw(static_cast<int>(label_width)) << row_labels[r];
        for (std::size_t c = 0; c < cols; ++c) {
            const GridCell& cell = grid.at(r, c);
            const auto& v = stat == GridStat::Mean ? cell.mean : cell.sd;
            out << "  " << std::right << std::setw(static_cast<int>(col_width)) << (v ? fmt_fixed(*v, 2) : "NA");
        }
        out << '\n';
    }
}

} // namespace thermalsum
