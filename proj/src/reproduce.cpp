#include "thermalsum/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "thermalsum/data_io.hpp"
#include "thermalsum/format.hpp"
#include "thermalsum/reference_values.hpp"

namespace thermalsum {

namespace fs = std::filesystem;

namespace {

std::string num(double v)
{
    return fmt_sig6(v);
}

std::uint64_t require_seed(const ReproduceOptions& options, const char* target)
{
    if (!options.seed) {
        throw PreconditionError(std::string(target) + " is stochastic and needs --seed");
    }
    return *options.seed;
}

fs::path prepare_run_dir(const ReproduceOptions& options, const std::string& name)
{
    const fs::path dir = options.out_root / name;
    if (fs::exists(dir) && !fs::is_empty(dir) && !options.force) {
        throw OutputExists("run directory " + dir.string() + " already exists; pass --force to overwrite");
    }
    fs::create_directories(dir);
    return dir;
}

void write_file(ReproduceOutcome& outcome, const std::string& name, const std::string& content)
{
    const fs::path path = outcome.run_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
    outcome.files.push_back(path);
}

std::string checks_text(const std::vector<CheckLine>& checks)
{
    std::ostringstream out;
    for (const auto& c : checks) {
        out << format_check(c) << '\n';
    }
    return out.str();
}

std::string point_tag(double alpha, double beta, double tau)
{
    return "a" + num(alpha) + "_b" + num(beta) + "_t" + num(tau);
}

std::string point_label(double alpha, double beta, double tau)
{
    return "alpha=" + num(alpha) + " beta=" + num(beta) + " tau=" + num(tau);
}

void write_sim_table(std::ostream& out, const Sim2Grid& grid, std::size_t tau_index, bool mean, const char* tag)
{
    out << tag << ' ' << (mean ? "mean" : "sd") << ", tau=" << num(grid.taus[tau_index]) << '\n';
    out << std::left << std::setw(14) << "alpha \\ beta";
    for (double b : grid.betas) {
        out << std::right << std::setw(9) << num(b);
    }
    out << '\n';
    for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
        out << std::left << std::setw(14) << num(grid.alphas[a]);
        for (std::size_t b = 0; b < grid.betas.size(); ++b) {
            const auto& s = grid.at(tau_index, a, b).summary;
            out << std::right << std::setw(9) << fmt_fixed(mean ? s.mean : s.sd, 2);
        }
        out << '\n';
    }
    out << '\n';
}

// Index of `value` in a reference axis, if present.
template <std::size_t N>
std::optional<std::size_t> axis_index(const std::array<double, N>& axis, double value)
{
    for (std::size_t i = 0; i < N; ++i) {
        if (axis[i] == value) {
            return i;
        }
    }
    return std::nullopt;
}

} // namespace

bool all_pass(const std::vector<CheckLine>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

std::string format_check(const CheckLine& check)
{
    return std::string(check.pass ? "PASS " : "FAIL ") + check.name + (check.detail.empty() ? "" : " : " + check.detail);
}

std::vector<RegimeParams> sim1_grid()
{
    std::vector<RegimeParams> grid;
    for (double alpha : {2.0, 4.0}) {
        for (double beta : {0.0, 0.1}) {
            for (double tau : {1000.0, 2000.0}) {
                grid.push_back({alpha, beta, 20.0, tau});
            }
        }
    }
    return grid;
}

std::vector<CheckLine> check_sim1(const std::vector<SimulationResult>& results)
{
    std::vector<CheckLine> checks;
    for (const auto& r : results) {
        const auto& p = r.params;
        checks.push_back({"sim1 KS < " + num(kKsMax) + " at " + point_label(p.alpha, p.beta, p.tau),
                          r.z_defined && r.ks < kKsMax,
                          "ks=" + fmt_fixed(r.ks, 4) + " (linearized " + fmt_fixed(r.ks_linearized, 4) + ")"});
    }

    auto find = [&](double alpha, double beta, double tau) -> const SimulationResult* {
        for (const auto& r : results) {
            if (r.params.alpha == alpha && r.params.beta == beta && r.params.tau == tau) {
                return &r;
            }
        }
        return nullptr;
    };

    int improved = 0, pairs = 0;
    std::string detail;
    for (double alpha : {2.0, 4.0}) {
        for (double beta : {0.0, 0.1}) {
            const auto* lo = find(alpha, beta, 1000.0);
            const auto* hi = find(alpha, beta, 2000.0);
            if (!lo || !hi) {
                continue;
            }
            ++pairs;
            if (hi->ks <= lo->ks) {
                ++improved;
            }
        }
    }
    checks.push_back({"sim1 KS at tau=2000 <= KS at tau=1000 for >= 3 of 4 (alpha, beta) pairs",
                      pairs == 4 && improved >= 3, std::to_string(improved) + " of " + std::to_string(pairs)});

    if (const auto* w = find(4.0, 0.0, 2000.0)) {
        const double var_ratio = w->variance / 12500.0;
        checks.push_back({"winter mean |mean - 500| < " + num(kWinterMeanTolDays) + " at alpha=4 tau=2000",
                          std::abs(w->mean - 500.0) < kWinterMeanTolDays, "mean=" + fmt_fixed(w->mean, 3)});
        checks.push_back({"winter variance |var/12500 - 1| < " + num(kWinterVarRelTol) + " at alpha=4 tau=2000",
                          std::abs(var_ratio - 1.0) < kWinterVarRelTol, "var/12500=" + fmt_fixed(var_ratio, 4)});
    }
    return checks;
}

std::vector<CheckLine> check_sim2(const Sim2Grid& grid)
{
    std::vector<CheckLine> checks;
    for (const auto& cell : grid.cells) {
        const auto t = axis_index(reference::kSim2Taus, cell.tau);
        const auto a = axis_index(reference::kSim2Alphas, cell.alpha);
        const auto b = axis_index(reference::kSim2Betas, cell.beta);
        if (!t || !a || !b) {
            continue;
        }
        const double ref_mean = reference::kSim2Mean[*t][*a][*b];
        const double ref_sd = reference::kSim2Sd[*t][*a][*b];
        const std::string where = point_label(cell.alpha, cell.beta, cell.tau);
        checks.push_back({"sim2 mean within " + num(kSim2MeanTolDays) + " days at " + where,
                          std::abs(cell.summary.mean - ref_mean) < kSim2MeanTolDays,
                          fmt_fixed(cell.summary.mean, 2) + " vs " + fmt_fixed(ref_mean, 2)});
        checks.push_back({"sim2 sd within " + num(kSim2SdRelTol * 100) + "% at " + where,
                          std::abs(cell.summary.sd / ref_sd - 1.0) < kSim2SdRelTol,
                          fmt_fixed(cell.summary.sd, 2) + " vs " + fmt_fixed(ref_sd, 2)});
    }
    return checks;
}

std::vector<CheckLine> check_walnut(const WinterFit& fit)
{
    auto strictly_decreasing = [](const std::vector<double>& xs, const std::vector<double>& alphas) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            pts.emplace_back(alphas[i], xs[i]);
        }
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (pts[i].first > pts[i - 1].first && !(pts[i].second < pts[i - 1].second)) {
                return false;
            }
        }
        return true;
    };
    return {
        {"walnut fitted means strictly decreasing in alpha", strictly_decreasing(fit.fitted_means, fit.alphas),
         "tau_hat=" + fmt_fixed(fit.tau_hat, 4)},
        {"walnut fitted sds strictly decreasing in alpha", strictly_decreasing(fit.fitted_sds, fit.alphas),
         "sigma_hat=" + fmt_fixed(fit.sigma_hat, 4)},
        {"walnut weighted R^2 of fitted means >= " + num(kWalnutMinR2), fit.weighted_r_squared >= kWalnutMinR2,
         "R^2=" + fmt_fixed(fit.weighted_r_squared, 4)},
    };
}

std::vector<CheckLine> check_lilac(const BinnedGrid& grid)
{
    std::vector<CheckLine> checks;
    if (grid.alpha_edges.bins() != 4 || grid.beta_edges.bins() != 4) {
        checks.push_back({"lilac grid is 4x4", false, ""});
        return checks;
    }
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const GridCell& cell = grid.at(r, c);
            const std::string where = "cell alpha " + grid.alpha_edges.label(r, 1) + " beta " +
                                      grid.beta_edges.label(c, 2);
            const double rm = reference::kLilacMean[r][c];
            const double rs = reference::kLilacSd[r][c];
            checks.push_back({"lilac mean within " + num(kLilacMeanTolDays) + " days, " + where,
                              cell.mean && std::abs(*cell.mean - rm) <= kLilacMeanTolDays,
                              (cell.mean ? fmt_fixed(*cell.mean, 2) : "NA") + " vs " + fmt_fixed(rm, 2)});
            checks.push_back({"lilac sd within " + num(kLilacSdTolDays) + " days, " + where,
                              cell.sd && std::abs(*cell.sd - rs) <= kLilacSdTolDays,
                              (cell.sd ? fmt_fixed(*cell.sd, 2) : "NA") + " vs " + fmt_fixed(rs, 2)});
        }
    }
    bool columns_ok = true;
    for (std::size_t c = 0; c < 4; ++c) {
        const auto& lo = grid.at(0, c).sd;
        const auto& hi = grid.at(3, c).sd;
        columns_ok = columns_ok && lo && hi && *hi > *lo;
    }
    checks.push_back({"lilac sd larger in the highest alpha row than the lowest, every beta column", columns_ok, ""});
    bool row_ok = true;
    for (std::size_t c = 1; c < 4; ++c) {
        const auto& left = grid.at(3, c - 1).sd;
        const auto& right = grid.at(3, c).sd;
        row_ok = row_ok && left && right && *right < *left;
    }
    checks.push_back({"lilac sd decreasing left to right in the highest alpha row", row_ok, ""});
    return checks;
}

BinEdges edges_at_values(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty()) {
        throw PreconditionError("no values to build edges from");
    }
    // [v0, v0], (v0, v1], (v1, v2], ...
    std::vector<double> edges{values.front()};
    edges.insert(edges.end(), values.begin(), values.end());
    return make_bin_edges(std::move(edges));
}

std::vector<BloomObservation> synthetic_bloom_observations(const Sim2Grid& grid, double tau)
{
    std::vector<BloomObservation> obs;
    for (const auto& cell : grid.cells) {
        if (cell.tau != tau) {
            continue;
        }
        for (int nu : cell.hitting_times) {
            obs.push_back({cell.alpha, cell.beta, static_cast<double>(nu)});
        }
    }
    return obs;
}

std::vector<CheckLine> check_synthetic_bins(const BinnedGrid& grid, double tau)
{
    std::vector<CheckLine> checks;
    const auto t = axis_index(reference::kSim2Taus, tau);
    for (std::size_t r = 0; r < grid.alpha_edges.bins(); ++r) {
        for (std::size_t c = 0; c < grid.beta_edges.bins(); ++c) {
            const double alpha = grid.alpha_edges.edges[r + 1];
            const double beta = grid.beta_edges.edges[c + 1];
            const auto a = axis_index(reference::kSim2Alphas, alpha);
            const auto b = axis_index(reference::kSim2Betas, beta);
            if (!t || !a || !b) {
                continue;
            }
            const GridCell& cell = grid.at(r, c);
            const double ref = reference::kSim2Mean[*t][*a][*b];
            checks.push_back({"synthetic binned mean within " + num(kSim2MeanTolDays) + " days at " +
                                  point_label(alpha, beta, tau),
                              cell.mean && std::abs(*cell.mean - ref) < kSim2MeanTolDays,
                              (cell.mean ? fmt_fixed(*cell.mean, 2) : "NA") + " vs " + fmt_fixed(ref, 2)});
        }
    }
    return checks;
}

ReproduceOutcome reproduce_sim1(const ReproduceOptions& options)
{
    const std::uint64_t seed = require_seed(options, "sim1");
    ReproduceOutcome outcome;
    outcome.run_dir = prepare_run_dir(options, "sim1-seed" + std::to_string(seed));

    std::vector<SimulationResult> results;
    std::ostringstream csv, diag;
    csv << "alpha,beta,tau,sigma,R,seed,mean,sd,ks\n";
    diag << "alpha,beta,tau,theory_mean,theory_sd,ks,crossing_time,linearized_sd,ks_linearized,asymptotic_ok\n";
    std::uint64_t k = 0;
    for (const auto& params : sim1_grid()) {
        MonteCarloOptions mc;
        mc.replicates = options.replicates;
        mc.seed = derive_seed(seed, k++);
        mc.threads = options.threads;
        auto r = run_simulation_1(params, mc);

        csv << num(params.alpha) << ',' << num(params.beta) << ',' << num(params.tau) << ',' << num(params.sigma)
            << ',' << r.replicates << ',' << r.seed << ',' << num(r.mean) << ',' << num(r.sd) << ',' << num(r.ks)
            << '\n';
        const auto& th = r.theory;
        diag << num(params.alpha) << ',' << num(params.beta) << ',' << num(params.tau) << ',' << num(th.mean) << ','
             << num(th.sd()) << ',' << num(r.ks) << ',' << (th.crossing_time ? num(*th.crossing_time) : "NA") << ','
             << (th.linearized_variance ? num(std::sqrt(*th.linearized_variance)) : "NA") << ','
             << num(r.ks_linearized) << ',' << (th.asymptotic_ok ? 1 : 0) << '\n';

        const std::string tag = point_tag(params.alpha, params.beta, params.tau);
        std::ostringstream hist;
        hist << "bin_left,bin_right,count\n";
        for (const auto& bin : histogram(r.z_values, -4.0, 4.0, 40)) {
            hist << num(bin.left) << ',' << num(bin.right) << ',' << bin.count << '\n';
        }
        write_file(outcome, "hist_" + tag + ".csv", hist.str());

        std::ostringstream hits;
        for (int nu : r.hitting_times) {
            hits << nu << '\n';
        }
        write_file(outcome, "hits_" + tag + ".txt", hits.str());
        results.push_back(std::move(r));
    }
    write_file(outcome, "sim1.csv", csv.str());
    write_file(outcome, "sim1_diagnostics.csv", diag.str());
    outcome.checks = check_sim1(results);
    write_file(outcome, "checks.txt", checks_text(outcome.checks));
    return outcome;
}

ReproduceOutcome reproduce_sim2(const ReproduceOptions& options)
{
    const std::uint64_t seed = require_seed(options, "sim2");
    ReproduceOutcome outcome;
    outcome.run_dir = prepare_run_dir(options, "sim2-seed" + std::to_string(seed));

    MonteCarloOptions mc;
    mc.replicates = options.replicates;
    mc.seed = seed;
    mc.threads = options.threads;
    const Sim2Grid grid = run_simulation_2(Sim2Config{}, mc);

    std::ostringstream csv;
    csv << "alpha,beta,tau,sigma,R,seed,mean,sd,ks\n";
    for (const auto& cell : grid.cells) {
        csv << num(cell.alpha) << ',' << num(cell.beta) << ',' << num(cell.tau) << ',' << num(grid.sigma) << ','
            << grid.replicates << ',' << cell.seed << ',' << num(cell.summary.mean) << ',' << num(cell.summary.sd)
            << ",NA\n";
        if (options.raw) {
            std::ostringstream hits;
            for (int nu : cell.hitting_times) {
                hits << nu << '\n';
            }
            write_file(outcome, "hits_" + point_tag(cell.alpha, cell.beta, cell.tau) + ".txt", hits.str());
        }
    }
    write_file(outcome, "sim2.csv", csv.str());

    std::ostringstream table;
    const char* tags[] = {"(a)", "(b)", "(c)", "(d)"};
    for (std::size_t t = 0; t < grid.taus.size(); ++t) {
        write_sim_table(table, grid, t, true, tags[(2 * t) % 4]);
        write_sim_table(table, grid, t, false, tags[(2 * t + 1) % 4]);
    }
    write_file(outcome, "sim2_tables.txt", table.str());

    outcome.checks = check_sim2(grid);
    write_file(outcome, "checks.txt", checks_text(outcome.checks));
    return outcome;
}

ReproduceOutcome reproduce_walnut(const ReproduceOptions& options, const fs::path& fixture)
{
    std::vector<ForcingObservation> data;
    if (fixture.empty()) {
        data.assign(reference::kWalnutForcing.begin(), reference::kWalnutForcing.end());
    } else {
        std::ifstream in(fixture);
        if (!in) {
            throw MissingData("cannot open forcing fixture " + fixture.string());
        }
        data = read_forcing_csv(in);
    }
    ReproduceOutcome outcome;
    outcome.run_dir = prepare_run_dir(options, "walnut");
    const WinterFit fit = fit_winter_wls(data);

    std::ostringstream csv;
    csv << "alpha,n,mean,sd,fitted_mean,fitted_sd,mean_residual,weight\n";
    std::ostringstream table;
    table << "Forcing experiment: observed and fitted response times\n";
    table << std::right << std::setw(6) << "alpha" << std::setw(5) << "n" << std::setw(9) << "mean" << std::setw(9)
          << "sd" << std::setw(12) << "fit mean" << std::setw(10) << "fit sd" << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& o = data[i];
        csv << num(o.alpha) << ',' << o.n << ',' << num(o.mean_days) << ',' << num(o.sd_days) << ','
            << num(fit.fitted_means[i]) << ',' << num(fit.fitted_sds[i]) << ',' << num(fit.mean_residuals[i]) << ','
            << num(fit.mean_weights[i]) << '\n';
        table << std::setw(6) << num(o.alpha) << std::setw(5) << o.n << std::setw(9) << fmt_fixed(o.mean_days, 0)
              << std::setw(9) << fmt_fixed(o.sd_days, 2) << std::setw(12) << fmt_fixed(fit.fitted_means[i], 2)
              << std::setw(10) << fmt_fixed(fit.fitted_sds[i], 2) << '\n';
    }
    table << "\ntau_hat = " << fmt_fixed(fit.tau_hat, 4) << " degree-days\n";
    table << "sigma_hat = " << fmt_fixed(fit.sigma_hat, 4) << " degC\n";
    table << "weighted R^2 (means) = " << fmt_fixed(fit.weighted_r_squared, 4) << '\n';
    write_file(outcome, "walnut_fit.csv", csv.str());
    write_file(outcome, "forcing_fit.txt", table.str());

    outcome.checks = check_walnut(fit);
    write_file(outcome, "checks.txt", checks_text(outcome.checks));
    return outcome;
}

namespace {

void write_grid_outputs(ReproduceOutcome& outcome, const BinnedGrid& grid)
{
    std::ostringstream csv;
    write_grid_csv(csv, grid);
    write_file(outcome, "grid.csv", csv.str());
    std::ostringstream means, sds;
    write_grid_table(means, grid, GridStat::Mean, "Mean bloom day-of-year by alpha (rows) and beta (columns)");
    write_grid_table(sds, grid, GridStat::Sd, "SD of bloom day-of-year by alpha (rows) and beta (columns)");
    write_file(outcome, "grid_mean.txt", means.str());
    write_file(outcome, "grid_sd.txt", sds.str());
}

} // namespace

ReproduceOutcome reproduce_lilac_bins(const ReproduceOptions& options, const LilacInputs& inputs)
{
    for (const auto& p : {inputs.temperatures, inputs.observations}) {
        if (p.empty() || !fs::exists(p)) {
            throw MissingData("lilac-bins needs " + (p.empty() ? std::string("an input path") : p.string()));
        }
    }
    const auto temps =
        parse_temperature_csv(inputs.temperatures, inputs.tenths ? TemperatureUnits::Tenths : TemperatureUnits::Celsius);
    const auto obs = parse_phenology_csv(inputs.observations);

    ReproduceOutcome outcome;
    outcome.run_dir = prepare_run_dir(options, "lilac-bins");

    JoinOptions join;
    join.species = inputs.species;
    join.phenophase = inputs.phenophase;
    JoinReport report;
    const auto rows = build_analysis_rows(obs.observations, temps.records, join, &report);

    std::ostringstream rows_csv;
    write_analysis_csv(rows_csv, rows);
    write_file(outcome, "analysis_rows.csv", rows_csv.str());

    std::ostringstream rep;
    rep << "temperature_rows," << temps.report.rows << "\ntemperature_rejected," << temps.report.rejected
        << "\nobservation_rows," << obs.report.rows << "\nobservation_rejected," << obs.report.rejected
        << "\nfiltered_out," << report.filtered_out << "\nunmatched," << report.unmatched << "\ninsufficient,"
        << report.insufficient << "\njoined," << report.joined << '\n';
    write_file(outcome, "join_report.csv", rep.str());

    if (rows.size() < 4) {
        outcome.checks.push_back({"lilac joined rows >= 4", false, std::to_string(rows.size()) + " rows"});
        write_file(outcome, "checks.txt", checks_text(outcome.checks));
        return outcome;
    }
    std::vector<BloomObservation> bloom;
    for (const auto& r : rows) {
        bloom.push_back({r.alpha_hat, r.beta_hat, static_cast<double>(r.bloom_doy)});
    }
    const BinnedGrid grid = bin_location_scale(bloom, 4);
    write_grid_outputs(outcome, grid);
    outcome.checks = check_lilac(grid);
    write_file(outcome, "checks.txt", checks_text(outcome.checks));
    return outcome;
}

ReproduceOutcome reproduce_lilac_bins_synthetic(const ReproduceOptions& options)
{
    const std::uint64_t seed = require_seed(options, "lilac-bins --synthetic");
    ReproduceOutcome outcome;
    outcome.run_dir = prepare_run_dir(options, "lilac-bins-synthetic-seed" + std::to_string(seed));

    MonteCarloOptions mc;
    mc.replicates = options.replicates;
    mc.seed = seed;
    mc.threads = options.threads;
    Sim2Config config;
    config.taus = {1000.0};
    const Sim2Grid sim = run_simulation_2(config, mc);

    const auto bloom = synthetic_bloom_observations(sim, 1000.0);
    const BinnedGrid grid =
        bin_location_scale(bloom, edges_at_values(config.alphas), edges_at_values(config.betas));
    write_grid_outputs(outcome, grid);
    outcome.checks = check_synthetic_bins(grid, 1000.0);
    const long expected = static_cast<long>(bloom.size());
    outcome.checks.push_back({"synthetic binning partitions every observation", grid.total() == expected,
                              std::to_string(grid.total()) + " of " + std::to_string(expected)});
    write_file(outcome, "checks.txt", checks_text(outcome.checks));
    return outcome;
}

} // namespace thermalsum
