// thermalsum: command-line front end.
//
// Exit codes: 0 ok, 1 check failure, 2 usage error, 3 missing data.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "thermalsum/data_io.hpp"
#include "thermalsum/errors.hpp"
#include "thermalsum/estimation.hpp"
#include "thermalsum/format.hpp"
#include "thermalsum/model.hpp"
#include "thermalsum/reproduce.hpp"

namespace ts = thermalsum;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMissingData = 3;

struct ApproxArgs {
    double alpha = 0.0;
    double beta = 0.0;
    double tau = 0.0;
    double sigma = 0.0;
    std::string format = "table";
};

struct ReproduceArgs {
    std::string target;
    std::optional<std::uint64_t> seed;
    bool check = false;
    unsigned threads = 0;
    int replicates = 10000;
    std::string out = "runs";
    bool force = false;
    bool raw = false;
    std::string data_dir;
    bool synthetic = false;
    bool tenths = false;
    std::string fixture;
    std::string species = "common lilac";
    std::string phenophase = "full bloom";
};

struct EstimateArgs {
    std::string temperatures;
    std::string out;
    bool tenths = false;
    double min_completeness = ts::kDefaultCompleteness;
};

int run_approx(const ApproxArgs& a)
{
    const ts::RegimeParams params{a.alpha, a.beta, a.sigma, a.tau};
    const ts::HittingTimeApprox h = ts::approximate(params);
    const ts::Sensitivity s = ts::sensitivity(params);

    if (a.format == "json") {
        nlohmann::ordered_json j;
        j["regime"] = ts::to_string(h.regime);
        j["mean"] = h.mean;
        j["variance"] = h.variance;
        j["sd"] = h.sd();
        j["d_mean_d_alpha"] = s.d_alpha;
        if (s.d_beta) {
            j["d_mean_d_beta"] = *s.d_beta;
            j["d_mean_d_beta_leading"] = *s.d_beta_leading;
        }
        if (h.crossing_time) {
            j["crossing_time"] = *h.crossing_time;
            j["linearized_variance"] = *h.linearized_variance;
        }
        j["asymptotic_ok"] = h.asymptotic_ok;
        std::cout << j.dump(2) << '\n';
    } else if (a.format == "csv") {
        std::cout << "regime,mean,variance,sd,crossing_time,linearized_variance,asymptotic_ok\n"
                  << ts::to_string(h.regime) << ',' << ts::fmt_sig6(h.mean) << ',' << ts::fmt_sig6(h.variance) << ','
                  << ts::fmt_sig6(h.sd()) << ',' << (h.crossing_time ? ts::fmt_sig6(*h.crossing_time) : "NA") << ','
                  << (h.linearized_variance ? ts::fmt_sig6(*h.linearized_variance) : "NA") << ','
                  << (h.asymptotic_ok ? 1 : 0) << '\n';
    } else {
        std::cout << "regime=" << ts::to_string(h.regime) << " mean=" << ts::fmt_sig6(h.mean)
                  << " variance=" << ts::fmt_sig6(h.variance) << " sd=" << ts::fmt_sig6(h.sd()) << '\n';
        if (h.crossing_time) {
            std::cout << "crossing_time=" << ts::fmt_sig6(*h.crossing_time)
                      << " linearized_variance=" << ts::fmt_sig6(*h.linearized_variance) << '\n';
        }
        std::cout << "d_mean_d_alpha=" << ts::fmt_sig6(s.d_alpha);
        if (s.d_beta) {
            std::cout << " d_mean_d_beta=" << ts::fmt_sig6(*s.d_beta)
                      << " d_mean_d_beta_leading=" << ts::fmt_sig6(*s.d_beta_leading);
        }
        std::cout << '\n';
        if (!h.asymptotic_ok) {
            std::cout << "warning: crossing before day " << ts::kMinAsymptoticCrossingDays
                      << "; the approximation is outside its asymptotic range\n";
        }
    }
    return kExitOk;
}

fs::path data_root(const ReproduceArgs& a)
{
    if (!a.data_dir.empty()) {
        return a.data_dir;
    }
    if (const char* env = std::getenv("THERMALSUM_DATA_DIR")) {
        return env;
    }
    return {};
}

int run_reproduce(const ReproduceArgs& a)
{
    ts::ReproduceOptions opts;
    opts.seed = a.seed;
    opts.threads = a.threads;
    opts.replicates = a.replicates;
    opts.out_root = a.out;
    opts.force = a.force;
    opts.raw = a.raw;

    ts::ReproduceOutcome outcome;
    if (a.target == "sim1") {
        outcome = ts::reproduce_sim1(opts);
    } else if (a.target == "sim2") {
        outcome = ts::reproduce_sim2(opts);
    } else if (a.target == "walnut") {
        fs::path fixture = a.fixture;
        if (fixture.empty()) {
            const fs::path root = data_root(a);
            if (!root.empty() && fs::exists(root / "walnut_forcing.csv")) {
                fixture = root / "walnut_forcing.csv";
            }
        }
        outcome = ts::reproduce_walnut(opts, fixture);
    } else if (a.synthetic) {
        outcome = ts::reproduce_lilac_bins_synthetic(opts);
    } else {
        const fs::path root = data_root(a);
        if (root.empty()) {
            throw ts::MissingData("lilac-bins needs --data-dir or THERMALSUM_DATA_DIR (or --synthetic)");
        }
        ts::LilacInputs inputs;
        inputs.temperatures = root / "temperatures.csv";
        inputs.observations = root / "observations.csv";
        inputs.tenths = a.tenths;
        inputs.species = a.species;
        inputs.phenophase = a.phenophase;
        outcome = ts::reproduce_lilac_bins(opts, inputs);
    }

    std::cout << "run directory: " << outcome.run_dir.string() << '\n';
    for (const auto& c : outcome.checks) {
        std::cout << ts::format_check(c) << '\n';
    }
    if (a.check && !ts::all_pass(outcome.checks)) {
        std::cerr << "check failed\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int run_estimate(const EstimateArgs& a)
{
    const auto table = ts::parse_temperature_csv(fs::path(a.temperatures),
                                                 a.tenths ? ts::TemperatureUnits::Tenths : ts::TemperatureUnits::Celsius);
    std::set<std::pair<std::string, int>> station_years;
    for (const auto& r : table.records) {
        station_years.emplace(r.station_id, r.date.year);
    }
    std::vector<ts::RegimeEstimate> rows;
    for (const auto& [station, year] : station_years) {
        try {
            const auto series = ts::clip_base(ts::midrange_series(table.records, station, year));
            rows.push_back(ts::estimate_regime(series, a.min_completeness));
        } catch (const ts::InsufficientData& e) {
            std::cerr << "skip " << station << '/' << year << ": " << e.what() << '\n';
        } catch (const ts::DegenerateDesign& e) {
            std::cerr << "skip " << station << '/' << year << ": " << e.what() << '\n';
        }
    }
    if (table.report.rejected > 0) {
        std::cerr << table.report.rejected << " of " << table.report.rows << " temperature rows rejected\n";
    }
    if (a.out.empty()) {
        ts::write_regime_csv(std::cout, rows);
    } else {
        std::ofstream out(a.out, std::ios::binary);
        if (!out) {
            throw ts::Error("cannot write " + a.out);
        }
        ts::write_regime_csv(out, rows);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Thermal-sum hitting-time approximations, simulations and reproduction runs"};
    app.require_subcommand(1);

    ApproxArgs approx;
    auto* approx_cmd = app.add_subcommand("approx", "Closed-form mean and variance of the hitting time");
    approx_cmd->add_option("--alpha", approx.alpha, "Mean daily temperature at accumulation start (degC/day)")
        ->required();
    approx_cmd->add_option("--beta", approx.beta, "Daily warming rate (degC/day^2); 0 selects the winter regime")
        ->required();
    approx_cmd->add_option("--tau", approx.tau, "Thermal-sum threshold (degree-days)")->required();
    approx_cmd->add_option("--sigma", approx.sigma, "Daily noise standard deviation (degC)")->required();
    approx_cmd->add_option("--format", approx.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}));

    ReproduceArgs repro;
    auto* repro_cmd = app.add_subcommand("reproduce", "Regenerate a reference table or simulation");
    repro_cmd->add_option("target", repro.target, "sim1 | sim2 | walnut | lilac-bins")
        ->required()
        ->check(CLI::IsMember({"sim1", "sim2", "walnut", "lilac-bins"}));
    repro_cmd->add_option("--seed", repro.seed, "Master seed (required for stochastic targets)");
    repro_cmd->add_flag("--check", repro.check, "Exit 1 if any tolerance check fails");
    repro_cmd->add_option("--threads", repro.threads, "Worker threads (0 = available parallelism)");
    repro_cmd->add_option("--replicates,-R", repro.replicates, "Replicates per grid point")
        ->check(CLI::PositiveNumber);
    repro_cmd->add_option("--out", repro.out, "Root directory for run outputs");
    repro_cmd->add_flag("--force", repro.force, "Overwrite an existing run directory");
    repro_cmd->add_flag("--raw", repro.raw, "Also write raw hitting times (sim2)");
    repro_cmd->add_option("--data-dir", repro.data_dir, "Data root (default: $THERMALSUM_DATA_DIR)");
    repro_cmd->add_flag("--synthetic", repro.synthetic, "lilac-bins: bin simulated data at true parameters");
    repro_cmd->add_flag("--tenths", repro.tenths, "lilac-bins: temperatures are in tenths of a degree");
    repro_cmd->add_option("--fixture", repro.fixture, "walnut: alpha,n,mean,sd CSV");
    repro_cmd->add_option("--species", repro.species, "lilac-bins: species tag to keep");
    repro_cmd->add_option("--phenophase", repro.phenophase, "lilac-bins: phenophase tag to keep");

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate alpha and beta for every station-year in a CSV");
    est_cmd->add_option("--temperatures", est.temperatures, "station_id,date,lat,lon,tmax,tmin CSV")
        ->required()
        ->check(CLI::ExistingFile);
    est_cmd->add_option("--out", est.out, "Output CSV (default: stdout)");
    est_cmd->add_flag("--tenths", est.tenths, "Temperatures are in tenths of a degree");
    est_cmd->add_option("--min-completeness", est.min_completeness, "Required fraction of days per window")
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*approx_cmd) {
            return run_approx(approx);
        }
        if (*repro_cmd) {
            return run_reproduce(repro);
        }
        return run_estimate(est);
    } catch (const ts::MissingData& e) {
        std::cerr << "missing data: " << e.what() << '\n';
        return kExitMissingData;
    } catch (const ts::PreconditionError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ts::OutputExists& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}
