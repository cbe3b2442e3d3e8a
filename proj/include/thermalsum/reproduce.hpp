#pragma once

// End-to-end reproduction runs: simulations, the forcing-experiment fit and
// the binned bloom-date grid. Each run writes its artifacts into a run
// directory and evaluates a list of tolerance checks.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thermalsum/errors.hpp"
#include "thermalsum/fitting.hpp"
#include "thermalsum/simulation.hpp"

namespace thermalsum {

// Refusing to clobber an existing run directory.
class OutputExists : public Error {
public:
    using Error::Error;
};

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

bool all_pass(const std::vector<CheckLine>& checks);
std::string format_check(const CheckLine& check);

struct ReproduceOptions {
    std::optional<std::uint64_t> seed; // required by stochastic targets
    unsigned threads = 0;
    int replicates = 10000;
    std::filesystem::path out_root = ".";
    bool force = false;
    bool raw = false; // also write raw hitting-time files where optional
};

struct ReproduceOutcome {
    std::filesystem::path run_dir;
    std::vector<std::filesystem::path> files;
    std::vector<CheckLine> checks;
};

// Tolerances.
inline constexpr double kSim2MeanTolDays = 0.6;
inline constexpr double kSim2SdRelTol = 0.05;
inline constexpr double kKsMax = 0.05;
inline constexpr double kWinterMeanTolDays = 0.55;
inline constexpr double kWinterVarRelTol = 0.1;
inline constexpr double kWalnutMinR2 = 0.95;
inline constexpr double kLilacMeanTolDays = 2.0;
inline constexpr double kLilacSdTolDays = 1.5;

// Simulation 1 grid: tau in {1000, 2000}, alpha in {2, 4}, beta in {0, 0.1}, sigma = 20.
std::vector<RegimeParams> sim1_grid();

std::vector<CheckLine> check_sim1(const std::vector<SimulationResult>& results);
std::vector<CheckLine> check_sim2(const Sim2Grid& grid);
std::vector<CheckLine> check_walnut(const WinterFit& fit);
std::vector<CheckLine> check_lilac(const BinnedGrid& grid);
// Synthetic fallback: Simulation-2 hitting times binned at their true (alpha, beta).
std::vector<CheckLine> check_synthetic_bins(const BinnedGrid& grid, double tau);

// Observations (alpha, beta, nu) for every replicate of the tau cells of a
// Simulation-2 grid, and edges that put each true parameter in its own cell.
std::vector<BloomObservation> synthetic_bloom_observations(const Sim2Grid& grid, double tau);
BinEdges edges_at_values(std::vector<double> values);

ReproduceOutcome reproduce_sim1(const ReproduceOptions& options);
ReproduceOutcome reproduce_sim2(const ReproduceOptions& options);
// `fixture` is an alpha,n,mean,sd CSV; the built-in table is used when empty.
ReproduceOutcome reproduce_walnut(const ReproduceOptions& options, const std::filesystem::path& fixture = {});

struct LilacInputs {
    std::filesystem::path temperatures;  // station_id,date,lat,lon,tmax,tmin
    std::filesystem::path observations;  // site_id,latitude,longitude,year,bloom_doy,species,phenophase
    bool tenths = false;
    std::string species = "common lilac";
    std::string phenophase = "full bloom";
};

// Throws MissingData when either input file is absent.
ReproduceOutcome reproduce_lilac_bins(const ReproduceOptions& options, const LilacInputs& inputs);
// Fallback pipeline on Simulation-2 synthetic observations.
ReproduceOutcome reproduce_lilac_bins_synthetic(const ReproduceOptions& options);

} // namespace thermalsum
