#pragma once

// Station temperature and phenology observation ingest, station matching,
// and the joined per-observation analysis table.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thermalsum/estimation.hpp"

namespace thermalsum {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    int day_of_year() const;
    auto operator<=>(const Date&) const = default;
};

// Strict YYYY-MM-DD; nullopt for anything else, including impossible dates.
std::optional<Date> parse_iso_date(std::string_view text);
std::string to_iso(const Date& date);

struct StationRecord {
    std::string station_id;
    double latitude = 0.0;
    double longitude = 0.0;
    Date date;
    std::optional<double> tmax; // degC
    std::optional<double> tmin; // degC

    bool operator==(const StationRecord&) const = default;
};

enum class TemperatureUnits {
    Celsius,
    Tenths, // GHCND raw convention: tenths of a degree
};

struct ParseReport {
    long rows = 0;
    long rejected = 0;
    std::vector<std::string> messages; // one per rejected row
};

struct TemperatureTable {
    std::vector<StationRecord> records;
    ParseReport report;
};

// Header must name station_id,date,lat,lon,tmax,tmin (any order). Empty or
// "NA" temperature fields are missing. Rows that fail to parse or violate
// tmax >= tmin or coordinate bounds are counted and skipped. Throws EmptyFile
// or MissingHeader.
TemperatureTable parse_temperature_csv(std::istream& in, TemperatureUnits units = TemperatureUnits::Celsius);
TemperatureTable parse_temperature_csv(const std::filesystem::path& path,
                                       TemperatureUnits units = TemperatureUnits::Celsius);

// Writes records in Celsius with round-trip-exact numbers.
void write_temperature_csv(std::ostream& out, const std::vector<StationRecord>& records);

// (tmax + tmin) / 2 for each day of the station-year; a day is missing if
// either extreme is missing.
DailyTemperatureSeries midrange_series(const std::vector<StationRecord>& records, const std::string& station_id,
                                       int year);

struct PhenologyObservation {
    std::string site_id;
    double latitude = 0.0;
    double longitude = 0.0;
    int year = 0;
    int bloom_doy = 0;
    std::string species;
    std::string phenophase;
};

struct PhenologyTable {
    std::vector<PhenologyObservation> observations;
    ParseReport report;
};

// Header: site_id,latitude,longitude,year,bloom_doy,species,phenophase.
PhenologyTable parse_phenology_csv(std::istream& in);
PhenologyTable parse_phenology_csv(const std::filesystem::path& path);

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kTenMilesKm = 16.0934;

double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct StationLocation {
    std::string station_id;
    double latitude = 0.0;
    double longitude = 0.0;
};

// Distinct stations in first-seen order.
std::vector<StationLocation> station_locations(const std::vector<StationRecord>& records);

struct StationMatch {
    std::string station_id;
    double distance_km = 0.0;
};

// Nearest station within `max_km`; ties go to the lexicographically smaller id.
std::optional<StationMatch> match_station(const PhenologyObservation& site,
                                          const std::vector<StationLocation>& stations,
                                          double max_km = kTenMilesKm);

struct AnalysisRow {
    std::string site_id;
    int year = 0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    int bloom_doy = 0;
    std::string station_id;
};

struct JoinOptions {
    std::string species;    // empty: accept all
    std::string phenophase; // empty: accept all
    double max_station_km = kTenMilesKm;
    double min_completeness = kDefaultCompleteness;
};

struct JoinReport {
    long observations = 0;
    long filtered_out = 0;
    long unmatched = 0;
    long insufficient = 0;
    long joined = 0;
};

// Matches each observation to a station, clips the station-year midrange
// series at 0, estimates (alpha, beta) and emits one row per observation with
// both estimates available.
std::vector<AnalysisRow> build_analysis_rows(const std::vector<PhenologyObservation>& observations,
                                             const std::vector<StationRecord>& records, const JoinOptions& options,
                                             JoinReport* report = nullptr);

// site,year,alpha,beta,bloom_doy with 6 significant digits.
void write_analysis_csv(std::ostream& out, const std::vector<AnalysisRow>& rows);

} // namespace thermalsum
