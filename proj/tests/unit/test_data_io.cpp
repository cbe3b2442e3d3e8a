#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "thermalsum/data_io.hpp"
#include "thermalsum/errors.hpp"

using namespace thermalsum;

namespace {

constexpr const char* kHeader = "station_id,date,lat,lon,tmax,tmin\n";

// Point `km` kilometres due north of (lat, lon).
std::pair<double, double> north_of(double lat, double lon, double km)
{
    return {lat + km / kEarthRadiusKm * 180.0 / M_PI, lon};
}

PhenologyObservation site_at(double lat, double lon)
{
    PhenologyObservation o;
    o.site_id = "s";
    o.latitude = lat;
    o.longitude = lon;
    return o;
}

} // namespace

TEST_CASE("dates")
{
    CHECK(parse_iso_date("2020-02-29"));
    CHECK_FALSE(parse_iso_date("2021-02-29"));
    CHECK_FALSE(parse_iso_date("2021-2-28"));
    CHECK_FALSE(parse_iso_date("2021-02-28x"));
    CHECK(parse_iso_date("2020-03-01")->day_of_year() == 61);
    CHECK(parse_iso_date("2021-03-01")->day_of_year() == 60);
    CHECK(to_iso(Date{2021, 4, 9}) == "2021-04-09");
}

TEST_CASE("temperature CSV parsing")
{
    std::istringstream in(std::string(kHeader) +
                          "A,2021-01-01,40.0,-75.0,10,0\n"
                          "A,2021-01-02,40.0,-75.0,NA,1\n"
                          "A,2021-01-03,40.0,-75.0,5,-2.5\n");
    const auto t = parse_temperature_csv(in);
    REQUIRE(t.records.size() == 3);
    CHECK(t.report.rejected == 0);
    CHECK(t.records[0].station_id == "A");
    CHECK(*t.records[0].tmax == 10.0);
    CHECK_FALSE(t.records[1].tmax);
    CHECK(*t.records[2].tmin == -2.5);
}

TEST_CASE("columns in any order, and bad rows are counted")
{
    std::istringstream in("tmin,tmax,lon,lat,date,station_id\n"
                          "5,1,-75,40,2021-01-01,A\n"    // tmin > tmax
                          "0,1,-75,95,2021-01-02,A\n"    // latitude out of range
                          "0,1,-75,40,2021-13-02,A\n"    // bad date
                          "0,1,-75,40,2021-01-04,A\n");
    const auto t = parse_temperature_csv(in);
    CHECK(t.records.size() == 1);
    CHECK(t.report.rows == 4);
    CHECK(t.report.rejected == 3);
    CHECK(t.report.messages.size() == 3);
}

TEST_CASE("tenths of a degree")
{
    std::istringstream in(std::string(kHeader) + "A,2021-01-01,40,-75,156,-22\n");
    const auto t = parse_temperature_csv(in, TemperatureUnits::Tenths);
    CHECK(*t.records[0].tmax == doctest::Approx(15.6));
    CHECK(*t.records[0].tmin == doctest::Approx(-2.2));
}

TEST_CASE("header and empty-file errors")
{
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_temperature_csv(empty), EmptyFile);
    std::istringstream no_tmin("station_id,date,lat,lon,tmax\nA,2021-01-01,40,-75,1\n");
    CHECK_THROWS_AS(parse_temperature_csv(no_tmin), MissingHeader);
    CHECK_THROWS_AS(parse_temperature_csv(std::filesystem::path("/nonexistent/temps.csv")), MissingData);
}

TEST_CASE("write then parse round-trips random records")
{
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-179.0, 179.0), temp(-40.0, 40.0);
    std::uniform_int_distribution<int> doy(0, 364);
    std::bernoulli_distribution missing(0.1);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<StationRecord> records;
        for (int i = 0; i < 50; ++i) {
            StationRecord r;
            r.station_id = "ST" + std::to_string(i % 5);
            r.latitude = lat(gen);
            r.longitude = lon(gen);
            const auto d = std::chrono::sys_days(std::chrono::year(2021) / 1 / 1) + std::chrono::days(doy(gen));
            const std::chrono::year_month_day ymd(d);
            r.date = {int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
            const double a = temp(gen), b = temp(gen);
            r.tmax = std::max(a, b);
            r.tmin = std::min(a, b);
            if (missing(gen)) {
                r.tmax.reset();
            }
            records.push_back(r);
        }
        std::ostringstream out;
        write_temperature_csv(out, records);
        std::istringstream in(out.str());
        const auto back = parse_temperature_csv(in);
        CHECK(back.report.rejected == 0);
        CHECK(back.records == records);
    }
}

TEST_CASE("midrange series")
{
    std::istringstream in(std::string(kHeader) +
                          "A,2020-01-01,40,-75,10,0\n"
                          "A,2020-01-02,40,-75,,3\n"
                          "A,2020-02-29,40,-75,4,2\n"
                          "B,2020-01-01,41,-75,30,20\n");
    const auto t = parse_temperature_csv(in);
    const auto s = midrange_series(t.records, "A", 2020);
    CHECK(s.values.size() == 366);
    CHECK(*s.at(1) == 5.0);
    CHECK_FALSE(s.at(2));
    CHECK(*s.at(60) == 3.0);
    CHECK_FALSE(s.at(3));
    CHECK(midrange_series(t.records, "A", 2021).completeness() == 0.0);
}

TEST_CASE("haversine basics")
{
    CHECK(haversine_km(40.0, -75.0, 40.0, -75.0) == 0.0);
    CHECK(haversine_km(40.0, -75.0, 41.0, -74.0) == doctest::Approx(haversine_km(41.0, -74.0, 40.0, -75.0)));
    CHECK(haversine_km(0.0, 0.0, 0.0, 180.0) == doctest::Approx(M_PI * kEarthRadiusKm));
    CHECK(haversine_km(40.0, -75.0, 40.3, -75.2) ==
          doctest::Approx(oracle::spherical_cosines_km(40.0, -75.0, 40.3, -75.2, kEarthRadiusKm)).epsilon(1e-6));
}

TEST_CASE("station matching")
{
    const auto [lat5, lon5] = north_of(40.0, -75.0, 5.0);
    const auto [lat8, lon8] = north_of(40.0, -75.0, -8.0);
    const auto [lat20, lon20] = north_of(40.0, -75.0, 20.0);
    const std::vector<StationLocation> stations{{"FAR", lat20, lon20}, {"EIGHT", lat8, lon8}, {"FIVE", lat5, lon5}};

    const auto m = match_station(site_at(40.0, -75.0), stations);
    REQUIRE(m);
    CHECK(m->station_id == "FIVE");
    CHECK(std::abs(m->distance_km - oracle::spherical_cosines_km(40.0, -75.0, lat5, lon5, kEarthRadiusKm)) < 1e-3);
    CHECK(std::abs(m->distance_km - 5.0) < 1e-3);

    const auto self = match_station(site_at(lat8, lon8), stations);
    CHECK(self->station_id == "EIGHT");
    CHECK(self->distance_km == 0.0);

    CHECK_FALSE(match_station(site_at(40.0, -75.0), {{"FAR", lat20, lon20}}));

    const std::vector<StationLocation> tied{{"ZED", lat5, lon5}, {"ABC", lat5, lon5}};
    CHECK(match_station(site_at(40.0, -75.0), tied)->station_id == "ABC");
}

TEST_CASE("phenology CSV parsing")
{
    std::istringstream in("site_id,latitude,longitude,year,bloom_doy,species,phenophase\n"
                          "S1,40.0,-75.0,2021,120,common lilac,full bloom\n"
                          "S2,40.0,-75.0,2021,abc,common lilac,full bloom\n"
                          "\"S3\",40.0,-75.0,2021,125,\"common lilac\",full bloom\n");
    const auto p = parse_phenology_csv(in);
    REQUIRE(p.observations.size() == 2);
    CHECK(p.report.rejected == 1);
    CHECK(p.observations[1].site_id == "S3");
    CHECK(p.observations[1].species == "common lilac");
    CHECK(p.observations[0].bloom_doy == 120);
}

TEST_CASE("end-to-end join on a synthetic fixture")
{
    // Station A: alpha = 2 in Jan-Feb, slope 0.5 over Mar-Apr. Station C has only January.
    std::vector<StationRecord> records;
    for (int d = 1; d <= 120; ++d) {
        const auto day = std::chrono::sys_days(std::chrono::year(2021) / 1 / 1) + std::chrono::days(d - 1);
        const std::chrono::year_month_day ymd(day);
        const Date date{int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
        const double mid = d <= 59 ? 2.0 : 0.5 * (d - 59);
        records.push_back({"A", 40.0, -75.0, date, mid + 1.0, mid - 1.0});
        if (d <= 30) { // too incomplete to estimate
            records.push_back({"C", 45.0, -75.0, date, 1.0, 0.0});
        }
    }
    std::vector<PhenologyObservation> obs{
        {"near", 40.05, -75.0, 2021, 110, "common lilac", "full bloom"},
        {"other-year", 40.0, -75.0, 2020, 111, "common lilac", "full bloom"},
        {"nowhere", 10.0, 10.0, 2021, 112, "common lilac", "full bloom"},
        {"wrong-species", 40.0, -75.0, 2021, 113, "forsythia", "full bloom"},
        {"by-C", 45.0, -75.0, 2021, 114, "common lilac", "full bloom"},
    };
    JoinOptions options;
    options.species = "common lilac";
    options.phenophase = "full bloom";
    JoinReport report;
    const auto rows = build_analysis_rows(obs, records, options, &report);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].site_id == "near");
    CHECK(rows[0].station_id == "A");
    CHECK(rows[0].alpha_hat == doctest::Approx(2.0));
    CHECK(rows[0].beta_hat == doctest::Approx(0.5));
    CHECK(rows[0].bloom_doy == 110);
    CHECK(report.observations == 5);
    CHECK(report.filtered_out == 1);
    CHECK(report.unmatched == 1);
    CHECK(report.insufficient == 2);
    CHECK(report.joined == 1);
    CHECK(report.filtered_out + report.unmatched + report.insufficient + report.joined == report.observations);

    std::ostringstream csv;
    write_analysis_csv(csv, rows);
    CHECK(csv.str() == "site,year,alpha,beta,bloom_doy\nnear,2021,2,0.5,110\n");
}
