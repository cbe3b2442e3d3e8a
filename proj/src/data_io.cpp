#include "thermalsum/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

#include "thermalsum/errors.hpp"
#include "thermalsum/format.hpp"

namespace thermalsum {

namespace {

std::optional<double> parse_double(std::string_view text)
{
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<int> parse_int(std::string_view text)
{
    text = trim(text);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

bool is_missing(std::string_view text)
{
    text = trim(text);
    return text.empty() || text == "NA" || text == "NaN";
}

class HeaderIndex {
public:
    HeaderIndex(const std::vector<std::string>& header, std::initializer_list<std::string_view> required,
                const char* what)
    {
        for (auto name : required) {
            auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; });
            if (it == header.end()) {
                throw MissingHeader(std::string(what) + " CSV header lacks column '" + std::string(name) + "'");
            }
            columns_.emplace_back(name, static_cast<std::size_t>(it - header.begin()));
        }
        width_ = header.size();
    }

    std::size_t operator[](std::string_view name) const
    {
        for (const auto& [n, i] : columns_) {
            if (n == name) {
                return i;
            }
        }
        throw PreconditionError("unknown column " + std::string(name));
    }

    std::size_t width() const { return width_; }

private:
    std::vector<std::pair<std::string_view, std::size_t>> columns_;
    std::size_t width_ = 0;
};

std::vector<std::string> read_header(std::istream& in, const char* what)
{
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            return split_csv_line(line);
        }
    }
    throw EmptyFile(std::string(what) + " CSV is empty");
}

void reject(ParseReport& report, long line_no, const std::string& why)
{
    ++report.rejected;
    report.messages.push_back("line " + std::to_string(line_no) + ": " + why);
}

std::ifstream open_or_throw(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MissingData("cannot open " + path.string());
    }
    return in;
}

DailyTemperatureSeries midrange_of(const std::vector<const StationRecord*>& records, const std::string& station_id,
                                   int year)
{
    DailyTemperatureSeries series(station_id, year);
    for (const StationRecord* r : records) {
        if (r->station_id != station_id || r->date.year != year) {
            continue;
        }
        std::optional<double> value;
        if (r->tmax && r->tmin) {
            value = 0.5 * (*r->tmax + *r->tmin);
        }
        series.set(r->date.day_of_year(), value);
    }
    return series;
}

} // namespace

int Date::day_of_year() const
{
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{this->year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    const year_month_day jan1{std::chrono::year{this->year}, January, std::chrono::day{1}};
    return static_cast<int>((sys_days{ymd} - sys_days{jan1}).count()) + 1;
}

std::optional<Date> parse_iso_date(std::string_view text)
{
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    const auto y = parse_int(text.substr(0, 4));
    const auto m = parse_int(text.substr(5, 2));
    const auto d = parse_int(text.substr(8, 2));
    if (!y || !m || !d || *m < 1 || *d < 1) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{*y, *m, *d};
}

std::string to_iso(const Date& date)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", date.year, date.month, date.day);
    return buf;
}

TemperatureTable parse_temperature_csv(std::istream& in, TemperatureUnits units)
{
    const auto header = read_header(in, "temperature");
    const HeaderIndex col(header, {"station_id", "date", "lat", "lon", "tmax", "tmin"}, "temperature");
    const double scale = units == TemperatureUnits::Tenths ? 0.1 : 1.0;

    TemperatureTable table;
    std::string line;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        ++table.report.rows;
        const auto f = split_csv_line(line);
        if (f.size() < col.width()) {
            reject(table.report, line_no, "expected " + std::to_string(col.width()) + " fields");
            continue;
        }
        StationRecord r;
        r.station_id = std::string(trim(f[col["station_id"]]));
        const auto date = parse_iso_date(f[col["date"]]);
        const auto lat = parse_double(f[col["lat"]]);
        const auto lon = parse_double(f[col["lon"]]);
        if (r.station_id.empty() || !date || !lat || !lon) {
            reject(table.report, line_no, "bad station id, date or coordinates");
            continue;
        }
        if (std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) {
            reject(table.report, line_no, "coordinates out of range");
            continue;
        }
        r.date = *date;
        r.latitude = *lat;
        r.longitude = *lon;

        bool ok = true;
        auto read_temp = [&](std::string_view field) -> std::optional<double> {
            if (is_missing(field)) {
                return std::nullopt;
            }
            auto v = parse_double(field);
            if (!v) {
                ok = false;
                return std::nullopt;
            }
            return *v * scale;
        };
        r.tmax = read_temp(f[col["tmax"]]);
        r.tmin = read_temp(f[col["tmin"]]);
        if (!ok) {
            reject(table.report, line_no, "unparseable temperature");
            continue;
        }
        if (r.tmax && r.tmin && *r.tmin > *r.tmax) {
            reject(table.report, line_no, "tmin > tmax");
            continue;
        }
        table.records.push_back(std::move(r));
    }
    return table;
}

TemperatureTable parse_temperature_csv(const std::filesystem::path& path, TemperatureUnits units)
{
    auto in = open_or_throw(path);
    return parse_temperature_csv(in, units);
}

void write_temperature_csv(std::ostream& out, const std::vector<StationRecord>& records)
{
    out << "station_id,date,lat,lon,tmax,tmin\n";
    for (const auto& r : records) {
        out << r.station_id << ',' << to_iso(r.date) << ',' << fmt_exact(r.latitude) << ','
            << fmt_exact(r.longitude) << ',' << (r.tmax ? fmt_exact(*r.tmax) : "") << ','
            << (r.tmin ? fmt_exact(*r.tmin) : "") << '\n';
    }
}

DailyTemperatureSeries midrange_series(const std::vector<StationRecord>& records, const std::string& station_id,
                                       int year)
{
    std::vector<const StationRecord*> refs;
    refs.reserve(records.size());
    for (const auto& r : records) {
        refs.push_back(&r);
    }
    return midrange_of(refs, station_id, year);
}

PhenologyTable parse_phenology_csv(std::istream& in)
{
    const auto header = read_header(in, "phenology");
    const HeaderIndex col(header, {"site_id", "latitude", "longitude", "year", "bloom_doy", "species", "phenophase"},
                          "phenology");
    PhenologyTable table;
    std::string line;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        ++table.report.rows;
        const auto f = split_csv_line(line);
        if (f.size() < col.width()) {
            reject(table.report, line_no, "expected " + std::to_string(col.width()) + " fields");
            continue;
        }
        PhenologyObservation o;
        o.site_id = std::string(trim(f[col["site_id"]]));
        const auto lat = parse_double(f[col["latitude"]]);
        const auto lon = parse_double(f[col["longitude"]]);
        const auto year = parse_int(f[col["year"]]);
        const auto doy = parse_int(f[col["bloom_doy"]]);
        if (o.site_id.empty() || !lat || !lon || !year || !doy) {
            reject(table.report, line_no, "unparseable field");
            continue;
        }
        if (std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0 || *doy < 1 || *doy > 366) {
            reject(table.report, line_no, "coordinates or bloom_doy out of range");
            continue;
        }
        o.latitude = *lat;
        o.longitude = *lon;
        o.year = *year;
        o.bloom_doy = *doy;
        o.species = std::string(trim(f[col["species"]]));
        o.phenophase = std::string(trim(f[col["phenophase"]]));
        table.observations.push_back(std::move(o));
    }
    return table;
}

PhenologyTable parse_phenology_csv(const std::filesystem::path& path)
{
    auto in = open_or_throw(path);
    return parse_phenology_csv(in);
}

double haversine_km(double lat1, double lon1, double lat2, double lon2)
{
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (lat2 - lat1) * rad;
    const double dlon = (lon2 - lon1) * rad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    const double a = s1 * s1 + std::cos(lat1 * rad) * std::cos(lat2 * rad) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<StationLocation> station_locations(const std::vector<StationRecord>& records)
{
    std::vector<StationLocation> out;
    std::map<std::string, bool> seen;
    for (const auto& r : records) {
        if (seen.emplace(r.station_id, true).second) {
            out.push_back({r.station_id, r.latitude, r.longitude});
        }
    }
    return out;
}

std::optional<StationMatch> match_station(const PhenologyObservation& site,
                                          const std::vector<StationLocation>& stations, double max_km)
{
    std::optional<StationMatch> best;
    for (const auto& s : stations) {
        const double d = haversine_km(site.latitude, site.longitude, s.latitude, s.longitude);
        if (d > max_km) {
            continue;
        }
        if (!best || d < best->distance_km || (d == best->distance_km && s.station_id < best->station_id)) {
            best = StationMatch{s.station_id, d};
        }
    }
    return best;
}

std::vector<AnalysisRow> build_analysis_rows(const std::vector<PhenologyObservation>& observations,
                                             const std::vector<StationRecord>& records, const JoinOptions& options,
                                             JoinReport* report)
{
    JoinReport local;
    JoinReport& rep = report ? *report : local;
    rep = JoinReport{};

    std::map<std::string, std::vector<const StationRecord*>> by_station;
    for (const auto& r : records) {
        by_station[r.station_id].push_back(&r);
    }
    const auto stations = station_locations(records);
    std::map<std::pair<std::string, int>, std::optional<RegimeEstimate>> cache;

    std::vector<AnalysisRow> rows;
    for (const auto& o : observations) {
        ++rep.observations;
        if ((!options.species.empty() && o.species != options.species) ||
            (!options.phenophase.empty() && o.phenophase != options.phenophase)) {
            ++rep.filtered_out;
            continue;
        }
        const auto match = match_station(o, stations, options.max_station_km);
        if (!match) {
            ++rep.unmatched;
            continue;
        }
        const auto key = std::make_pair(match->station_id, o.year);
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::optional<RegimeEstimate> est;
            try {
                const auto series = clip_base(midrange_of(by_station[match->station_id], match->station_id, o.year));
                est = estimate_regime(series, options.min_completeness);
            } catch (const InsufficientData&) {
            } catch (const DegenerateDesign&) {
            }
            it = cache.emplace(key, est).first;
        }
        if (!it->second) {
            ++rep.insufficient;
            continue;
        }
        rows.push_back({o.site_id, o.year, it->second->alpha_hat, it->second->beta_hat, o.bloom_doy,
                        match->station_id});
        ++rep.joined;
    }
    return rows;
}

void write_analysis_csv(std::ostream& out, const std::vector<AnalysisRow>& rows)
{
    out << "site,year,alpha,beta,bloom_doy\n";
    for (const auto& r : rows) {
        out << r.site_id << ',' << r.year << ',' << fmt_sig6(r.alpha_hat) << ',' << fmt_sig6(r.beta_hat) << ','
            << r.bloom_doy << '\n';
    }
}

} // namespace thermalsum
