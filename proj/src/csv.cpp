#include "hybev/csv.hpp"

#include "hybev/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace hybev {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and CR
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "nan" || s == "NaN" || s == "NAN";
}

double parse_number(const std::string& s, const std::string& column, std::size_t row) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw SchemaError("column '" + column + "' row " + std::to_string(row) +
                          ": cannot parse '" + s + "' as a number");
    }
    return v;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

CsvSchema CsvSchema::canonical() {
    CsvSchema s;
    for (const char* role :
         {"time", "trip_id", "velocity", "elevation", "ambient_temp", "battery_current",
          "battery_voltage", "battery_temp", "heating_power", "ac_power", "seasonality",
          "weather", "route"}) {
        s.columns[role] = role;
    }
    return s;
}

CsvSchema CsvSchema::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("schema file " + path.string() + ": " + e.what());
    }
    CsvSchema s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        s.columns[it.key()] = it.value().get<std::string>();
    }
    return s;
}

TripSeries parse_trip_csv(std::istream& in, const CsvSchema& schema,
                          const std::string& fallback_trip_id) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty CSV input, header row required");
    const auto header = split_csv_line(line);

    // role -> column index
    std::map<std::string, std::size_t> role_col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto it = schema.columns.find(header[c]);
        if (it != schema.columns.end()) role_col[it->second] = c;
    }
    for (const char* mandatory : {"time", "velocity", "elevation"}) {
        if (!role_col.count(mandatory)) {
            throw SchemaError(std::string("mandatory column for role '") + mandatory +
                              "' not found in CSV header");
        }
    }

    TripSeries trip;
    trip.trip_id = fallback_trip_id;

    std::map<std::string, Channel> numeric;
    for (const char* role : {"time", "velocity", "elevation", "ambient_temp", "battery_current",
                             "battery_voltage", "battery_temp", "heating_power", "ac_power"}) {
        if (role_col.count(role)) numeric[role] = {};
    }

    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < header.size()) {
            throw SchemaError("row " + std::to_string(row) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header.size()));
        }
        for (auto& [role, chan] : numeric) {
            const std::string& cell = cells[role_col[role]];
            chan.push_back(is_missing(cell) ? kNaN : parse_number(cell, role, row));
        }
        auto take_categorical = [&](const char* role, std::string& dst) {
            if (dst.empty() && role_col.count(role)) {
                const std::string& cell = cells[role_col[role]];
                if (!is_missing(cell)) dst = cell;
            }
        };
        take_categorical("seasonality", trip.seasonality);
        take_categorical("weather", trip.weather);
        if (!trip.route && role_col.count("route")) {
            const std::string& cell = cells[role_col["route"]];
            if (!is_missing(cell)) trip.route = cell;
        }
        take_categorical("trip_id", trip.trip_id);
    }
    if (numeric["time"].empty()) throw DataError("CSV has a header but no data rows");

    trip.t = std::move(numeric["time"]);
    for (std::size_t j = 0; j < trip.t.size(); ++j) {
        if (std::isnan(trip.t[j])) {
            throw DataError("time column has a missing value at row " + std::to_string(j + 1));
        }
        if (j > 0 && !(trip.t[j] > trip.t[j - 1])) {
            throw DataError("time not strictly increasing at row " + std::to_string(j + 1));
        }
    }
    // rebase to seconds from trip start
    const double t0 = trip.t.front();
    for (double& v : trip.t) v -= t0;

    trip.velocity = std::move(numeric["velocity"]);
    trip.elevation = std::move(numeric["elevation"]);
    auto move_opt = [&](const char* role, std::optional<Channel>& dst) {
        auto it = numeric.find(role);
        if (it != numeric.end()) dst = std::move(it->second);
    };
    move_opt("ambient_temp", trip.ambient_temp);
    move_opt("battery_current", trip.battery_current);
    move_opt("battery_voltage", trip.battery_voltage);
    move_opt("battery_temp", trip.battery_temp);
    move_opt("heating_power", trip.heating_power);
    move_opt("ac_power", trip.ac_power);
    return trip;
}

TripSeries parse_trip_csv_file(const std::filesystem::path& path, const CsvSchema& schema,
                               const std::string& fallback_trip_id) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trip file " + path.string());
    return parse_trip_csv(in, schema, fallback_trip_id);
}

PanelDataset load_panel(const std::filesystem::path& manifest, const CsvSchema& schema) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open manifest " + manifest.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("manifest " + manifest.string() + ": " + e.what());
    }
    if (!j.contains("trips") || !j["trips"].is_array() || j["trips"].empty()) {
        throw DataError("manifest " + manifest.string() + " lists no trips");
    }
    PanelDataset panel;
    const auto base = manifest.parent_path();
    for (const auto& entry : j["trips"]) {
        const std::string id = entry.at("trip_id").get<std::string>();
        const std::filesystem::path file = base / entry.at("file").get<std::string>();
        TripSeries trip = parse_trip_csv_file(file, schema, id);
        if (entry.contains("seasonality")) trip.seasonality = entry["seasonality"].get<std::string>();
        if (entry.contains("weather")) trip.weather = entry["weather"].get<std::string>();
        if (entry.contains("route")) trip.route = entry["route"].get<std::string>();
        panel.trips.push_back(std::move(trip));
    }
    panel.validate();
    return panel;
}

namespace {

void append_column(std::vector<std::pair<std::string, const Channel*>>& cols, const char* name,
                   const std::optional<Channel>& c) {
    if (c) cols.emplace_back(name, &*c);
}

} // namespace

void save_panel(const PanelDataset& panel, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    json manifest;
    manifest["trips"] = json::array();
    for (const auto& trip : panel.trips) {
        const std::string file = trip.trip_id + ".csv";
        std::ofstream out(out_dir / file);
        if (!out) throw IoError("cannot write " + (out_dir / file).string());
        out.precision(17);

        std::vector<std::pair<std::string, const Channel*>> cols;
        cols.emplace_back("time", &trip.t);
        cols.emplace_back("velocity", &trip.velocity);
        cols.emplace_back("elevation", &trip.elevation);
        append_column(cols, "ambient_temp", trip.ambient_temp);
        append_column(cols, "battery_current", trip.battery_current);
        append_column(cols, "battery_voltage", trip.battery_voltage);
        append_column(cols, "battery_temp", trip.battery_temp);
        append_column(cols, "heating_power", trip.heating_power);
        append_column(cols, "ac_power", trip.ac_power);
        append_column(cols, "diff_elevation", trip.diff_elevation);
        append_column(cols, "measured_energy", trip.measured_energy);
        append_column(cols, "phys_pred", trip.phys_pred);
        append_column(cols, "residual_phy", trip.residual_phy);

        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? "," : "") << cols[c].first;
        }
        out << "\n";
        for (std::size_t j = 0; j < trip.size(); ++j) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const double v = (*cols[c].second)[j];
                if (c) out << ",";
                if (std::isnan(v)) {
                    // leave the cell empty: round-trips as a gap
                } else {
                    out << v;
                }
            }
            out << "\n";
        }

        json entry;
        entry["trip_id"] = trip.trip_id;
        entry["file"] = file;
        entry["seasonality"] = trip.seasonality;
        entry["weather"] = trip.weather;
        if (trip.route) entry["route"] = *trip.route;
        manifest["trips"].push_back(entry);
    }
    std::ofstream mout(out_dir / "manifest.json");
    if (!mout) throw IoError("cannot write " + (out_dir / "manifest.json").string());
    mout << manifest.dump(2) << "\n";
}

} // namespace hybev
