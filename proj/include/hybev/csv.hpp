#pragma once

#include "hybev/trip.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace hybev {

/// Maps CSV column names onto semantic roles. Recognised roles:
/// time, trip_id, velocity, elevation, ambient_temp, battery_current,
/// battery_voltage, battery_temp, heating_power, ac_power,
/// seasonality, weather, route. Unmapped columns are ignored.
struct CsvSchema {
    std::map<std::string, std::string> columns; // column name -> role

    /// Identity schema for panels this library wrote itself.
    static CsvSchema canonical();
    static CsvSchema from_json_file(const std::filesystem::path& path);
};

/// Parses one trip from a header-bearing CSV stream. time, velocity and
/// elevation roles are mandatory; empty/NA/nan cells become gaps for the
/// imputation step. Time is rebased to seconds from trip start; a
/// non-monotone time column is a DataError.
TripSeries parse_trip_csv(std::istream& in, const CsvSchema& schema,
                          const std::string& fallback_trip_id = "");

TripSeries parse_trip_csv_file(const std::filesystem::path& path, const CsvSchema& schema,
                               const std::string& fallback_trip_id = "");

/// Loads a panel from a manifest JSON: {"trips": [{"trip_id", "file",
/// "seasonality", "weather", "route"?}, ...]}; file paths are relative
/// to the manifest.
PanelDataset load_panel(const std::filesystem::path& manifest, const CsvSchema& schema);

/// Writes one CSV per trip (canonical column names, derived channels
/// included when present) plus manifest.json into out_dir.
void save_panel(const PanelDataset& panel, const std::filesystem::path& out_dir);

} // namespace hybev
