#include "hybev/trip.hpp"

#include "hybev/errors.hpp"

#include <set>

namespace hybev {

namespace {

void check_len(const std::optional<Channel>& c, std::size_t n, const char* name,
               const std::string& trip_id) {
    if (c && c->size() != n) {
        throw DataError("trip '" + trip_id + "': channel " + name +
                        " has length " + std::to_string(c->size()) +
                        ", expected " + std::to_string(n));
    }
}

} // namespace

void TripSeries::validate() const {
    const std::size_t n = t.size();
    for (std::size_t j = 1; j < n; ++j) {
        if (!(t[j] > t[j - 1])) {
            throw DataError("trip '" + trip_id + "': time not strictly increasing at index " +
                            std::to_string(j));
        }
    }
    if (velocity.size() != n || elevation.size() != n) {
        throw DataError("trip '" + trip_id + "': velocity/elevation not aligned with time");
    }
    check_len(ambient_temp, n, "ambient_temp", trip_id);
    check_len(battery_current, n, "battery_current", trip_id);
    check_len(battery_voltage, n, "battery_voltage", trip_id);
    check_len(battery_temp, n, "battery_temp", trip_id);
    check_len(heating_power, n, "heating_power", trip_id);
    check_len(ac_power, n, "ac_power", trip_id);
    check_len(diff_elevation, n, "diff_elevation", trip_id);
    check_len(measured_energy, n, "measured_energy", trip_id);
    check_len(phys_pred, n, "phys_pred", trip_id);
    check_len(residual_phy, n, "residual_phy", trip_id);
}

const Channel* channel_of(const TripSeries& trip, std::string_view name) {
    if (name == "time" || name == "t") return &trip.t;
    if (name == "velocity") return &trip.velocity;
    if (name == "elevation") return &trip.elevation;
    auto opt = [](const std::optional<Channel>& c) { return c ? &*c : nullptr; };
    if (name == "ambient_temp") return opt(trip.ambient_temp);
    if (name == "battery_current") return opt(trip.battery_current);
    if (name == "battery_voltage") return opt(trip.battery_voltage);
    if (name == "battery_temp") return opt(trip.battery_temp);
    if (name == "heating_power") return opt(trip.heating_power);
    if (name == "ac_power") return opt(trip.ac_power);
    if (name == "diff_elevation") return opt(trip.diff_elevation);
    if (name == "measured_energy") return opt(trip.measured_energy);
    if (name == "phys_pred") return opt(trip.phys_pred);
    if (name == "residual_phy") return opt(trip.residual_phy);
    return nullptr;
}

const std::string* categorical_of(const TripSeries& trip, std::string_view name) {
    if (name == "seasonality") return &trip.seasonality;
    if (name == "weather") return &trip.weather;
    if (name == "route") return trip.route ? &*trip.route : nullptr;
    return nullptr;
}

bool is_categorical_feature(std::string_view name) {
    return name == "seasonality" || name == "weather" || name == "route";
}

const TripSeries* PanelDataset::find(const std::string& trip_id) const {
    for (const auto& trip : trips) {
        if (trip.trip_id == trip_id) return &trip;
    }
    return nullptr;
}

std::vector<std::string> PanelDataset::trip_ids() const {
    std::vector<std::string> ids;
    ids.reserve(trips.size());
    for (const auto& trip : trips) ids.push_back(trip.trip_id);
    return ids;
}

void PanelDataset::validate() const {
    if (trips.empty()) throw DataError("panel is empty");
    std::set<std::string> seen;
    for (const auto& trip : trips) {
        trip.validate();
        if (!seen.insert(trip.trip_id).second) {
            throw DataError("duplicate trip id '" + trip.trip_id + "'");
        }
    }
}

} // namespace hybev
