#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hybev {

using Channel = std::vector<double>;

/// One trip of aligned time-series channels plus categorical trip
/// attributes. Trips are the subject unit of the panel: observations
/// within a trip are correlated, trips are independent.
///
/// Channels are immutable after preprocessing; derived channels stay
/// unset until the corresponding operation has produced them.
struct TripSeries {
    std::string trip_id;

    Channel t;         // seconds from trip start, strictly increasing
    Channel velocity;  // km/h
    Channel elevation; // m

    std::optional<Channel> ambient_temp;    // degC
    std::optional<Channel> battery_current; // A
    std::optional<Channel> battery_voltage; // V
    std::optional<Channel> battery_temp;    // degC, ingested only
    std::optional<Channel> heating_power;   // kW, ingested only
    std::optional<Channel> ac_power;        // kW, ingested only

    std::string seasonality; // "summer" / "winter"
    std::string weather;
    std::optional<std::string> route;

    // derived
    std::optional<Channel> diff_elevation;  // m per sample
    std::optional<Channel> measured_energy; // cumulative J
    std::optional<Channel> phys_pred;       // cumulative J
    std::optional<Channel> residual_phy;    // cumulative J

    std::size_t size() const { return t.size(); }

    /// Throws DataError when t is not strictly increasing or a present
    /// channel disagrees with t in length.
    void validate() const;
};

/// Numeric channel lookup by canonical name; nullptr when the channel is
/// absent. Categorical attributes are not reachable through this.
const Channel* channel_of(const TripSeries& trip, std::string_view name);

/// Per-trip categorical attribute lookup ("seasonality", "weather",
/// "route"); nullptr for unknown names or unset route.
const std::string* categorical_of(const TripSeries& trip, std::string_view name);

bool is_categorical_feature(std::string_view name);

struct PanelDataset {
    std::vector<TripSeries> trips;

    std::size_t n_trips() const { return trips.size(); }
    const TripSeries* find(const std::string& trip_id) const;
    std::vector<std::string> trip_ids() const;

    /// Throws DataError on duplicate trip ids or an empty panel.
    void validate() const;
};

} // namespace hybev
