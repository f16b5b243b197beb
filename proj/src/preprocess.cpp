#include "hybev/preprocess.hpp"

#include "hybev/errors.hpp"

#include <cmath>
#include <optional>

namespace hybev {

namespace {

Channel decimate(const Channel& x, std::size_t k) {
    Channel out;
    out.reserve(x.size() / k + 1);
    for (std::size_t j = 0; j < x.size(); j += k) out.push_back(x[j]);
    return out;
}

void decimate_opt(std::optional<Channel>& c, std::size_t k) {
    if (c) c = decimate(*c, k);
}

} // namespace

TripSeries downsample(const TripSeries& trip, std::size_t keep_every) {
    if (keep_every < 1) throw UsageError("keep_every must be >= 1");
    TripSeries out = trip;
    if (keep_every == 1) return out;
    out.t = decimate(trip.t, keep_every);
    if (out.t.size() < 2) {
        throw DegenerateTripError("trip '" + trip.trip_id + "': only " +
                                  std::to_string(out.t.size()) +
                                  " samples left after downsampling");
    }
    out.velocity = decimate(trip.velocity, keep_every);
    out.elevation = decimate(trip.elevation, keep_every);
    decimate_opt(out.ambient_temp, keep_every);
    decimate_opt(out.battery_current, keep_every);
    decimate_opt(out.battery_voltage, keep_every);
    decimate_opt(out.battery_temp, keep_every);
    decimate_opt(out.heating_power, keep_every);
    decimate_opt(out.ac_power, keep_every);
    decimate_opt(out.diff_elevation, keep_every);
    decimate_opt(out.measured_energy, keep_every);
    decimate_opt(out.phys_pred, keep_every);
    decimate_opt(out.residual_phy, keep_every);
    return out;
}

Channel interpolate_missing(const Channel& x, const Channel& t) {
    if (x.size() != t.size()) throw AlignmentError("channel and time differ in length");
    Channel out = x;
    const std::size_t n = x.size();

    std::size_t first_known = n;
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isnan(x[j])) {
            first_known = j;
            break;
        }
    }
    if (first_known == n) throw ImputationError("channel entirely missing");

    // nearest-known extension at the boundaries
    for (std::size_t j = 0; j < first_known; ++j) out[j] = x[first_known];
    std::size_t last_known = n - 1;
    while (std::isnan(x[last_known])) --last_known;
    for (std::size_t j = last_known + 1; j < n; ++j) out[j] = x[last_known];

    std::size_t left = first_known;
    for (std::size_t j = first_known + 1; j <= last_known; ++j) {
        if (!std::isnan(x[j])) {
            left = j;
            continue;
        }
        std::size_t right = j + 1;
        while (std::isnan(x[right])) ++right;
        for (std::size_t g = j; g < right; ++g) {
            const double w = (t[g] - t[left]) / (t[right] - t[left]);
            out[g] = x[left] + w * (x[right] - x[left]);
        }
        j = right;
        left = right;
    }
    return out;
}

void interpolate_trip(TripSeries& trip) {
    auto fix = [&](Channel& c) { c = interpolate_missing(c, trip.t); };
    fix(trip.velocity);
    fix(trip.elevation);
    auto fix_opt = [&](std::optional<Channel>& c) {
        if (c) *c = interpolate_missing(*c, trip.t);
    };
    fix_opt(trip.ambient_temp);
    fix_opt(trip.battery_current);
    fix_opt(trip.battery_voltage);
    fix_opt(trip.battery_temp);
    fix_opt(trip.heating_power);
    fix_opt(trip.ac_power);
}

Channel diff_elevation(const TripSeries& trip) {
    const Channel& e = trip.elevation;
    if (e.empty()) throw ChannelMissingError("trip '" + trip.trip_id + "': elevation missing");
    Channel out(e.size(), 0.0);
    for (std::size_t j = 1; j < e.size(); ++j) out[j] = e[j] - e[j - 1];
    return out;
}

Channel measured_energy(const TripSeries& trip) {
    if (!trip.battery_current || !trip.battery_voltage) {
        throw ChannelMissingError("trip '" + trip.trip_id +
                                  "': battery current/voltage required for measured energy");
    }
    const Channel& current = *trip.battery_current;
    const Channel& voltage = *trip.battery_voltage;
    Channel out(trip.t.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double dt = j == 0 ? 0.0 : trip.t[j] - trip.t[j - 1];
        acc += battery_power(current[j], voltage[j]) * dt;
        out[j] = acc;
    }
    return out;
}

Channel compute_residual(const TripSeries& trip, const Channel& phys_pred) {
    if (!trip.measured_energy) {
        throw ChannelMissingError("trip '" + trip.trip_id + "': measured_energy missing");
    }
    const Channel& measured = *trip.measured_energy;
    if (measured.size() != phys_pred.size()) {
        throw AlignmentError("trip '" + trip.trip_id + "': phys_pred length " +
                             std::to_string(phys_pred.size()) + " vs measured " +
                             std::to_string(measured.size()));
    }
    Channel out(measured.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = measured[j] - phys_pred[j];
    return out;
}

std::vector<IndexRange> detect_charging(const TripSeries& trip, double v_eps_kmh,
                                        double p_threshold_w) {
    if (!trip.battery_current || !trip.battery_voltage) {
        throw ChannelMissingError("trip '" + trip.trip_id +
                                  "': battery current/voltage required to derive power");
    }
    const Channel& current = *trip.battery_current;
    const Channel& voltage = *trip.battery_voltage;
    std::vector<IndexRange> ranges;
    std::size_t start = 0;
    bool open = false;
    for (std::size_t j = 0; j < trip.t.size(); ++j) {
        const bool standing = trip.velocity[j] <= v_eps_kmh;
        const bool heavy_charge = battery_power(current[j], voltage[j]) <= -p_threshold_w;
        if (standing && heavy_charge) {
            if (!open) {
                start = j;
                open = true;
            }
        } else if (open) {
            ranges.push_back({start, j - 1});
            open = false;
        }
    }
    if (open) ranges.push_back({start, trip.t.size() - 1});
    return ranges;
}

void derive_channels(TripSeries& trip) {
    trip.diff_elevation = diff_elevation(trip);
    if (trip.battery_current && trip.battery_voltage) {
        trip.measured_energy = measured_energy(trip);
    }
}

void attach_physics(TripSeries& trip, Channel phys_pred) {
    trip.residual_phy = compute_residual(trip, phys_pred);
    trip.phys_pred = std::move(phys_pred);
}

} // namespace hybev
