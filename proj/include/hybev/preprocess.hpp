#pragma once

#include "hybev/trip.hpp"

#include <cstddef>
#include <vector>

namespace hybev {

/// Instantaneous battery power in W from current (A) and voltage (V).
inline double battery_power(double current_a, double voltage_v) {
    return current_a * voltage_v;
}

/// Keep samples 0, k, 2k, ...; every present channel is decimated
/// identically. Throws DegenerateTripError when fewer than 2 samples
/// survive.
TripSeries downsample(const TripSeries& trip, std::size_t keep_every);

/// Fill NaN gaps by linear interpolation between the nearest known
/// neighbours; boundary gaps take the nearest known value. Throws
/// ImputationError when the channel has no known value at all.
Channel interpolate_missing(const Channel& x, const Channel& t);

/// Linear-interpolates every numeric channel of the trip in place.
void interpolate_trip(TripSeries& trip);

/// out[0] = 0, out[j] = elevation[j] - elevation[j-1].
Channel diff_elevation(const TripSeries& trip);

/// Cumulative energy in J from the battery current/voltage channels:
/// e[j] = sum_{k<=j} I[k]*V[k]*(t[k]-t[k-1]) with dt_0 = 0.
Channel measured_energy(const TripSeries& trip);

/// residual[j] = measured_energy[j] - phys_pred[j].
Channel compute_residual(const TripSeries& trip, const Channel& phys_pred);

struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0; // inclusive

    bool operator==(const IndexRange&) const = default;
};

/// Maximal index ranges where the vehicle stands still (velocity <=
/// v_eps) while the battery absorbs heavy charge (power <= -p_threshold).
/// Trips with a non-empty result carry a charging pattern and get
/// discarded by ingestion.
std::vector<IndexRange> detect_charging(const TripSeries& trip, double v_eps_kmh = 0.1,
                                        double p_threshold_w = 5000.0);

/// Sets diff_elevation and, when current/voltage are present,
/// measured_energy on the trip.
void derive_channels(TripSeries& trip);

/// Sets phys_pred and residual_phy (requires measured_energy).
void attach_physics(TripSeries& trip, Channel phys_pred);

} // namespace hybev
