#pragma once

#include "hybev/trip.hpp"
#include "hybev/vehicle.hpp"

#include <cstdint>
#include <map>
#include <utility>

namespace hybev {

/// Synthetic panel with known ground truth. Trips get smooth random
/// speed/elevation/temperature profiles; the physics chain provides the
/// baseline energy and the true energy adds smooth effects of time and
/// temperature, a trip intercept and noise on top of it. The stand-in
/// for the real fleet data, which cannot ship with the code.
struct SyntheticConfig {
    std::size_t n_trips = 50;
    std::size_t samples_per_trip = 200;
    double dt_s = 10.0;
    double sigma_b = 2.0e5;   // trip-intercept SD, J
    double sigma_eps = 5.0e4; // per-sample noise SD, J
    double amp_time = 2.5e6;  // J at the end of the reference horizon
    double amp_temp = 5.0e5;  // J per unit of the temperature shape
    std::uint64_t seed = 0;
};

struct SyntheticTruth {
    std::map<std::string, double> trip_intercept;
    std::map<std::string, Channel> smooth_time;
    std::map<std::string, Channel> smooth_temp;
    std::map<std::string, Channel> noise;
    std::map<std::string, Channel> residual; // total planted residual
};

/// Shape of the planted time effect on [0, 1]; vanishes at 0 so the
/// cumulative residual starts at zero like every cumulative channel.
double synthetic_time_shape(double tau);

/// Shape of the planted temperature effect (HVAC-like bowl around 18 C).
double synthetic_temp_shape(double temp_c);

std::pair<PanelDataset, SyntheticTruth> generate_synthetic(const SyntheticConfig& config,
                                                           const VehicleSpec& spec = {});

} // namespace hybev
