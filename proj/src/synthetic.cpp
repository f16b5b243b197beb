#include "hybev/synthetic.hpp"

#include "hybev/errors.hpp"
#include "hybev/physics.hpp"
#include "hybev/preprocess.hpp"
#include "hybev/rand.hpp"

#include <algorithm>
#include <cmath>

namespace hybev {

double synthetic_time_shape(double tau) {
    return tau + 0.25 * std::sin(2.0 * M_PI * tau);
}

double synthetic_temp_shape(double temp_c) {
    const double z = (temp_c - 18.0) / 15.0;
    return z * z;
}

std::pair<PanelDataset, SyntheticTruth> generate_synthetic(const SyntheticConfig& config,
                                                           const VehicleSpec& spec) {
    if (config.n_trips < 1 || config.samples_per_trip < 2) {
        throw UsageError("synthetic config needs n_trips >= 1 and samples_per_trip >= 2");
    }
    if (config.sigma_b < 0 || config.sigma_eps < 0) {
        throw UsageError("synthetic SDs must be non-negative");
    }

    static const char* kWeather[] = {"cloudy", "rainy", "sunny"};
    static const char* kRoute[] = {"city", "highway", "rural"};

    PanelDataset panel;
    SyntheticTruth truth;
    const std::size_t n = config.samples_per_trip;
    const double horizon = static_cast<double>(n - 1) * config.dt_s;

    for (std::size_t i = 0; i < config.n_trips; ++i) {
        Rng rng = make_rng(mix_seed(config.seed, i));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        TripSeries trip;
        trip.trip_id = "trip" + std::string(i < 10 ? "0" : "") + std::to_string(i);
        trip.seasonality = (i % 2 == 0) ? "summer" : "winter";
        trip.weather = kWeather[static_cast<std::size_t>(unif(rng) * 3.0) % 3];
        trip.route = kRoute[i % 3];

        trip.t.resize(n);
        for (std::size_t j = 0; j < n; ++j) trip.t[j] = static_cast<double>(j) * config.dt_s;

        // speed: base cruise plus two slow oscillations, ramped from standstill
        const double base = 30.0 + 40.0 * unif(rng);
        const double a1 = 8.0 + 10.0 * unif(rng), p1 = 20.0 + 30.0 * unif(rng);
        const double a2 = 4.0 + 6.0 * unif(rng), p2 = 5.0 + 10.0 * unif(rng);
        const double ph1 = 2.0 * M_PI * unif(rng), ph2 = 2.0 * M_PI * unif(rng);
        trip.velocity.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double ramp = std::min(1.0, static_cast<double>(j) / 5.0);
            const double v = base + a1 * std::sin(2.0 * M_PI * j / p1 + ph1) +
                             a2 * std::sin(2.0 * M_PI * j / p2 + ph2) + 1.5 * gauss(rng);
            trip.velocity[j] = std::clamp(ramp * v, 0.0, 130.0);
        }

        // elevation: slow drift plus a gentle random walk
        trip.elevation.resize(n);
        double elev = 400.0 + 200.0 * unif(rng);
        const double slope_period = 40.0 + 40.0 * unif(rng);
        const double slope_phase = 2.0 * M_PI * unif(rng);
        for (std::size_t j = 0; j < n; ++j) {
            trip.elevation[j] = elev;
            elev += 0.6 * std::sin(2.0 * M_PI * j / slope_period + slope_phase) + 0.2 * gauss(rng);
        }

        // ambient temperature: seasonal base with a slow within-trip drift
        const double temp_base = trip.seasonality == "winter" ? -5.0 + 13.0 * unif(rng)
                                                              : 12.0 + 18.0 * unif(rng);
        const double temp_phase = 2.0 * M_PI * unif(rng);
        Channel temp(n);
        for (std::size_t j = 0; j < n; ++j) {
            temp[j] = temp_base + 2.0 * std::sin(2.0 * M_PI * j / static_cast<double>(n) + temp_phase) +
                      0.1 * gauss(rng);
        }
        trip.ambient_temp = temp;

        const SimulationResult sim = simulate_trip(spec, trip.t, trip.velocity, trip.elevation, 0.9);

        // planted residual: zero at the first sample (cumulative channels
        // start at zero), full formula afterwards
        const double b_i = config.sigma_b * gauss(rng);
        Channel s_time(n, 0.0), s_temp(n, 0.0), eps(n, 0.0), resid(n, 0.0);
        for (std::size_t j = 1; j < n; ++j) {
            s_time[j] = config.amp_time * synthetic_time_shape(trip.t[j] / horizon);
            s_temp[j] = config.amp_temp * synthetic_temp_shape(temp[j]);
            eps[j] = config.sigma_eps * gauss(rng);
            resid[j] = s_time[j] + s_temp[j] + b_i + eps[j];
        }

        // voltage/current channels that integrate back to the true energy
        const double pack_v = 355.0 + 10.0 * unif(rng);
        Channel current(n, 0.0), voltage(n, pack_v);
        double prev_true = 0.0;
        for (std::size_t j = 1; j < n; ++j) {
            const double e_true = sim.predicted_energy[j] + resid[j];
            const double dt = trip.t[j] - trip.t[j - 1];
            current[j] = (e_true - prev_true) / (pack_v * dt);
            prev_true = e_true;
        }
        trip.battery_current = std::move(current);
        trip.battery_voltage = std::move(voltage);

        truth.trip_intercept[trip.trip_id] = b_i;
        truth.smooth_time[trip.trip_id] = std::move(s_time);
        truth.smooth_temp[trip.trip_id] = std::move(s_temp);
        truth.noise[trip.trip_id] = std::move(eps);
        truth.residual[trip.trip_id] = std::move(resid);

        panel.trips.push_back(std::move(trip));
    }
    return {std::move(panel), std::move(truth)};
}

} // namespace hybev
