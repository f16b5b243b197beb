#include "hybev/evaluate.hpp"
#include "hybev/lmm.hpp"
#include "hybev/physics.hpp"
#include "hybev/preprocess.hpp"
#include "hybev/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace hybev;

TEST_SUITE("synthetic") {

TEST_CASE("silent generator reproduces the physics energy exactly") {
    SyntheticConfig config;
    config.n_trips = 3;
    config.samples_per_trip = 50;
    config.sigma_b = 0;
    config.sigma_eps = 0;
    config.amp_time = 0;
    config.amp_temp = 0;
    auto [panel, truth] = generate_synthetic(config);
    const VehicleSpec spec;
    for (auto& trip : panel.trips) {
        derive_channels(trip);
        const SimulationResult sim =
            simulate_trip(spec, trip.t, trip.velocity, trip.elevation, 0.9);
        for (std::size_t j = 0; j < trip.size(); ++j) {
            CHECK((*trip.measured_energy)[j] ==
                  doctest::Approx(sim.predicted_energy[j]).epsilon(1e-9));
        }
    }
}

TEST_CASE("a fixed seed regenerates the identical panel") {
    SyntheticConfig config;
    config.n_trips = 4;
    config.samples_per_trip = 30;
    config.seed = 11;
    auto [a, ta] = generate_synthetic(config);
    auto [b, tb] = generate_synthetic(config);
    REQUIRE(a.trips.size() == b.trips.size());
    for (std::size_t i = 0; i < a.trips.size(); ++i) {
        CHECK(a.trips[i].velocity == b.trips[i].velocity);
        CHECK(a.trips[i].elevation == b.trips[i].elevation);
        CHECK(*a.trips[i].battery_current == *b.trips[i].battery_current);
        CHECK(a.trips[i].weather == b.trips[i].weather);
    }
    CHECK(ta.trip_intercept == tb.trip_intercept);
}

TEST_CASE("derived residual matches the planted truth") {
    SyntheticConfig config;
    config.n_trips = 5;
    config.samples_per_trip = 60;
    config.seed = 3;
    auto [panel, truth] = generate_synthetic(config);
    prepare_panel(panel, VehicleSpec{}, 0.9);
    for (const auto& trip : panel.trips) {
        const Channel& expected = truth.residual.at(trip.trip_id);
        for (std::size_t j = 0; j < trip.size(); ++j) {
            CHECK((*trip.residual_phy)[j] == doctest::Approx(expected[j]).epsilon(1e-6));
        }
    }
}

TEST_CASE("empirical icc matches the generator decomposition") {
    SyntheticConfig config;
    config.n_trips = 50;
    config.samples_per_trip = 100;
    config.sigma_b = 4.0e5;
    config.sigma_eps = 3.0e5;
    config.amp_time = 1.0e6;
    config.amp_temp = 0; // keep the smooth effect purely within-trip
    config.seed = 21;
    auto [panel, truth] = generate_synthetic(config);
    prepare_panel(panel, VehicleSpec{}, 0.9);

    // within-trip variance of the shared time effect over the grid
    const Channel& s = truth.smooth_time.begin()->second;
    double mean = 0;
    for (const double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    double smooth_var = 0;
    for (const double v : s) smooth_var += (v - mean) * (v - mean);
    smooth_var /= static_cast<double>(s.size());

    const double expected = config.sigma_b * config.sigma_b /
                            (config.sigma_b * config.sigma_b +
                             config.sigma_eps * config.sigma_eps + smooth_var);
    const double estimated = icc(fit_null_lmm(panel, "residual_phy", "trip_id"));
    CHECK(std::abs(estimated - expected) < 0.05);
}

TEST_CASE("invalid configs are rejected") {
    SyntheticConfig config;
    config.n_trips = 0;
    CHECK_THROWS(generate_synthetic(config));
    config = SyntheticConfig{};
    config.sigma_b = -1;
    CHECK_THROWS(generate_synthetic(config));
}

} // TEST_SUITE
