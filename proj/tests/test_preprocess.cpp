#include "hybev/errors.hpp"
#include "hybev/preprocess.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hybev;

namespace {

TripSeries make_trip(std::size_t n, double dt = 1.0) {
    TripSeries trip;
    trip.trip_id = "t";
    trip.t.resize(n);
    trip.velocity.assign(n, 50.0);
    trip.elevation.assign(n, 500.0);
    for (std::size_t j = 0; j < n; ++j) trip.t[j] = static_cast<double>(j) * dt;
    return trip;
}

const double nan_ = std::numeric_limits<double>::quiet_NaN();

} // namespace

TEST_SUITE("preprocess") {

TEST_CASE("downsample keeps every k-th sample") {
    TripSeries trip = make_trip(100);
    const TripSeries out = downsample(trip, 10);
    CHECK(out.size() == 10);
    CHECK(out.t[1] == 10.0);
    CHECK(out.t[9] == 90.0);
}

TEST_CASE("downsample with keep_every 1 is the identity") {
    TripSeries trip = make_trip(7);
    trip.ambient_temp = Channel{1, 2, 3, 4, 5, 6, 7};
    const TripSeries out = downsample(trip, 1);
    CHECK(out.t == trip.t);
    CHECK(*out.ambient_temp == *trip.ambient_temp);
}

TEST_CASE("downsampling a short trip to fewer than 2 samples fails") {
    TripSeries trip = make_trip(5);
    CHECK_THROWS_AS(downsample(trip, 10), DegenerateTripError);
}

TEST_CASE("interior gap interpolates to the midpoint of the line") {
    const Channel out = interpolate_missing({0.0, nan_, 2.0}, {0.0, 1.0, 2.0});
    CHECK(out[1] == doctest::Approx(1.0));
}

TEST_CASE("channel without gaps is unchanged") {
    const Channel x{3.0, 1.0, 4.0};
    CHECK(interpolate_missing(x, {0, 1, 2}) == x);
}

TEST_CASE("double gap fills both points on the connecting line") {
    // by hand: y = 0 + (x-0)*(3-0)/(3-0) = x at x = 1 and x = 2
    const Channel out = interpolate_missing({0.0, nan_, nan_, 3.0}, {0, 1, 2, 3});
    CHECK(out[1] == doctest::Approx(1.0));
    CHECK(out[2] == doctest::Approx(2.0));
}

TEST_CASE("boundary gaps extend the nearest known value") {
    const Channel out = interpolate_missing({nan_, 5.0, nan_}, {0, 1, 2});
    CHECK(out[0] == 5.0);
    CHECK(out[2] == 5.0);
}

TEST_CASE("entirely missing channel cannot be imputed") {
    CHECK_THROWS_AS(interpolate_missing({nan_, nan_}, {0, 1}), ImputationError);
}

TEST_CASE("interpolation reconstructs affine channels exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int rep = 0; rep < 20; ++rep) {
        const double a = unif(rng) * 10 - 5, b = unif(rng) * 100;
        Channel t(50), truth(50), gappy(50);
        for (std::size_t j = 0; j < 50; ++j) {
            t[j] = static_cast<double>(j) + unif(rng); // irregular grid
            truth[j] = a * t[j] + b;
            gappy[j] = truth[j];
        }
        for (std::size_t j = 1; j + 1 < 50; ++j) {
            if (unif(rng) < 0.4) gappy[j] = nan_;
        }
        const Channel out = interpolate_missing(gappy, t);
        for (std::size_t j = 0; j < 50; ++j) CHECK(out[j] == doctest::Approx(truth[j]).epsilon(1e-12));
    }
}

TEST_CASE("diff_elevation differences with a zero head") {
    TripSeries trip = make_trip(3);
    trip.elevation = {500, 502, 501};
    CHECK(diff_elevation(trip) == Channel{0, 2, -1});
}

TEST_CASE("constant elevation has zero differences") {
    TripSeries trip = make_trip(4);
    CHECK(diff_elevation(trip) == Channel{0, 0, 0, 0});
}

TEST_CASE("monotone ramp differences to ones") {
    TripSeries trip = make_trip(5);
    for (std::size_t j = 0; j < 5; ++j) trip.elevation[j] = 100.0 + static_cast<double>(j);
    const Channel d = diff_elevation(trip);
    for (std::size_t j = 1; j < 5; ++j) CHECK(d[j] == 1.0);
}

TEST_CASE("instantaneous power is current times voltage") {
    CHECK(battery_power(10.0, 400.0) == 4000.0);
}

TEST_CASE("measured energy accumulates power over dt") {
    TripSeries trip = make_trip(2);
    trip.battery_current = Channel{10, 10};
    trip.battery_voltage = Channel{400, 400};
    CHECK(measured_energy(trip) == Channel{0, 4000});
}

TEST_CASE("zero current means zero energy") {
    TripSeries trip = make_trip(5);
    trip.battery_current = Channel(5, 0.0);
    trip.battery_voltage = Channel(5, 400.0);
    for (const double e : measured_energy(trip)) CHECK(e == 0.0);
}

TEST_CASE("regeneration flips the cumulative sign") {
    // by hand: p = (2000, -2000) W, e_1 = -2000 * (1 - 0) = -2000 J
    TripSeries trip = make_trip(2);
    trip.battery_current = Channel{5, -5};
    trip.battery_voltage = Channel{400, 400};
    CHECK(measured_energy(trip) == Channel{0, -2000});
}

TEST_CASE("measured energy requires both battery channels") {
    TripSeries trip = make_trip(3);
    trip.battery_current = Channel(3, 1.0);
    CHECK_THROWS_AS(measured_energy(trip), ChannelMissingError);
}

TEST_CASE("measured energy is non-decreasing under non-negative power") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int rep = 0; rep < 10; ++rep) {
        TripSeries trip = make_trip(40);
        Channel current(40), voltage(40);
        for (std::size_t j = 0; j < 40; ++j) {
            current[j] = unif(rng) * 20.0;
            voltage[j] = 300.0 + unif(rng) * 100.0;
        }
        trip.battery_current = current;
        trip.battery_voltage = voltage;
        const Channel e = measured_energy(trip);
        for (std::size_t j = 1; j < 40; ++j) CHECK(e[j] >= e[j - 1]);
    }
}

TEST_CASE("residual subtracts the physics prediction") {
    TripSeries trip = make_trip(2);
    trip.measured_energy = Channel{0, 4000};
    CHECK(compute_residual(trip, {0, 3500}) == Channel{0, 500});

    TripSeries trip3 = make_trip(3);
    trip3.measured_energy = Channel{0, 100, 300};
    CHECK(compute_residual(trip3, {0, 150, 250}) == Channel{0, -50, 50});
}

TEST_CASE("residual against the measurement itself is zero") {
    TripSeries trip = make_trip(4);
    trip.battery_current = Channel{1, 2, 3, 4};
    trip.battery_voltage = Channel(4, 350.0);
    trip.measured_energy = measured_energy(trip);
    for (const double r : compute_residual(trip, *trip.measured_energy)) CHECK(r == 0.0);
}

TEST_CASE("residual length mismatch is an alignment error") {
    TripSeries trip = make_trip(3);
    trip.measured_energy = Channel{0, 1, 2};
    CHECK_THROWS_AS(compute_residual(trip, {0, 1}), AlignmentError);
}

TEST_CASE("moving trip with positive power has no charging pattern") {
    TripSeries trip = make_trip(20);
    trip.battery_current = Channel(20, 10.0);
    trip.battery_voltage = Channel(20, 400.0);
    CHECK(detect_charging(trip).empty());
}

TEST_CASE("standing still while heavily charging is detected") {
    TripSeries trip = make_trip(30);
    Channel current(30, 10.0);
    for (std::size_t j = 10; j < 20; ++j) {
        trip.velocity[j] = 0.0;
        current[j] = -60.0; // about -21 kW at 350 V
    }
    trip.battery_current = current;
    trip.battery_voltage = Channel(30, 350.0);

    const auto ranges = detect_charging(trip);
    REQUIRE(ranges.size() == 1);
    CHECK(ranges[0] == IndexRange{10, 19});

    // independent scan over the same rule
    for (std::size_t j = 0; j < 30; ++j) {
        const bool inside = j >= 10 && j <= 19;
        const bool flagged = trip.velocity[j] <= 0.1 &&
                             battery_power(current[j], 350.0) <= -5000.0;
        CHECK(inside == flagged);
    }
}

TEST_CASE("parked and idle is not charging") {
    TripSeries trip = make_trip(10);
    for (auto& v : trip.velocity) v = 0.0;
    trip.battery_current = Channel(10, -0.5); // ~ -175 W standby
    trip.battery_voltage = Channel(10, 350.0);
    CHECK(detect_charging(trip).empty());
}

TEST_CASE("downsample and diff_elevation commute on retained indices") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-2, 2);
    TripSeries trip = make_trip(60);
    for (auto& e : trip.elevation) e += unif(rng);

    TripSeries decimated = downsample(trip, 5);
    const Channel via_trip = diff_elevation(decimated);

    Channel manual;
    for (std::size_t j = 0; j < 60; j += 5) manual.push_back(trip.elevation[j]);
    TripSeries check = make_trip(manual.size(), 5.0);
    check.elevation = manual;
    CHECK(via_trip == diff_elevation(check));
}

} // TEST_SUITE
