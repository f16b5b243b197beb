#include "hybev/errors.hpp"
#include "hybev/physics.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace hybev;

namespace {

VehicleSpec table_spec() {
    return VehicleSpec{}; // defaults follow the published table
}

// sawtooth speed profile in km/h
Channel sawtooth(std::size_t n) {
    Channel v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = 20.0 + 15.0 * static_cast<double>(j % 4);
    return v;
}

} // namespace

TEST_SUITE("physics") {

TEST_CASE("zero velocity draws zero tractive power") {
    CHECK(tractive_power(table_spec(), 0.0, 0.0, 0.0) == 0.0);
    CHECK(tractive_power(table_spec(), 0.0, 2.0, 0.05) == 0.0);
}

TEST_CASE("flat constant-speed power reduces to drag plus rolling") {
    const VehicleSpec spec = table_spec();
    const double v = 13.0;
    const double expected = v * (0.5 * kAirDensity * spec.drag_coefficient *
                                     spec.frontal_area_m2 * v * v +
                                 spec.rolling_resistance_coeff * spec.mass_kg * kGravity);
    CHECK(tractive_power(spec, v, 0.0, 0.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("table-spec power at 20 m/s matches the hand-evaluated formula") {
    // 20 * (0.5*1.2041*0.22*2.38*400 + 0.01*1345*9.81) evaluated separately
    CHECK(tractive_power(table_spec(), 20.0, 0.0, 0.0) ==
          doctest::Approx(5160.75704).epsilon(1e-12));
}

TEST_CASE("traction divides by the drivetrain efficiency") {
    CHECK(wheel_to_battery(table_spec(), 10000.0) ==
          doctest::Approx(11111.111111111111).epsilon(1e-12));
}

TEST_CASE("braking returns eta times recuperation of the wheel power") {
    VehicleSpec spec = table_spec();
    spec.drivetrain_efficiency = 0.9;
    spec.recuperation_fraction = 0.5;
    CHECK(wheel_to_battery(spec, -10000.0) == doctest::Approx(-4500.0));
}

TEST_CASE("zero recuperation maps all braking power to zero") {
    VehicleSpec spec = table_spec();
    spec.recuperation_fraction = 0.0;
    CHECK(wheel_to_battery(spec, -12345.0) == 0.0);
}

TEST_CASE("open circuit keeps the state of charge") {
    const VehicleSpec spec = table_spec();
    const BatteryState s = battery_step(0.7, spec, 0.0, 1.0);
    CHECK(s.current_a == 0.0);
    const double voc = 96.0 * (3.3 + 0.7 * 0.8);
    CHECK(s.voltage_v == doctest::Approx(voc).epsilon(1e-12));
    CHECK(s.soc == 0.7);
}

TEST_CASE("zero internal resistance gives the ohmic current exactly") {
    VehicleSpec spec = table_spec();
    spec.battery.internal_resistance_ohm = 0.0;
    const BatteryState s = battery_step(0.5, spec, 3552.0, 1.0);
    const double voc = 96.0 * (3.3 + 0.5 * 0.8); // 355.2 V
    CHECK(s.current_a == doctest::Approx(3552.0 / voc).epsilon(1e-12));
}

TEST_CASE("solved terminal pair reproduces the demanded power") {
    const VehicleSpec spec = table_spec();
    const BatteryState s = battery_step(0.5, spec, 4000.0, 1.0);
    CHECK(s.current_a * s.voltage_v == doctest::Approx(4000.0).epsilon(1e-9));
    const double voc = 96.0 * (3.3 + 0.5 * 0.8);
    CHECK(s.voltage_v ==
          doctest::Approx(voc - s.current_a * spec.battery.internal_resistance_ohm));
    // discharging at 4 kW from a 120 Ah pack for 1 s
    CHECK(s.soc < 0.5);
    CHECK(s.soc == doctest::Approx(0.5 - s.current_a / (3600.0 * 120.0)).epsilon(1e-12));
}

TEST_CASE("impossible power demand names the limit") {
    const VehicleSpec spec = table_spec();
    // max deliverable power is Voc^2 / (4R) ~ 315 kW at soc 0.5
    CHECK_THROWS_AS(battery_step(0.5, spec, 4.0e5, 1.0), PowerLimitError);
}

TEST_CASE("standing still simulates to zero energy") {
    const std::size_t n = 20;
    Channel t(n), v(n, 0.0), e(n, 500.0);
    for (std::size_t j = 0; j < n; ++j) t[j] = static_cast<double>(j);
    const SimulationResult res = simulate_trip(table_spec(), t, v, e, 0.9);
    for (const double x : res.predicted_energy) CHECK(x == 0.0);
    for (const double s : res.soc) CHECK(s == 0.9);
}

TEST_CASE("constant speed on a flat road is affine in time") {
    const std::size_t n = 30;
    Channel t(n), v(n, 72.0), e(n, 500.0);
    for (std::size_t j = 0; j < n; ++j) t[j] = 2.0 * static_cast<double>(j);
    const SimulationResult res = simulate_trip(table_spec(), t, v, e, 0.9);
    // increments settle once the finite-difference acceleration is zero
    const double step = res.predicted_energy[3] - res.predicted_energy[2];
    for (std::size_t j = 3; j < n; ++j) {
        CHECK(res.predicted_energy[j] - res.predicted_energy[j - 1] ==
              doctest::Approx(step).epsilon(1e-6));
    }
}

TEST_CASE("simulation matches a straight-line re-evaluation of the chain") {
    const VehicleSpec spec = table_spec();
    const std::size_t n = 10;
    Channel t(n), v = sawtooth(n), e(n);
    for (std::size_t j = 0; j < n; ++j) {
        t[j] = 5.0 * static_cast<double>(j);
        e[j] = 500.0 + 0.8 * static_cast<double>(j);
    }
    const SimulationResult res = simulate_trip(spec, t, v, e, 0.8);

    // plain re-evaluation, one expression at a time
    double soc = 0.8, vp = 0.0, energy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dt = j ? t[j] - t[j - 1] : 0.0;
        const double vm = v[j] / 3.6;
        const double acc = j ? (vm - vp) / dt : 0.0;
        const double dist = vm * dt;
        const double grade = (j == 0 || dist < 0.1) ? 0.0 : (e[j] - e[j - 1]) / dist;
        const double theta = std::atan(grade);
        double p = vm * (0.5 * 1.2041 * spec.drag_coefficient * spec.frontal_area_m2 * vm * vm +
                         spec.rolling_resistance_coeff * spec.mass_kg * 9.81 * std::cos(theta) +
                         spec.mass_kg * 9.81 * std::sin(theta) +
                         spec.mass_kg * (1.0 + spec.rotational_mass_ratio / 100.0) * acc);
        p = p >= 0 ? p / spec.drivetrain_efficiency
                   : p * spec.drivetrain_efficiency * spec.recuperation_fraction;
        const double voc = 96.0 * (3.3 + soc * 0.8);
        const double r = spec.battery.internal_resistance_ohm;
        const double current = (voc - std::sqrt(voc * voc - 4.0 * r * p)) / (2.0 * r);
        const double voltage = voc - current * r;
        if (j > 0) {
            soc = std::clamp(soc - current * dt / (3600.0 * 120.0), 0.0, 1.0);
            energy += current * voltage * dt;
        }
        CHECK(res.current[j] == doctest::Approx(current).epsilon(1e-9));
        CHECK(res.voltage[j] == doctest::Approx(voltage).epsilon(1e-9));
        CHECK(res.soc[j] == doctest::Approx(soc).epsilon(1e-9));
        CHECK(res.predicted_energy[j] == doctest::Approx(energy).epsilon(1e-9));
        vp = vm;
    }
}

TEST_CASE("terminal energy equals the current-voltage quadrature") {
    const std::size_t n = 50;
    Channel t(n), v = sawtooth(n), e(n);
    for (std::size_t j = 0; j < n; ++j) {
        t[j] = 4.0 * static_cast<double>(j);
        e[j] = 500.0 + 2.0 * std::sin(0.3 * static_cast<double>(j));
    }
    const SimulationResult res = simulate_trip(table_spec(), t, v, e, 0.9);
    double total = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        total += res.current[j] * res.voltage[j] * (t[j] - t[j - 1]);
    }
    CHECK(res.predicted_energy.back() ==
          doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("no recuperation makes predicted energy non-decreasing") {
    VehicleSpec spec = table_spec();
    spec.recuperation_fraction = 0.0;
    const std::size_t n = 40;
    Channel t(n), v = sawtooth(n), e(n);
    for (std::size_t j = 0; j < n; ++j) {
        t[j] = 3.0 * static_cast<double>(j);
        e[j] = 500.0 - 0.5 * static_cast<double>(j); // downhill, braking-heavy
    }
    const SimulationResult res = simulate_trip(spec, t, v, e, 0.9);
    for (std::size_t j = 1; j < n; ++j) {
        CHECK(res.predicted_energy[j] >= res.predicted_energy[j - 1]);
    }
}

TEST_CASE("doubling the drag coefficient strictly increases terminal energy") {
    const std::size_t n = 40;
    Channel t(n), v = sawtooth(n), e(n, 500.0);
    for (std::size_t j = 0; j < n; ++j) t[j] = 3.0 * static_cast<double>(j);
    VehicleSpec lo = table_spec(), hi = table_spec();
    hi.drag_coefficient *= 2.0;
    CHECK(simulate_trip(hi, t, v, e, 0.9).predicted_energy.back() >
          simulate_trip(lo, t, v, e, 0.9).predicted_energy.back());
}

TEST_CASE("terminal energy is monotone in the recuperation fraction") {
    const std::size_t n = 60;
    Channel t(n), v = sawtooth(n), e(n);
    for (std::size_t j = 0; j < n; ++j) {
        t[j] = 5.0 * static_cast<double>(j);
        e[j] = 600.0 - 1.0 * static_cast<double>(j);
    }
    double prev = std::numeric_limits<double>::infinity();
    for (const double recup : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        VehicleSpec spec = table_spec();
        spec.recuperation_fraction = recup;
        const double terminal = simulate_trip(spec, t, v, e, 0.9).predicted_energy.back();
        CHECK(terminal < prev);
        prev = terminal;
    }
}

TEST_CASE("soc stays within bounds") {
    const std::size_t n = 200;
    Channel t(n), v = sawtooth(n), e(n);
    for (std::size_t j = 0; j < n; ++j) {
        t[j] = 30.0 * static_cast<double>(j); // long steps drain hard
        e[j] = 500.0 + 3.0 * std::sin(0.2 * static_cast<double>(j));
    }
    const SimulationResult res = simulate_trip(table_spec(), t, v, e, 0.05);
    for (const double s : res.soc) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("vehicle spec json round trip") {
    VehicleSpec spec = table_spec();
    spec.recuperation_fraction = 0.25;
    const auto path = std::filesystem::temp_directory_path() / "hybev_vehicle.json";
    {
        std::ofstream out(path);
        out << spec.to_json();
    }
    const VehicleSpec loaded = VehicleSpec::from_json_file(path);
    CHECK(loaded.recuperation_fraction == 0.25);
    CHECK(loaded.mass_kg == spec.mass_kg);
    CHECK(loaded.battery.cells_series == 96);
    std::filesystem::remove(path);
}

TEST_CASE("invalid spec values are rejected") {
    VehicleSpec spec = table_spec();
    spec.recuperation_fraction = 1.5;
    CHECK_THROWS_AS(spec.validate(), DataError);
    spec = table_spec();
    spec.battery.ocv_at_empty_v = 5.0; // above full
    CHECK_THROWS_AS(spec.validate(), DataError);
}

} // TEST_SUITE
