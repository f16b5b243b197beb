#include "hybev/physics.hpp"

#include "hybev/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hybev {

double tractive_power(const VehicleSpec& spec, double v_ms, double a_ms2, double grade) {
    const double theta = std::atan(grade);
    const double lambda = spec.rotational_mass_ratio / 100.0;
    const double drag = 0.5 * kAirDensity * spec.drag_coefficient * spec.frontal_area_m2 *
                        v_ms * v_ms;
    const double rolling = spec.rolling_resistance_coeff * spec.mass_kg * kGravity *
                           std::cos(theta);
    const double climb = spec.mass_kg * kGravity * std::sin(theta);
    const double inertia = spec.mass_kg * (1.0 + lambda) * a_ms2;
    return v_ms * (drag + rolling + climb + inertia);
}

double wheel_to_battery(const VehicleSpec& spec, double p_tractive_w) {
    if (p_tractive_w >= 0) return p_tractive_w / spec.drivetrain_efficiency;
    return p_tractive_w * spec.drivetrain_efficiency * spec.recuperation_fraction;
}

namespace {

struct Solved {
    double current_a;
    double voltage_v;
};

// p = V*I with V = Voc - I*R; the physical root keeps I small and V near
// Voc (the other root burns the demand in the internal resistance).
Solved solve_terminal(const VehicleSpec& spec, double soc, double p_batt_w) {
    const BatterySpec& b = spec.battery;
    const double voc = b.cells_series *
                       (b.ocv_at_empty_v + soc * (b.ocv_at_full_v - b.ocv_at_empty_v));
    const double r = b.internal_resistance_ohm;
    if (r == 0.0) {
        return {p_batt_w / voc, voc};
    }
    const double disc = voc * voc - 4.0 * r * p_batt_w;
    if (disc < 0) {
        throw PowerLimitError("battery cannot deliver " + std::to_string(p_batt_w) +
                              " W at soc " + std::to_string(soc));
    }
    const double current = (voc - std::sqrt(disc)) / (2.0 * r);
    return {current, voc - current * r};
}

} // namespace

BatteryState battery_step(double soc, const VehicleSpec& spec, double p_batt_w, double dt_s) {
    if (soc < 0 || soc > 1) throw DataError("soc must be within [0, 1]");
    if (dt_s <= 0) throw DataError("battery step requires dt > 0");
    const Solved s = solve_terminal(spec, soc, p_batt_w);
    const BatterySpec& b = spec.battery;
    const double capacity_as = 3600.0 * b.cell_capacity_ah * b.cells_parallel;
    const double next = std::clamp(soc - s.current_a * dt_s / capacity_as, 0.0, 1.0);
    return {next, s.current_a, s.voltage_v};
}

SimulationResult simulate_trip(const VehicleSpec& spec, const Channel& t,
                               const Channel& velocity_kmh, const Channel& elevation_m,
                               double soc0) {
    spec.validate();
    const std::size_t n = t.size();
    if (velocity_kmh.size() != n || elevation_m.size() != n) {
        throw AlignmentError("simulation channels differ in length");
    }
    if (soc0 < 0 || soc0 > 1) throw DataError("soc0 must be within [0, 1]");

    SimulationResult res;
    res.current.resize(n);
    res.voltage.resize(n);
    res.soc.resize(n);
    res.tractive_power_w.resize(n);
    res.battery_power_w.resize(n);
    res.predicted_energy.resize(n);

    double soc = soc0;
    double v_prev = 0.0;
    double energy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dt = j == 0 ? 0.0 : t[j] - t[j - 1];
        const double v = velocity_kmh[j] / 3.6;
        const double a = (j == 0 || dt <= 0) ? 0.0 : (v - v_prev) / dt;
        const double dist = v * dt;
        const double grade = (j == 0 || dist < 0.1) ? 0.0 : (elevation_m[j] - elevation_m[j - 1]) / dist;

        const double p_tr = tractive_power(spec, v, a, grade);
        const double p_batt = wheel_to_battery(spec, p_tr);

        double current = 0, voltage = 0;
        if (j == 0) {
            try {
                const BatteryState s = battery_step(soc, spec, p_batt, 1.0);
                current = s.current_a;
                voltage = s.voltage_v;
            } catch (const PowerLimitError& e) {
                throw PowerLimitError(std::string(e.what()) + " (sample 0)");
            }
            // dt_0 = 0: report terminal conditions, leave soc untouched
        } else {
            try {
                const BatteryState s = battery_step(soc, spec, p_batt, dt);
                soc = s.soc;
                current = s.current_a;
                voltage = s.voltage_v;
            } catch (const PowerLimitError& e) {
                throw PowerLimitError(std::string(e.what()) + " (sample " + std::to_string(j) +
                                      ")");
            }
        }

        energy += current * voltage * dt;
        res.current[j] = current;
        res.voltage[j] = voltage;
        res.soc[j] = soc;
        res.tractive_power_w[j] = p_tr;
        res.battery_power_w[j] = p_batt;
        res.predicted_energy[j] = energy;
        v_prev = v;
    }
    return res;
}

} // namespace hybev
