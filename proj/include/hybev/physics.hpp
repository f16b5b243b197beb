#pragma once

#include "hybev/trip.hpp"
#include "hybev/vehicle.hpp"

namespace hybev {

inline constexpr double kAirDensity = 1.2041; // kg/m^3 at 20 degC
inline constexpr double kGravity = 9.81;      // m/s^2

/// Point-mass longitudinal power demand at the wheel in W:
/// P = v * (0.5*rho*Cd*A*v^2 + Crr*m*g*cos(theta) + m*g*sin(theta)
///          + m*(1+lambda)*a), theta = atan(grade).
/// Negative values are braking power available for recuperation.
double tractive_power(const VehicleSpec& spec, double v_ms, double a_ms2, double grade);

/// Maps wheel power onto battery terminal power. Traction divides by the
/// drivetrain efficiency; braking returns eta * recuperation_fraction of
/// the wheel power to the battery.
double wheel_to_battery(const VehicleSpec& spec, double p_tractive_w);

struct BatteryState {
    double soc = 0;       // fraction after the step
    double current_a = 0; // pack current, positive discharging
    double voltage_v = 0; // terminal voltage
};

/// Quasi-static battery: pack OCV linear in SOC, constant internal
/// resistance. Solves p = V*I with V = Voc - I*R for the physical root
/// and integrates SOC over dt (clamped to [0,1]). Throws PowerLimitError
/// when the demand exceeds what the pack can deliver.
BatteryState battery_step(double soc, const VehicleSpec& spec, double p_batt_w, double dt_s);

struct SimulationResult {
    Channel current;          // A
    Channel voltage;          // V
    Channel soc;              // fraction
    Channel tractive_power_w; // W at the wheel
    Channel battery_power_w;  // W at the terminals
    Channel predicted_energy; // cumulative J
};

/// Runs the longitudinal + battery chain over a trip. Velocity arrives in
/// km/h; acceleration is the finite difference of v, grade the elevation
/// change over the travelled distance (0 when the vehicle moved less
/// than 0.1 m in a step).
SimulationResult simulate_trip(const VehicleSpec& spec, const Channel& t,
                               const Channel& velocity_kmh, const Channel& elevation_m,
                               double soc0);

} // namespace hybev
