#pragma once

#include <filesystem>
#include <string>

namespace hybev {

struct BatterySpec {
    double cell_capacity_ah = 120.0;
    int cells_series = 96;
    int cells_parallel = 1;
    double pack_mass_kg = 450.0;
    double ocv_at_full_v = 4.1;  // per cell
    double ocv_at_empty_v = 3.3; // per cell
    double internal_resistance_ohm = 0.1; // pack level
};

/// Physical parameters of the simulated BEV. Defaults follow a 2014
/// BMW i3; frontal area, rolling resistance and drivetrain efficiency
/// are not published for it and carry configurable defaults.
struct VehicleSpec {
    double mass_kg = 1345.0;
    double wheel_diameter_m = 0.6996;
    double drag_coefficient = 0.22;
    double frontal_area_m2 = 2.38;
    double rolling_resistance_coeff = 0.01;
    double rotational_mass_ratio = 5.0; // percent add-on for rotating inertia
    int n_wheels = 4;
    double drivetrain_efficiency = 0.9;   // (0, 1]
    double recuperation_fraction = 0.5;   // [0, 1]; 0 disables regeneration
    BatterySpec battery;

    void validate() const;

    static VehicleSpec from_json_file(const std::filesystem::path& path);
    std::string to_json() const;
};

} // namespace hybev
