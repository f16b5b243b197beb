#include "hybev/vehicle.hpp"

#include "hybev/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace hybev {

using nlohmann::json;

void VehicleSpec::validate() const {
    if (mass_kg <= 0) throw DataError("vehicle mass must be positive");
    if (recuperation_fraction < 0 || recuperation_fraction > 1) {
        throw DataError("recuperation_fraction must be in [0, 1]");
    }
    if (drivetrain_efficiency <= 0 || drivetrain_efficiency > 1) {
        throw DataError("drivetrain_efficiency must be in (0, 1]");
    }
    if (battery.cells_series < 1) throw DataError("cells_series must be >= 1");
    if (battery.cells_parallel < 1) throw DataError("cells_parallel must be >= 1");
    if (!(battery.ocv_at_full_v > battery.ocv_at_empty_v) || battery.ocv_at_empty_v <= 0) {
        throw DataError("need ocv_at_full > ocv_at_empty > 0");
    }
    if (battery.internal_resistance_ohm < 0) throw DataError("internal resistance must be >= 0");
    if (battery.cell_capacity_ah <= 0) throw DataError("cell capacity must be positive");
}

VehicleSpec VehicleSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vehicle spec " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("vehicle spec " + path.string() + ": " + e.what());
    }
    VehicleSpec spec;
    auto get = [](const json& obj, const char* key, auto& dst) {
        if (obj.contains(key)) dst = obj[key].get<std::decay_t<decltype(dst)>>();
    };
    get(j, "mass_kg", spec.mass_kg);
    get(j, "wheel_diameter_m", spec.wheel_diameter_m);
    get(j, "drag_coefficient", spec.drag_coefficient);
    get(j, "frontal_area_m2", spec.frontal_area_m2);
    get(j, "rolling_resistance_coeff", spec.rolling_resistance_coeff);
    get(j, "rotational_mass_ratio", spec.rotational_mass_ratio);
    get(j, "n_wheels", spec.n_wheels);
    get(j, "drivetrain_efficiency", spec.drivetrain_efficiency);
    get(j, "recuperation_fraction", spec.recuperation_fraction);
    if (j.contains("battery")) {
        const json& b = j["battery"];
        get(b, "cell_capacity_ah", spec.battery.cell_capacity_ah);
        get(b, "cells_series", spec.battery.cells_series);
        get(b, "cells_parallel", spec.battery.cells_parallel);
        get(b, "pack_mass_kg", spec.battery.pack_mass_kg);
        get(b, "ocv_at_full_v", spec.battery.ocv_at_full_v);
        get(b, "ocv_at_empty_v", spec.battery.ocv_at_empty_v);
        get(b, "internal_resistance_ohm", spec.battery.internal_resistance_ohm);
    }
    spec.validate();
    return spec;
}

std::string VehicleSpec::to_json() const {
    json j;
    j["mass_kg"] = mass_kg;
    j["wheel_diameter_m"] = wheel_diameter_m;
    j["drag_coefficient"] = drag_coefficient;
    j["frontal_area_m2"] = frontal_area_m2;
    j["rolling_resistance_coeff"] = rolling_resistance_coeff;
    j["rotational_mass_ratio"] = rotational_mass_ratio;
    j["n_wheels"] = n_wheels;
    j["drivetrain_efficiency"] = drivetrain_efficiency;
    j["recuperation_fraction"] = recuperation_fraction;
    j["battery"]["cell_capacity_ah"] = battery.cell_capacity_ah;
    j["battery"]["cells_series"] = battery.cells_series;
    j["battery"]["cells_parallel"] = battery.cells_parallel;
    j["battery"]["pack_mass_kg"] = battery.pack_mass_kg;
    j["battery"]["ocv_at_full_v"] = battery.ocv_at_full_v;
    j["battery"]["ocv_at_empty_v"] = battery.ocv_at_empty_v;
    j["battery"]["internal_resistance_ohm"] = battery.internal_resistance_ohm;
    return j.dump(2);
}

} // namespace hybev
