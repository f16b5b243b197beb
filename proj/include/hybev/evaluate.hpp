#pragma once

#include "hybev/recipes.hpp"
#include "hybev/trip.hpp"
#include "hybev/vehicle.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hybev {

/// Terminal absolute percentage error |(y_T - f_T) / y_T|. Guarded
/// against near-zero terminal energy (|y_T| < 1 J is an error).
double ape_terminal(double y_terminal, double f_terminal);

/// The hybrid estimate: physics prediction plus the corrective model's
/// residual estimate.
double hybrid_predict(double phys_terminal, double corrective_terminal);

struct ErrorSummary {
    double min = 0;
    double avg = 0;
    double max = 0;
};

ErrorSummary summarize(const std::vector<double>& values);

struct EvaluationReport {
    std::string model_tag;
    std::map<std::string, double> per_trip;          // hybrid terminal APE
    std::map<std::string, double> physics_baseline;  // physics-only terminal APE
    ErrorSummary summary;                            // over successful hybrid APEs
    std::map<std::string, std::string> failed_folds; // trip id -> reason
    std::size_t leaked_observations = 0;             // held-out rows found in training designs

    std::string to_json() const;
    void write_csv(std::ostream& out) const;
};

struct EvalOptions {
    std::uint64_t seed = 0;
    unsigned jobs = 0; // 0 picks the hardware concurrency
};

/// Derives diff_elevation/measured_energy where absent, simulates every
/// trip with the given vehicle and attaches phys_pred and residual_phy.
void prepare_panel(PanelDataset& panel, const VehicleSpec& spec, double soc0 = 0.9);

/// Leave-one-trip-out cross-validation of the hybrid pipeline. Trips
/// must already carry measured_energy, phys_pred and residual_phy. Each
/// fold trains the recipe on the other trips, forms the hybrid terminal
/// estimate for the held-out trip and records its APE next to the
/// physics-only APE. Fold failures are recorded, not fatal.
EvaluationReport loocv(const PanelDataset& panel, const RecipeConfig& recipe,
                       const EvalOptions& opts = {});

struct GridCell {
    std::string param;
    double value = 0;
    ErrorSummary summary;
    std::size_t failed_folds = 0;
};

/// One-at-a-time hyperparameter sweep: each grid entry varies one
/// parameter (ntrees, mtry, nsplit, lambda, knots) with the others at
/// their configured defaults; every cell is a full loocv summary.
std::vector<GridCell> grid_search(const PanelDataset& panel, const RecipeConfig& base,
                                  const std::vector<std::pair<std::string, std::vector<double>>>& grid,
                                  const EvalOptions& opts = {});

std::string grid_csv(const std::vector<GridCell>& cells);

} // namespace hybev
