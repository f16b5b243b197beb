#pragma once

#include "hybev/boosting.hpp"
#include "hybev/design.hpp"
#include "hybev/forest.hpp"
#include "hybev/gamm.hpp"
#include "hybev/trip.hpp"

#include <map>
#include <memory>
#include <string>
#include <variant>

namespace hybev {

/// The corrective-model families the pipeline can train on the physics
/// residuals. physics_only skips correction; data_only trains the
/// boosting model on the raw energy as the purely data-driven benchmark;
/// oracle returns the held-out trip's true residual (test harness only).
enum class RecipeKind {
    gamm_gaussian,
    gamm_t,
    forest,
    boost,
    physics_only,
    data_only,
    oracle,
};

RecipeKind recipe_from_string(const std::string& tag);
std::string recipe_to_string(RecipeKind kind);

std::vector<std::string> default_tree_features();
GammFormula default_gamm_formula();

struct RecipeConfig {
    RecipeKind kind = RecipeKind::boost;
    GammFormula formula = default_gamm_formula();     // gamm kinds
    std::vector<std::string> features = default_tree_features(); // tree kinds
    ForestParams forest;
    BoostParams boost;
    std::uint64_t seed = 0;
};

/// A fitted corrective model with the common predict contract on unseen
/// trips. Immutable once fitted.
class CorrectiveModel {
public:
    /// Predicted cumulative residual (or raw energy for data_only) at the
    /// trip's terminal sample.
    double predict_terminal(const TripSeries& trip) const;

    /// Per-sample predictions along the trip.
    std::vector<double> predict_trip(const TripSeries& trip) const;

    /// True when predictions estimate the raw energy rather than the
    /// physics residual.
    bool predicts_energy_directly() const { return direct_energy_; }

    bool is_null() const { return std::holds_alternative<std::monostate>(model_); }

    /// Rows per subject of the assembled training design; the LOOCV
    /// leak check reads held-out ids from here (must be absent).
    const std::map<std::string, std::size_t>& training_rows_per_subject() const {
        return training_rows_;
    }

    const GammFit* gamm() const { return std::get_if<GammFit>(&model_); }
    const Forest* forest() const { return std::get_if<Forest>(&model_); }
    const BoostedEnsemble* boost() const { return std::get_if<BoostedEnsemble>(&model_); }

private:
    friend CorrectiveModel fit_recipe(const RecipeConfig&, const PanelDataset&);

    std::variant<std::monostate, GammFit, Forest, BoostedEnsemble> model_;
    DesignMatrix skeleton_; // columns + encoders of the training design
    std::string response_channel_;
    bool direct_energy_ = false;
    bool oracle_ = false;
    std::map<std::string, std::size_t> training_rows_;
};

/// Trains the configured recipe on the panel. Corrective recipes target
/// residual_phy; data_only targets measured_energy.
CorrectiveModel fit_recipe(const RecipeConfig& config, const PanelDataset& training);

} // namespace hybev
