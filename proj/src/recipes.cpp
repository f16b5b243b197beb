#include "hybev/recipes.hpp"

#include "hybev/errors.hpp"

namespace hybev {

RecipeKind recipe_from_string(const std::string& tag) {
    if (tag == "gamm_gaussian") return RecipeKind::gamm_gaussian;
    if (tag == "gamm_t") return RecipeKind::gamm_t;
    if (tag == "forest") return RecipeKind::forest;
    if (tag == "boost") return RecipeKind::boost;
    if (tag == "physics_only") return RecipeKind::physics_only;
    if (tag == "data_only") return RecipeKind::data_only;
    throw UsageError("unknown recipe tag '" + tag +
                     "' (expected gamm_gaussian, gamm_t, forest, boost, physics_only, data_only)");
}

std::string recipe_to_string(RecipeKind kind) {
    switch (kind) {
        case RecipeKind::gamm_gaussian: return "gamm_gaussian";
        case RecipeKind::gamm_t: return "gamm_t";
        case RecipeKind::forest: return "forest";
        case RecipeKind::boost: return "boost";
        case RecipeKind::physics_only: return "physics_only";
        case RecipeKind::data_only: return "data_only";
        case RecipeKind::oracle: return "oracle";
    }
    return "unknown";
}

std::vector<std::string> default_tree_features() {
    return {"time", "ambient_temp", "velocity", "diff_elevation", "seasonality", "weather"};
}

GammFormula default_gamm_formula() {
    GammFormula f;
    f.response = "residual_phy";
    f.smooth_terms = {{"time", 20}, {"ambient_temp", 20}, {"velocity", 20}, {"diff_elevation", 20}};
    f.linear_terms = {"weather"};
    f.interactions = {{"ambient_temp", "diff_elevation"}};
    f.by_terms = {{"time", "seasonality", 20}, {"ambient_temp", "seasonality", 20}};
    f.random_intercept = "trip_id";
    return f;
}

CorrectiveModel fit_recipe(const RecipeConfig& config, const PanelDataset& training) {
    CorrectiveModel model;
    if (config.kind == RecipeKind::physics_only) return model;
    if (config.kind == RecipeKind::oracle) {
        model.oracle_ = true;
        model.response_channel_ = "residual_phy";
        return model;
    }

    const bool direct = config.kind == RecipeKind::data_only;
    const std::string response = direct ? "measured_energy" : "residual_phy";
    model.direct_energy_ = direct;
    model.response_channel_ = response;

    DesignMatrix design;
    switch (config.kind) {
        case RecipeKind::gamm_gaussian:
        case RecipeKind::gamm_t: {
            GammFormula formula = config.formula;
            formula.response = response;
            design = assemble_design(training, formula.features(), response);
            const Family family = config.kind == RecipeKind::gamm_gaussian ? Family::gaussian
                                                                           : Family::student_t;
            model.model_ = fit_gamm(design, formula, family);
            break;
        }
        case RecipeKind::forest: {
            design = assemble_design(training, config.features, response);
            model.model_ = fit_forest(design, config.forest, config.seed);
            break;
        }
        case RecipeKind::boost:
        case RecipeKind::data_only: {
            design = assemble_design(training, config.features, response);
            model.model_ = fit_boost(design, config.boost);
            break;
        }
        default:
            throw UsageError("recipe kind cannot be fitted");
    }

    for (const auto& subject : design.subject_of_row) ++model.training_rows_[subject];
    design.rows.clear();
    design.response.clear();
    design.subject_of_row.clear();
    model.skeleton_ = std::move(design);
    return model;
}

std::vector<double> CorrectiveModel::predict_trip(const TripSeries& trip) const {
    if (oracle_) {
        if (!trip.residual_phy) {
            throw ChannelMissingError("oracle recipe needs residual_phy on trip '" +
                                      trip.trip_id + "'");
        }
        return *trip.residual_phy;
    }
    if (is_null()) return std::vector<double>(trip.size(), 0.0);

    const DesignMatrix rows = design_for_trip(trip, skeleton_);
    if (const GammFit* fit = std::get_if<GammFit>(&model_)) {
        return predict_gamm(*fit, rows, /*use_random=*/true);
    }
    std::vector<double> out;
    out.reserve(rows.n_rows());
    if (const Forest* f = std::get_if<Forest>(&model_)) {
        for (const auto& row : rows.rows) out.push_back(f->predict(row));
    } else {
        const BoostedEnsemble& b = std::get<BoostedEnsemble>(model_);
        for (const auto& row : rows.rows) out.push_back(b.predict(row));
    }
    return out;
}

double CorrectiveModel::predict_terminal(const TripSeries& trip) const {
    if (trip.size() == 0) throw DataError("empty trip");
    return predict_trip(trip).back();
}

} // namespace hybev
