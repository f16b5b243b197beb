#include "hybev/evaluate.hpp"

#include "hybev/errors.hpp"
#include "hybev/physics.hpp"
#include "hybev/preprocess.hpp"
#include "hybev/rand.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

namespace hybev {

using nlohmann::json;

double ape_terminal(double y_terminal, double f_terminal) {
    if (std::abs(y_terminal) < 1.0) {
        throw UndefinedApeError("terminal energy " + std::to_string(y_terminal) +
                                " J is below the 1 J guard");
    }
    return std::abs((y_terminal - f_terminal) / y_terminal);
}

double hybrid_predict(double phys_terminal, double corrective_terminal) {
    return phys_terminal + corrective_terminal;
}

ErrorSummary summarize(const std::vector<double>& values) {
    if (values.empty()) throw DataError("cannot summarize zero values");
    ErrorSummary s;
    s.min = values[0];
    s.max = values[0];
    double acc = 0;
    for (const double v : values) {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        acc += v;
    }
    s.avg = acc / static_cast<double>(values.size());
    return s;
}

namespace {

struct FoldResult {
    std::string trip_id;
    double physics_ape = 0;
    double hybrid_ape = 0;
    bool failed = false;
    std::string reason;
    std::size_t leaked = 0;
};

void require_channels(const PanelDataset& panel) {
    for (const auto& trip : panel.trips) {
        if (!trip.measured_energy || !trip.phys_pred || !trip.residual_phy) {
            throw ChannelMissingError(
                "trip '" + trip.trip_id +
                "' lacks measured_energy/phys_pred/residual_phy; run the physics step first");
        }
    }
}

FoldResult run_fold(const PanelDataset& panel, const RecipeConfig& recipe,
                    std::size_t held_index, std::uint64_t fold_seed) {
    const TripSeries& held = panel.trips[held_index];
    FoldResult result;
    result.trip_id = held.trip_id;
    try {
        const double y_terminal = held.measured_energy->back();
        const double phys_terminal = held.phys_pred->back();
        result.physics_ape = ape_terminal(y_terminal, phys_terminal);

        PanelDataset training;
        training.trips.reserve(panel.trips.size() - 1);
        for (std::size_t j = 0; j < panel.trips.size(); ++j) {
            if (j != held_index) training.trips.push_back(panel.trips[j]);
        }

        RecipeConfig fold_recipe = recipe;
        fold_recipe.seed = fold_seed;
        const CorrectiveModel model = fit_recipe(fold_recipe, training);

        const auto it = model.training_rows_per_subject().find(held.trip_id);
        result.leaked = it == model.training_rows_per_subject().end() ? 0 : it->second;

        double f_terminal;
        if (model.predicts_energy_directly()) {
            f_terminal = model.predict_terminal(held);
        } else if (model.is_null() && recipe.kind == RecipeKind::physics_only) {
            f_terminal = phys_terminal;
        } else {
            f_terminal = hybrid_predict(phys_terminal, model.predict_terminal(held));
        }
        result.hybrid_ape = ape_terminal(y_terminal, f_terminal);
    } catch (const Error& e) {
        result.failed = true;
        result.reason = e.what();
    }
    return result;
}

} // namespace

void prepare_panel(PanelDataset& panel, const VehicleSpec& spec, double soc0) {
    for (auto& trip : panel.trips) {
        if (!trip.diff_elevation) trip.diff_elevation = diff_elevation(trip);
        if (!trip.measured_energy) trip.measured_energy = measured_energy(trip);
        const SimulationResult sim =
            simulate_trip(spec, trip.t, trip.velocity, trip.elevation, soc0);
        attach_physics(trip, sim.predicted_energy);
    }
}

EvaluationReport loocv(const PanelDataset& panel, const RecipeConfig& recipe,
                       const EvalOptions& opts) {
    panel.validate();
    if (panel.trips.size() < 2) throw DataError("loocv needs at least two trips");
    require_channels(panel);

    const std::size_t n_folds = panel.trips.size();
    std::vector<FoldResult> folds(n_folds);

    unsigned jobs = opts.jobs != 0 ? opts.jobs : std::thread::hardware_concurrency();
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n_folds)));

    // per-fold seeds are derived up front; the schedule cannot affect them
    std::vector<std::uint64_t> fold_seeds(n_folds);
    for (std::size_t i = 0; i < n_folds; ++i) fold_seeds[i] = mix_seed(opts.seed, i);

    if (jobs == 1) {
        for (std::size_t i = 0; i < n_folds; ++i) {
            folds[i] = run_fold(panel, recipe, i, fold_seeds[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < n_folds; i = next.fetch_add(1)) {
                folds[i] = run_fold(panel, recipe, i, fold_seeds[i]);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EvaluationReport report;
    report.model_tag = recipe_to_string(recipe.kind);
    std::vector<double> hybrid_apes;
    for (const auto& fold : folds) {
        if (fold.failed) {
            report.failed_folds[fold.trip_id] = fold.reason;
            continue;
        }
        report.per_trip[fold.trip_id] = fold.hybrid_ape;
        report.physics_baseline[fold.trip_id] = fold.physics_ape;
        report.leaked_observations += fold.leaked;
        hybrid_apes.push_back(fold.hybrid_ape);
    }
    if (!hybrid_apes.empty()) report.summary = summarize(hybrid_apes);
    return report;
}

std::string EvaluationReport::to_json() const {
    json j;
    j["model"] = model_tag;
    j["per_trip"] = per_trip;
    j["physics_baseline"] = physics_baseline;
    j["summary"] = {{"min", summary.min}, {"avg", summary.avg}, {"max", summary.max}};
    j["failed_folds"] = failed_folds;
    j["leaked_observations"] = leaked_observations;
    return j.dump(2);
}

void EvaluationReport::write_csv(std::ostream& out) const {
    out << "trip_id,physics_ape,hybrid_ape\n";
    out.precision(17);
    for (const auto& [trip_id, hybrid] : per_trip) {
        out << trip_id << "," << physics_baseline.at(trip_id) << "," << hybrid << "\n";
    }
}

namespace {

void set_param(RecipeConfig& recipe, const std::string& param, double value) {
    if (param == "ntrees") {
        recipe.forest.ntrees = static_cast<std::size_t>(value);
        recipe.boost.ntrees = static_cast<std::size_t>(value);
    } else if (param == "mtry") {
        recipe.forest.mtry = static_cast<std::size_t>(value);
    } else if (param == "nsplit") {
        recipe.boost.nsplit = static_cast<std::size_t>(value);
    } else if (param == "lambda") {
        recipe.boost.lambda = value;
    } else if (param == "knots") {
        const auto k = static_cast<std::size_t>(value);
        for (auto& s : recipe.formula.smooth_terms) s.knots = k;
        for (auto& b : recipe.formula.by_terms) b.knots = k;
    } else {
        throw UsageError("unknown grid parameter '" + param + "'");
    }
}

} // namespace

std::vector<GridCell> grid_search(const PanelDataset& panel, const RecipeConfig& base,
                                  const std::vector<std::pair<std::string, std::vector<double>>>& grid,
                                  const EvalOptions& opts) {
    if (grid.empty()) throw UsageError("empty hyperparameter grid");
    std::vector<GridCell> cells;
    for (const auto& [param, values] : grid) {
        for (const double value : values) {
            RecipeConfig recipe = base;
            set_param(recipe, param, value);
            const EvaluationReport report = loocv(panel, recipe, opts);
            GridCell cell;
            cell.param = param;
            cell.value = value;
            cell.summary = report.summary;
            cell.failed_folds = report.failed_folds.size();
            cells.push_back(cell);
        }
    }
    return cells;
}

std::string grid_csv(const std::vector<GridCell>& cells) {
    std::string out = "param,value,min_error,avg_error,max_error,failed_folds\n";
    for (const auto& cell : cells) {
        out += cell.param + "," + std::to_string(cell.value) + "," +
               std::to_string(cell.summary.min) + "," + std::to_string(cell.summary.avg) + "," +
               std::to_string(cell.summary.max) + "," + std::to_string(cell.failed_folds) + "\n";
    }
    return out;
}

} // namespace hybev
