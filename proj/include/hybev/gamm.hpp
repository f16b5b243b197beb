#pragma once

#include "hybev/design.hpp"
#include "hybev/errors.hpp"
#include "hybev/spline.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hybev {

enum class Family { gaussian, student_t };

Family family_from_string(const std::string& name);
std::string family_to_string(Family family);

struct SmoothTermSpec {
    std::string var;
    std::size_t knots = 20;
};

struct ByTermSpec {
    std::string smooth;
    std::string categorical;
    std::size_t knots = 20;
};

/// Additive model description. Smooths are penalized truncated-linear
/// splines, by_terms get a separate penalized smooth per categorical
/// level, interactions smooth the product of the two variables, and the
/// random intercept groups rows by subject.
struct GammFormula {
    std::string response = "residual_phy";
    std::vector<SmoothTermSpec> smooth_terms;
    std::vector<std::string> linear_terms;
    std::vector<std::array<std::string, 2>> interactions;
    std::vector<ByTermSpec> by_terms;
    std::string random_intercept; // subject grouping, empty disables

    /// Variables assemble_design must provide for this formula.
    std::vector<std::string> features() const;

    static GammFormula from_json(const std::string& text);
    static GammFormula from_json_file(const std::string& path);
    std::string to_json() const;
};

struct SmoothBlock {
    std::string label;
    std::string var;
    std::string var2;      // product smooths; empty otherwise
    std::string by_column; // level indicator column; empty for base smooths
    SplineBasis basis;
    double slope = 0;           // unpenalized slope of a base smooth
    bool slope_in_block = false; // by-level smooths keep the slope penalized
    std::vector<double> coefs;  // [slope?] + u_k
    double sigma2 = 0;          // block variance behind the ridge
    double edf = 0;

    double evaluate(double x, double indicator = 1.0) const;
};

struct GammFit {
    Family family = Family::gaussian;
    double nu = 0; // student_t only
    double intercept = 0;
    std::vector<std::pair<std::string, double>> fixed_coefs;
    std::vector<SmoothBlock> smooths;
    std::map<std::string, double> random_intercepts;
    double sigma_b2 = 0;
    double random_edf = 0;
    double sigma = 0;  // residual scale, rss/(n-edf) based
    double loglik = 0; // in-sample log-likelihood
    double edf_total = 0;
    double n_params = 0; // effective count entering AIC/BIC
    std::size_t n_obs = 0;
    GammFormula formula;
    std::vector<std::string> required_columns;

    std::string summary_json() const;
};

/// thrown when the variance-update iteration does not settle; carries the
/// last iterate so callers can inspect it
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, GammFit last_iterate)
        : Error(msg), last(std::move(last_iterate)) {}
    GammFit last;
};

// solver internals captured for the gradient-check test
struct GammInternals {
    std::vector<std::vector<double>> model_matrix; // row-major
    std::vector<double> penalties;                 // per column
    std::vector<double> coefficients;
    std::vector<double> weights;
    std::vector<double> response;
};

struct GammOptions {
    std::size_t max_outer = 200;                 // variance updates per solve
    double tol = 1e-6;
    std::size_t max_irls = 60;                   // student-t weight updates
    std::vector<double> nu_grid = {3, 4, 5, 7, 10, 15, 30};
    std::optional<double> fixed_block_variance;  // freeze smoothing variances
    GammInternals* capture = nullptr;
};

/// Penalized least squares with per-block ridge variances updated by the
/// moment scheme sigma_f^2 <- |u|^2/edf until relative change < tol; the
/// Student-t family wraps the same solver in IRLS with weights
/// (nu+1)/(nu + r^2/sigma^2) and picks nu from the grid by profile
/// likelihood (smallest nu on ties).
GammFit fit_gamm(const DesignMatrix& design, const GammFormula& formula, Family family,
                 const GammOptions& opts = {});

/// Fixed + smooth contributions always; the subject's random intercept is
/// added only when use_random and the subject was seen in training.
std::vector<double> predict_gamm(const GammFit& fit, const DesignMatrix& newdata,
                                 bool use_random);

} // namespace hybev
