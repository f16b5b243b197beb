#include "hybev/gamm.hpp"

#include "hybev/families.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace hybev {

using nlohmann::json;

Family family_from_string(const std::string& name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "student_t" || name == "student-t" || name == "t") return Family::student_t;
    throw UsageError("unknown family '" + name + "'");
}

std::string family_to_string(Family family) {
    return family == Family::gaussian ? "gaussian" : "student_t";
}

std::vector<std::string> GammFormula::features() const {
    std::vector<std::string> out;
    auto push = [&out](const std::string& f) {
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    };
    for (const auto& s : smooth_terms) push(s.var);
    for (const auto& l : linear_terms) push(l);
    for (const auto& [a, b] : interactions) {
        push(a);
        push(b);
    }
    for (const auto& b : by_terms) {
        push(b.smooth);
        push(b.categorical);
    }
    return out;
}

GammFormula GammFormula::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("formula JSON: ") + e.what());
    }
    GammFormula f;
    if (j.contains("response")) f.response = j["response"].get<std::string>();
    if (j.contains("smooth_terms")) {
        for (const auto& s : j["smooth_terms"]) {
            SmoothTermSpec spec;
            spec.var = s.at("var").get<std::string>();
            if (s.contains("K")) spec.knots = s["K"].get<std::size_t>();
            f.smooth_terms.push_back(spec);
        }
    }
    if (j.contains("linear_terms")) {
        for (const auto& l : j["linear_terms"]) f.linear_terms.push_back(l.get<std::string>());
    }
    if (j.contains("interactions")) {
        for (const auto& pair : j["interactions"]) {
            f.interactions.push_back({pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
        }
    }
    if (j.contains("by_terms")) {
        for (const auto& b : j["by_terms"]) {
            ByTermSpec spec;
            spec.smooth = b.at("smooth").get<std::string>();
            spec.categorical = b.at("categorical").get<std::string>();
            if (b.contains("K")) spec.knots = b["K"].get<std::size_t>();
            f.by_terms.push_back(spec);
        }
    }
    if (j.contains("random_intercept") && !j["random_intercept"].is_null()) {
        f.random_intercept = j["random_intercept"].get<std::string>();
    }
    return f;
}

GammFormula GammFormula::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open formula file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string GammFormula::to_json() const {
    json j;
    j["response"] = response;
    j["smooth_terms"] = json::array();
    for (const auto& s : smooth_terms) j["smooth_terms"].push_back({{"var", s.var}, {"K", s.knots}});
    j["linear_terms"] = linear_terms;
    j["interactions"] = json::array();
    for (const auto& [a, b] : interactions) j["interactions"].push_back({a, b});
    j["by_terms"] = json::array();
    for (const auto& b : by_terms) {
        j["by_terms"].push_back(
            {{"smooth", b.smooth}, {"categorical", b.categorical}, {"K", b.knots}});
    }
    if (!random_intercept.empty()) j["random_intercept"] = random_intercept;
    return j.dump(2);
}

double SmoothBlock::evaluate(double x, double indicator) const {
    if (by_column.empty()) indicator = 1.0;
    if (indicator == 0.0) return 0.0;
    double acc = 0.0;
    std::size_t offset = 0;
    if (slope_in_block) {
        acc += coefs[0] * x;
        offset = 1;
    } else {
        acc += slope * x;
    }
    for (std::size_t k = 0; k < basis.K(); ++k) acc += coefs[offset + k] * basis.basis(x, k);
    return acc * indicator;
}

namespace {

// column layout of the internal model matrix
struct Block {
    enum class Kind { fixed, smooth, random } kind = Kind::fixed;
    std::size_t begin = 0;
    std::size_t size = 0;
    std::size_t smooth_index = 0; // for Kind::smooth
};

struct Assembled {
    Eigen::MatrixXd C;
    std::vector<Block> blocks;
    std::vector<SmoothBlock> smooths;        // coefs empty until solved
    std::vector<std::size_t> smooth_col;     // first column of each smooth block
    std::vector<std::size_t> slope_col;      // unpenalized slope column per smooth (or npos)
    std::vector<std::pair<std::string, std::size_t>> fixed_cols; // name -> column
    std::vector<std::string> subjects;       // random-intercept order
    std::size_t random_begin = 0, random_size = 0;
    std::vector<std::string> required_columns;
};

constexpr std::size_t kNoSlope = static_cast<std::size_t>(-1);

const OneHotEncoder* encoder_for(const DesignMatrix& design, const std::string& name) {
    for (const auto& enc : design.encoders) {
        if (enc.name == name) return &enc;
    }
    return nullptr;
}

Assembled assemble_model(const DesignMatrix& design, const GammFormula& formula) {
    const std::size_t n = design.n_rows();
    if (n == 0) throw DataError("empty design");

    Assembled a;
    std::set<std::string> required;

    // count columns first
    std::vector<std::vector<double>> cols;
    std::vector<double> ones(n, 1.0);

    auto design_col = [&](const std::string& name) {
        const std::size_t c = design.col(name);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = design.rows[i][c];
        required.insert(name);
        return v;
    };

    // fixed block: intercept + linear terms
    cols.push_back(ones);
    a.fixed_cols.emplace_back("(Intercept)", 0);
    for (const auto& term : formula.linear_terms) {
        if (const OneHotEncoder* enc = encoder_for(design, term)) {
            for (const auto& cname : enc->column_names()) {
                a.fixed_cols.emplace_back(cname, cols.size());
                cols.push_back(design_col(cname));
            }
        } else {
            a.fixed_cols.emplace_back(term, cols.size());
            cols.push_back(design_col(term));
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> smooth_ranges; // begin,size per smooth

    auto add_base_smooth = [&](const std::string& var, const std::string& var2,
                               std::vector<double> x, std::size_t K, const std::string& label) {
        SmoothBlock block;
        block.label = label;
        block.var = var;
        block.var2 = var2;
        block.basis = spline_basis(x, K);
        block.slope_in_block = false;

        a.slope_col.push_back(cols.size());
        cols.push_back(x); // unpenalized slope column

        const std::size_t begin = cols.size();
        for (std::size_t k = 0; k < block.basis.K(); ++k) {
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = block.basis.basis(x[i], k);
            cols.push_back(std::move(z));
        }
        smooth_ranges.emplace_back(begin, block.basis.K());
        a.smooths.push_back(std::move(block));
    };

    for (const auto& term : formula.smooth_terms) {
        add_base_smooth(term.var, "", design_col(term.var), term.knots, "s(" + term.var + ")");
    }
    for (const auto& [va, vb] : formula.interactions) {
        auto x1 = design_col(va);
        const auto x2 = design_col(vb);
        for (std::size_t i = 0; i < n; ++i) x1[i] *= x2[i];
        SmoothTermSpec spec;
        add_base_smooth(va, vb, std::move(x1), spec.knots, "s(" + va + "*" + vb + ")");
    }
    for (const auto& by : formula.by_terms) {
        const OneHotEncoder* enc = encoder_for(design, by.categorical);
        if (enc == nullptr) {
            throw SchemaError("by-term categorical '" + by.categorical +
                              "' is not an encoded feature of the design");
        }
        const auto x = design_col(by.smooth);
        const SplineBasis basis = spline_basis(x, by.knots);
        for (std::size_t level = 0; level < enc->levels.size(); ++level) {
            const std::string ind_name = enc->column_names()[level];
            const auto ind = design_col(ind_name);

            SmoothBlock block;
            block.label = "s(" + by.smooth + "):" + ind_name;
            block.var = by.smooth;
            block.by_column = ind_name;
            block.basis = basis;
            block.slope_in_block = true; // penalized: the base smooth owns the free slope

            a.slope_col.push_back(kNoSlope);
            const std::size_t begin = cols.size();
            std::vector<double> sx(n);
            for (std::size_t i = 0; i < n; ++i) sx[i] = ind[i] * x[i];
            cols.push_back(std::move(sx));
            for (std::size_t k = 0; k < basis.K(); ++k) {
                std::vector<double> z(n);
                for (std::size_t i = 0; i < n; ++i) z[i] = ind[i] * basis.basis(x[i], k);
                cols.push_back(std::move(z));
            }
            smooth_ranges.emplace_back(begin, basis.K() + 1);
            a.smooths.push_back(std::move(block));
        }
    }

    // random intercepts
    a.random_begin = cols.size();
    if (!formula.random_intercept.empty()) {
        a.subjects = design.subjects();
        if (a.subjects.size() < 2) {
            throw IdentifiabilityError("random intercept needs at least two subjects");
        }
        std::map<std::string, std::size_t> subj_index;
        for (std::size_t s = 0; s < a.subjects.size(); ++s) subj_index[a.subjects[s]] = s;
        const std::size_t base = cols.size();
        for (std::size_t s = 0; s < a.subjects.size(); ++s) cols.emplace_back(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            cols[base + subj_index[design.subject_of_row[i]]][i] = 1.0;
        }
        a.random_size = a.subjects.size();
    }

    const std::size_t P = cols.size();
    a.C.resize(n, P);
    for (std::size_t c = 0; c < P; ++c) {
        for (std::size_t i = 0; i < n; ++i) a.C(i, c) = cols[c][i];
    }

    // block table: fixed block is [0, n_fixed) plus the slope columns
    Block fixed;
    fixed.kind = Block::Kind::fixed;
    fixed.begin = 0;
    fixed.size = a.fixed_cols.size();
    a.blocks.push_back(fixed);
    for (std::size_t s = 0; s < smooth_ranges.size(); ++s) {
        Block b;
        b.kind = Block::Kind::smooth;
        b.begin = smooth_ranges[s].first;
        b.size = smooth_ranges[s].second;
        b.smooth_index = s;
        a.blocks.push_back(b);
        a.smooth_col.push_back(b.begin);
    }
    if (a.random_size > 0) {
        Block b;
        b.kind = Block::Kind::random;
        b.begin = a.random_begin;
        b.size = a.random_size;
        a.blocks.push_back(b);
    }

    a.required_columns.assign(required.begin(), required.end());
    return a;
}

struct SolveState {
    Eigen::VectorXd gamma;
    Eigen::VectorXd edf_per_col; // 1 - pen_j * Ainv_jj
    std::vector<double> block_sigma2;
    double sigma2 = 0;
    double rss_w = 0;
    double edf_total = 0;
    bool converged = false;
    std::vector<double> penalties; // final per-column penalties
};

// Alternates the ridge solve with the moment update sigma_s^2 = |u_s|^2/edf_s
// for every penalized block; weights stay fixed inside.
SolveState penalized_solve(const Assembled& a, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, bool weighted, const GammOptions& opts,
                           std::vector<double> block_sigma2_init, double sigma2_init) {
    const std::size_t n = static_cast<std::size_t>(a.C.rows());
    const std::size_t P = static_cast<std::size_t>(a.C.cols());

    Eigen::MatrixXd G(P, P);
    Eigen::VectorXd h(P);
    if (weighted) {
        G.setZero();
        G.selfadjointView<Eigen::Lower>().rankUpdate((w.array().sqrt().matrix().asDiagonal() * a.C).transpose());
        G = G.selfadjointView<Eigen::Lower>();
        h = a.C.transpose() * (w.asDiagonal() * y);
    } else {
        G.setZero();
        G.selfadjointView<Eigen::Lower>().rankUpdate(a.C.transpose());
        G = G.selfadjointView<Eigen::Lower>();
        h = a.C.transpose() * y;
    }

    // proportional ridge keeps the unpenalized block solvable when one-hot
    // groups are collinear with the intercept
    Eigen::VectorXd fixed_ridge = Eigen::VectorXd::Zero(P);
    const Block& fb = a.blocks.front();
    for (std::size_t j = fb.begin; j < fb.begin + fb.size; ++j) {
        fixed_ridge[j] = 1e-8 * G(j, j) + 1e-12;
    }
    for (std::size_t s = 0; s < a.slope_col.size(); ++s) {
        const std::size_t j = a.slope_col[s];
        if (j != kNoSlope) fixed_ridge[j] = 1e-8 * G(j, j) + 1e-12;
    }

    const double var_ref = std::max(sigma2_init, 1e-12);

    SolveState st;
    st.block_sigma2 = std::move(block_sigma2_init);
    st.sigma2 = std::max(sigma2_init, 1e-12);

    std::size_t n_pen_blocks = 0;
    for (const Block& b : a.blocks) {
        if (b.kind != Block::Kind::fixed) ++n_pen_blocks;
    }
    if (st.block_sigma2.size() != n_pen_blocks) {
        st.block_sigma2.assign(n_pen_blocks, var_ref);
    }

    Eigen::VectorXd pen(P);
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    for (std::size_t iter = 0; iter < opts.max_outer; ++iter) {
        pen = fixed_ridge;
        std::size_t pb = 0;
        for (const Block& b : a.blocks) {
            if (b.kind == Block::Kind::fixed) continue;
            const double tau = st.sigma2 / std::max(st.block_sigma2[pb], 1e-10 * var_ref);
            for (std::size_t j = b.begin; j < b.begin + b.size; ++j) pen[j] = tau;
            ++pb;
        }

        Eigen::MatrixXd A = G;
        A.diagonal() += pen;
        ldlt.compute(A);
        st.gamma = ldlt.solve(h);

        const Eigen::MatrixXd Ainv = ldlt.solve(Eigen::MatrixXd::Identity(P, P));
        st.edf_per_col.resize(P);
        for (std::size_t j = 0; j < P; ++j) st.edf_per_col[j] = 1.0 - pen[j] * Ainv(j, j);
        st.edf_total = st.edf_per_col.sum();

        Eigen::VectorXd r = y - a.C * st.gamma;
        st.rss_w = weighted ? r.cwiseProduct(w.cwiseSqrt()).squaredNorm() : r.squaredNorm();

        const double denom = std::max(static_cast<double>(n) - st.edf_total, 1.0);
        const double sigma2_new = std::max(st.rss_w / denom, 1e-12 * var_ref);

        double max_rel = std::abs(sigma2_new - st.sigma2) / st.sigma2;
        pb = 0;
        std::vector<double> next = st.block_sigma2;
        for (const Block& b : a.blocks) {
            if (b.kind == Block::Kind::fixed) continue;
            if (opts.fixed_block_variance) {
                next[pb] = *opts.fixed_block_variance;
                ++pb;
                continue;
            }
            double norm2 = 0, edf = 0;
            for (std::size_t j = b.begin; j < b.begin + b.size; ++j) {
                norm2 += st.gamma[j] * st.gamma[j];
                edf += st.edf_per_col[j];
            }
            double s2 = norm2 / std::max(edf, 1e-8);
            s2 = std::max(s2, 1e-10 * var_ref);
            max_rel = std::max(max_rel, std::abs(s2 - next[pb]) / next[pb]);
            next[pb] = s2;
            ++pb;
        }
        st.sigma2 = sigma2_new;
        st.block_sigma2 = next;
        if (max_rel < opts.tol) {
            st.converged = true;
            break;
        }
    }
    st.penalties.assign(pen.data(), pen.data() + P);
    return st;
}

double variance_of(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    return (y.array() - mean).square().sum() / std::max<double>(y.size() - 1, 1);
}

GammFit build_fit(const Assembled& a, const SolveState& st, const GammFormula& formula,
                  Family family, double nu, const Eigen::VectorXd& y) {
    GammFit fit;
    fit.family = family;
    fit.nu = family == Family::student_t ? nu : 0.0;
    fit.formula = formula;
    fit.n_obs = static_cast<std::size_t>(y.size());
    fit.required_columns = a.required_columns;

    fit.intercept = st.gamma[0];
    for (std::size_t f = 1; f < a.fixed_cols.size(); ++f) {
        fit.fixed_coefs.emplace_back(a.fixed_cols[f].first, st.gamma[a.fixed_cols[f].second]);
    }

    fit.smooths = a.smooths;
    // block_sigma2 entries follow the listing order of the penalized blocks
    std::size_t pb = 0;
    for (const Block& b : a.blocks) {
        if (b.kind == Block::Kind::fixed) continue;
        double edf = 0;
        for (std::size_t j = b.begin; j < b.begin + b.size; ++j) edf += st.edf_per_col[j];
        if (b.kind == Block::Kind::smooth) {
            SmoothBlock& block = fit.smooths[b.smooth_index];
            block.sigma2 = st.block_sigma2[pb];
            block.coefs.assign(st.gamma.data() + b.begin, st.gamma.data() + b.begin + b.size);
            block.edf = edf;
            if (!block.slope_in_block) {
                const std::size_t sc = a.slope_col[b.smooth_index];
                block.slope = st.gamma[sc];
                block.edf += st.edf_per_col[sc];
            }
        } else {
            fit.sigma_b2 = st.block_sigma2[pb];
            fit.random_edf = edf;
            for (std::size_t s = 0; s < a.subjects.size(); ++s) {
                fit.random_intercepts[a.subjects[s]] = st.gamma[a.random_begin + s];
            }
        }
        ++pb;
    }

    fit.edf_total = st.edf_total;
    const double n = static_cast<double>(y.size());
    fit.sigma = std::sqrt(std::max(st.rss_w, 0.0) / std::max(n - st.edf_total, 1.0));

    Eigen::VectorXd mu = a.C * st.gamma;
    if (family == Family::gaussian) {
        const Eigen::VectorXd r = y - mu;
        const double sigma_ml = std::sqrt(std::max(r.squaredNorm() / n, 1e-24));
        double ll = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) ll += gaussian_logdensity(y[i], mu[i], sigma_ml);
        fit.loglik = ll;
        fit.n_params = st.edf_total + 1.0;
    } else {
        double ll = 0;
        const double sigma = std::max(fit.sigma, 1e-12);
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            ll += student_t_logdensity(y[i], mu[i], sigma, nu);
        }
        fit.loglik = ll;
        fit.n_params = st.edf_total + 2.0;
    }
    return fit;
}

} // namespace

GammFit fit_gamm(const DesignMatrix& design, const GammFormula& formula, Family family,
                 const GammOptions& opts) {
    if (design.response.size() != design.n_rows()) {
        throw SchemaError("design has no response aligned with its rows");
    }
    const Assembled a = assemble_model(design, formula);
    const std::size_t n = design.n_rows();
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = design.response[i];

    const double var0 = std::max(variance_of(y), 1e-12);
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(n);

    auto capture = [&](const SolveState& st, const Eigen::VectorXd& w) {
        if (!opts.capture) return;
        GammInternals& out = *opts.capture;
        out.model_matrix.assign(n, std::vector<double>(a.C.cols()));
        for (std::size_t i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < a.C.cols(); ++j) out.model_matrix[i][j] = a.C(i, j);
        }
        out.penalties = st.penalties;
        out.coefficients.assign(st.gamma.data(), st.gamma.data() + st.gamma.size());
        out.weights.assign(w.data(), w.data() + w.size());
        out.response.assign(y.data(), y.data() + y.size());
    };

    if (family == Family::gaussian) {
        SolveState st = penalized_solve(a, y, unit, false, opts, {}, var0);
        GammFit fit = build_fit(a, st, formula, family, 0.0, y);
        capture(st, unit);
        if (!st.converged) {
            throw ConvergenceError("gamm variance updates did not converge within " +
                                       std::to_string(opts.max_outer) + " iterations",
                                   fit);
        }
        return fit;
    }

    // Student-t: profile the nu grid, IRLS on the same inner solver
    GammFit best;
    bool have_best = false;
    for (const double nu : opts.nu_grid) {
        std::vector<double> block_sigma2;
        double sigma2 = var0;
        Eigen::VectorXd w = unit;
        SolveState st;
        Eigen::VectorXd gamma_prev;
        bool converged = false;
        for (std::size_t it = 0; it < opts.max_irls; ++it) {
            st = penalized_solve(a, y, w, true, opts, block_sigma2, sigma2);
            block_sigma2 = st.block_sigma2;
            sigma2 = st.sigma2;
            const Eigen::VectorXd r = y - a.C * st.gamma;
            const double s2 = std::max(sigma2, 1e-12 * var0);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = (nu + 1.0) / (nu + r[i] * r[i] / s2);
            }
            if (gamma_prev.size() == st.gamma.size()) {
                const double rel = (st.gamma - gamma_prev).norm() /
                                   std::max(gamma_prev.norm(), 1e-12);
                if (rel < opts.tol) {
                    converged = true;
                    break;
                }
            }
            gamma_prev = st.gamma;
        }
        GammFit fit = build_fit(a, st, formula, family, nu, y);
        if (!converged && !st.converged) {
            throw ConvergenceError("student-t gamm did not converge at nu=" + std::to_string(nu),
                                   fit);
        }
        if (!have_best || fit.loglik > best.loglik) {
            best = fit;
            have_best = true;
            capture(st, w);
        }
    }
    return best;
}

std::vector<double> predict_gamm(const GammFit& fit, const DesignMatrix& newdata,
                                 bool use_random) {
    for (const auto& name : fit.required_columns) {
        if (!newdata.has_col(name)) {
            throw SchemaError("prediction data lacks training column '" + name + "'");
        }
    }
    std::map<std::string, std::size_t> col_of;
    for (const auto& name : fit.required_columns) col_of[name] = newdata.col(name);

    std::vector<double> out;
    out.reserve(newdata.n_rows());
    for (std::size_t i = 0; i < newdata.n_rows(); ++i) {
        const auto& row = newdata.rows[i];
        double acc = fit.intercept;
        for (const auto& [name, beta] : fit.fixed_coefs) acc += beta * row[col_of.at(name)];
        for (const auto& block : fit.smooths) {
            double x = row[col_of.at(block.var)];
            if (!block.var2.empty()) x *= row[col_of.at(block.var2)];
            const double ind = block.by_column.empty() ? 1.0 : row[col_of.at(block.by_column)];
            acc += block.evaluate(x, ind);
        }
        if (use_random) {
            const auto it = fit.random_intercepts.find(newdata.subject_of_row[i]);
            if (it != fit.random_intercepts.end()) acc += it->second;
        }
        out.push_back(acc);
    }
    return out;
}

std::string GammFit::summary_json() const {
    json j;
    j["family"] = family_to_string(family);
    if (family == Family::student_t) j["nu"] = nu;
    j["coefficients"]["(Intercept)"] = intercept;
    for (const auto& [name, beta] : fixed_coefs) j["coefficients"][name] = beta;
    j["smooths"] = json::array();
    for (const auto& block : smooths) {
        j["smooths"].push_back({{"label", block.label},
                                {"edf", block.edf},
                                {"K", block.basis.K()},
                                {"sigma2", block.sigma2}});
    }
    if (!random_intercepts.empty()) {
        j["random_intercept"] = {{"groups", random_intercepts.size()},
                                 {"sigma_b2", sigma_b2},
                                 {"edf", random_edf}};
    }
    j["sigma"] = sigma;
    j["edf_total"] = edf_total;
    j["loglik"] = loglik;
    j["n_params"] = n_params;
    j["n_obs"] = n_obs;
    j["aic"] = aic(loglik, n_params);
    j["bic"] = bic(loglik, n_params, n_obs);
    return j.dump(2);
}

} // namespace hybev
