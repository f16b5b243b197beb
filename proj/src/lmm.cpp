#include "hybev/lmm.hpp"

#include "hybev/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hybev {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

struct Groups {
    std::vector<double> n;  // group sizes
    std::vector<double> s;  // group response sums
    std::vector<double> q;  // group sums of squares
    double N = 0;
};

// Profiled restricted log-likelihood of the random-intercept model at
// variance ratio lambda = sigma_b^2 / sigma_w^2. Uses the closed forms
// |I + lambda*J| = 1 + lambda*n and (I + lambda*J)^-1 =
// I - lambda/(1+lambda*n) * J available per group.
struct ProfileEval {
    double loglik;
    double sigma_w2;
    double mean;
};

ProfileEval eval_profile(const Groups& g, double lambda) {
    double logdet = 0, c = 0, d = 0, yWy = 0;
    for (std::size_t i = 0; i < g.n.size(); ++i) {
        const double denom = 1.0 + lambda * g.n[i];
        logdet += std::log(denom);
        c += g.n[i] / denom;
        d += g.s[i] / denom;
        yWy += g.q[i] - lambda / denom * g.s[i] * g.s[i];
    }
    const double mean = d / c;
    const double rWr = std::max(yWy - d * d / c, 0.0);
    const double dof = g.N - 1.0;
    const double sigma_w2 = rWr / dof;
    double loglik;
    if (sigma_w2 <= 0) {
        loglik = std::numeric_limits<double>::infinity();
    } else {
        loglik = -0.5 * (dof * (kLogTwoPi + std::log(sigma_w2) + 1.0) + logdet + std::log(c));
    }
    return {loglik, sigma_w2, mean};
}

VarianceComponents anova_fallback(const Groups& g) {
    const double k = static_cast<double>(g.n.size());
    double grand_sum = 0;
    for (double s : g.s) grand_sum += s;
    const double grand = grand_sum / g.N;

    double ssw = 0, ssb = 0, sum_n2 = 0, mean_of_means = 0;
    for (std::size_t i = 0; i < g.n.size(); ++i) {
        const double gi = g.s[i] / g.n[i];
        ssw += g.q[i] - g.s[i] * g.s[i] / g.n[i];
        ssb += g.n[i] * (gi - grand) * (gi - grand);
        sum_n2 += g.n[i] * g.n[i];
        mean_of_means += gi;
    }
    mean_of_means /= k;
    const double msw = std::max(ssw, 0.0) / std::max(g.N - k, 1.0);
    const double msb = ssb / (k - 1.0);
    const double n0 = (g.N - sum_n2 / g.N) / (k - 1.0);

    VarianceComponents vc;
    vc.sigma_w2 = std::max(msw, 1e-12);
    vc.sigma_b2 = std::max((msb - msw) / n0, 0.0);
    vc.grand_mean = mean_of_means;
    vc.loglik_reml = eval_profile({g.n, g.s, g.q, g.N}, vc.sigma_b2 / vc.sigma_w2).loglik;
    return vc;
}

} // namespace

VarianceComponents fit_null_lmm(const std::vector<double>& y,
                                const std::vector<std::string>& group_of) {
    if (y.size() != group_of.size()) throw AlignmentError("response and grouping differ in length");
    if (y.empty()) throw DataError("empty response");

    std::map<std::string, std::size_t> index;
    Groups g;
    for (std::size_t j = 0; j < y.size(); ++j) {
        auto [it, inserted] = index.try_emplace(group_of[j], g.n.size());
        if (inserted) {
            g.n.push_back(0);
            g.s.push_back(0);
            g.q.push_back(0);
        }
        const std::size_t i = it->second;
        g.n[i] += 1;
        g.s[i] += y[j];
        g.q[i] += y[j] * y[j];
    }
    g.N = static_cast<double>(y.size());
    if (g.n.size() < 2) {
        throw IdentifiabilityError("variance components need at least two groups, got " +
                                   std::to_string(g.n.size()));
    }

    // degenerate: essentially no within-group noise
    double ssw = 0, sst = 0, grand_sum = 0;
    for (std::size_t i = 0; i < g.n.size(); ++i) {
        ssw += g.q[i] - g.s[i] * g.s[i] / g.n[i];
        grand_sum += g.s[i];
    }
    double qq = 0;
    for (std::size_t i = 0; i < g.n.size(); ++i) qq += g.q[i];
    sst = qq - grand_sum * grand_sum / g.N;
    if (sst <= 0) {
        // all observations identical
        VarianceComponents vc;
        vc.sigma_w2 = 1e-12;
        vc.sigma_b2 = 0.0;
        vc.grand_mean = grand_sum / g.N;
        vc.loglik_reml = 0.0;
        return vc;
    }
    if (ssw <= 1e-12 * sst) return anova_fallback(g);

    // coarse scan over log10(lambda), then golden-section refinement
    double best_u = -10.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    const ProfileEval at_zero = eval_profile(g, 0.0);
    for (double u = -10.0; u <= 10.0 + 1e-9; u += 0.1) {
        const double ll = eval_profile(g, std::pow(10.0, u)).loglik;
        if (ll > best_ll) {
            best_ll = ll;
            best_u = u;
        }
    }

    double lo = best_u - 0.15, hi = best_u + 0.15;
    const double golden = 0.61803398874989485;
    double u1 = hi - golden * (hi - lo);
    double u2 = lo + golden * (hi - lo);
    double f1 = eval_profile(g, std::pow(10.0, u1)).loglik;
    double f2 = eval_profile(g, std::pow(10.0, u2)).loglik;
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = u1;
            u1 = u2;
            f1 = f2;
            u2 = lo + golden * (hi - lo);
            f2 = eval_profile(g, std::pow(10.0, u2)).loglik;
        } else {
            hi = u2;
            u2 = u1;
            f2 = f1;
            u1 = hi - golden * (hi - lo);
            f1 = eval_profile(g, std::pow(10.0, u1)).loglik;
        }
    }
    const double u_star = 0.5 * (lo + hi);
    double lambda = std::pow(10.0, u_star);
    ProfileEval best = eval_profile(g, lambda);
    if (at_zero.loglik >= best.loglik) {
        lambda = 0.0;
        best = at_zero;
    }
    if (lambda >= 1e9) return anova_fallback(g); // ran into the cap

    VarianceComponents vc;
    vc.sigma_w2 = std::max(best.sigma_w2, 1e-12);
    vc.sigma_b2 = lambda * vc.sigma_w2;
    vc.grand_mean = best.mean;
    vc.loglik_reml = best.loglik;
    return vc;
}

VarianceComponents fit_null_lmm(const PanelDataset& panel, const std::string& response,
                                const std::string& grouping) {
    std::vector<double> y;
    std::vector<std::string> groups;
    for (const auto& trip : panel.trips) {
        const Channel* resp = channel_of(trip, response);
        if (resp == nullptr) {
            throw SchemaError("trip '" + trip.trip_id + "': response channel '" + response +
                              "' missing");
        }
        std::string label;
        if (grouping == "trip_id") {
            label = trip.trip_id;
        } else {
            const std::string* cat = categorical_of(trip, grouping);
            if (cat == nullptr || cat->empty()) {
                throw SchemaError("trip '" + trip.trip_id + "': grouping '" + grouping +
                                  "' missing");
            }
            label = *cat;
        }
        for (double v : *resp) {
            y.push_back(v);
            groups.push_back(label);
        }
    }
    return fit_null_lmm(y, groups);
}

double icc(const VarianceComponents& vc) {
    const double total = vc.sigma_b2 + vc.sigma_w2;
    if (total <= 0) throw UndefinedIccError("total variance is zero");
    return vc.sigma_b2 / total;
}

} // namespace hybev
