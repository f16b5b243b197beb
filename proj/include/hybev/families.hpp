#pragma once

#include <cstddef>

namespace hybev {

double gaussian_logdensity(double y, double mu, double sigma);

/// log density of the location-scale Student-t with nu degrees of
/// freedom; approaches the Gaussian as nu grows.
double student_t_logdensity(double y, double mu, double sigma, double nu);

/// -2*loglik + 2p. Smaller is better.
double aic(double loglik, double p);

/// -2*loglik + log(n)*p. Penalizes extra parameters harder than AIC once
/// n > e^2.
double bic(double loglik, double p, std::size_t n);

} // namespace hybev
