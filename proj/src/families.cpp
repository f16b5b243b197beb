#include "hybev/families.hpp"

#include "hybev/errors.hpp"

#include <cmath>

namespace hybev {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836; // log(2*pi)
}

double gaussian_logdensity(double y, double mu, double sigma) {
    if (sigma <= 0) throw DataError("sigma must be positive");
    const double z = (y - mu) / sigma;
    return -0.5 * kLogTwoPi - std::log(sigma) - 0.5 * z * z;
}

double student_t_logdensity(double y, double mu, double sigma, double nu) {
    if (sigma <= 0) throw DataError("sigma must be positive");
    if (nu <= 0) throw DataError("nu must be positive");
    const double z = (y - mu) / sigma;
    return std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
           0.5 * std::log(nu * M_PI) - std::log(sigma) -
           (nu + 1.0) / 2.0 * std::log1p(z * z / nu);
}

double aic(double loglik, double p) {
    return -2.0 * loglik + 2.0 * p;
}

double bic(double loglik, double p, std::size_t n) {
    return -2.0 * loglik + std::log(static_cast<double>(n)) * p;
}

} // namespace hybev
