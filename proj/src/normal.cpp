#include "qhedge/normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qhedge {

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_norm_cdf(double z) {
    if (z > -30.0) {
        return std::log(norm_cdf(z));
    }
    // Mills ratio expansion: Phi(z) = phi(z)/|z| * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 ...)
    const double r = 1.0 / (z * z);
    const double series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
    return -0.5 * z * z - kLogSqrt2Pi - std::log(-z) + std::log(series);
}

double norm_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw std::domain_error("norm_quantile: argument must lie in (0, 1)");
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace qhedge
