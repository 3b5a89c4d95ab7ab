#pragma once

// Standard normal distribution helpers shared by the market and success code.

namespace qhedge {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double norm_pdf(double z);
double norm_cdf(double z);

/// log Phi(z), finite for every finite z (asymptotic series deep in the left tail).
double log_norm_cdf(double z);

/// Inverse of Phi on (0, 1).
double norm_quantile(double u);

}  // namespace qhedge
