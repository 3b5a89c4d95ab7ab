#pragma once

// Plain re-implementation of the indicator-factor allocation used as an oracle.
// It shares no code with the library: only the terminal samples are passed in.

#include <vector>

namespace reference {

struct Market {
    double mu_x, sigma_x, mu_y, sigma_y, rho, y0, t, k;
};

struct Allocation {
    double capital = 0.0;
    double success = 0.0;
    std::vector<double> x_max;
    std::vector<double> survival;  // conditional success at x_max, per sample
};

// For each sample, scan x = i K / n_x for the first maximizer of
// density * survival(x) - m x; then average.
Allocation straight_line(const Market& mk, const std::vector<double>& w, int n_x, double m);

// P(Y_T >= K - x | W^X_T = w) written out directly.
double survival(const Market& mk, double w, double x);

}  // namespace reference
