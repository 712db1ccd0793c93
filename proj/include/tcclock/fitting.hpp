#pragma once

#include <string>
#include <vector>

namespace tcclock {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::string model;  // "linear" | "log-log" | "resolution-vs-nu"
};

// Ordinary least squares y = m x + b.
FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y);

// Log-log linear fit ln y = m ln x + b; rejects non-positive data.
FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Time-crystal frequency in the macroscopic limit, (gamma0/2pi) sqrt(lambda^2-1).
double tc_frequency(double lambda, double gamma0);

// Least squares of R against nu(lambda); only lambda >= 1.1 points admitted.
FitResult fit_resolution(const std::vector<double>& lambdas,
                         const std::vector<double>& resolutions, double gamma0);

// Linear fit of M*/S against lambda over the lambda >= 1.3 window.
FitResult fit_threshold_scaling(const std::vector<double>& lambdas,
                                const std::vector<double>& optimal_thresholds,
                                double total_spin);

}  // namespace tcclock
