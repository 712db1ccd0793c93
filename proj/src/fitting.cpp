#include "tcclock/fitting.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcclock {

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n != y.size() || n < 3)
        throw std::invalid_argument("fit_linear: need at least 3 matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double denom = nn * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");
    FitResult fit;
    fit.model = "linear";
    fit.slope = (nn * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / nn;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / nn;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_power_law: data must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    FitResult fit = fit_linear(lx, ly);
    fit.model = "log-log";
    return fit;
}

double tc_frequency(double lambda, double gamma0) {
    if (lambda < 1.0) throw std::invalid_argument("tc_frequency: lambda must be >= 1");
    return gamma0 / (2.0 * std::numbers::pi) * std::sqrt(lambda * lambda - 1.0);
}

FitResult fit_resolution(const std::vector<double>& lambdas,
                         const std::vector<double>& resolutions, double gamma0) {
    std::vector<double> nus, rs;
    for (size_t i = 0; i < lambdas.size(); ++i) {
        if (lambdas[i] < 1.1) continue;
        nus.push_back(tc_frequency(lambdas[i], gamma0));
        rs.push_back(resolutions[i]);
    }
    FitResult fit = fit_linear(nus, rs);
    fit.model = "resolution-vs-nu";
    return fit;
}

FitResult fit_threshold_scaling(const std::vector<double>& lambdas,
                                const std::vector<double>& optimal_thresholds,
                                double total_spin) {
    std::vector<double> ls, ms;
    for (size_t i = 0; i < lambdas.size(); ++i) {
        if (lambdas[i] < 1.3) continue;
        ls.push_back(lambdas[i]);
        ms.push_back(optimal_thresholds[i] / total_spin);
    }
    return fit_linear(ls, ms);
}

}  // namespace tcclock
