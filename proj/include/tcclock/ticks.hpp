#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "tcclock/trajectory.hpp"

namespace tcclock {

// Integer weights for the accumulated count N(t) = a_- N_-(t) + a_+ N_+(t).
struct CountingObservable {
    int a_minus = 1;
    int a_plus = 0;
    std::string name = "emissions";

    int increment(JumpKind k) const {
        return k == JumpKind::Emission ? a_minus : a_plus;
    }
    bool unit_increments() const {
        return std::abs(a_minus) <= 1 && std::abs(a_plus) <= 1;
    }
    static CountingObservable emissions() { return {1, 0, "emissions"}; }
    static CountingObservable activity() { return {1, 1, "activity"}; }
    static CountingObservable heat() { return {1, -1, "heat"}; }
    static CountingObservable by_name(const std::string& name);
};

// Piecewise-constant integer count path; value is levels[i] on [times[i], times[i+1]).
struct CountPath {
    std::vector<double> times;   // jump times, ascending
    std::vector<long long> levels;  // N after each jump; N(0) = 0
    long long final_level() const { return levels.empty() ? 0 : levels.back(); }
};

CountPath accumulate(const TrajectoryRecord& record, const CountingObservable& obs);

// First-passage ticks: T_i = first time N(t) = i*M (exact level hit; the
// presets have unit increments so levels are not skipped). Observables with
// |a| > 1 use the first time N >= i*M instead.
struct TickSeries {
    int threshold = 1;
    std::vector<double> tick_times;
    bool empty() const { return tick_times.empty(); }
    // Waiting times T_{i+1} - T_i; the first interval [0, T_1] is excluded.
    std::vector<double> waiting_times() const;
};

TickSeries extract_ticks(const CountPath& path, const CountingObservable& obs, int threshold);

// Resolution R = 1/<T>, accuracy A = <T>^2/Var[T], Fano F = Var[T]/<T>.
// Standard errors by leave-one-trajectory-out jackknife when per-trajectory
// grouping is supplied.
struct MeritSummary {
    double resolution = 0.0;
    double accuracy = 0.0;
    double fano = 0.0;
    double d_resolution = 0.0;
    double d_accuracy = 0.0;
    double d_fano = 0.0;
    size_t samples = 0;
    bool degenerate = false;  // zero variance: accuracy reported as +inf
};

MeritSummary merit(const std::vector<double>& waits);
MeritSummary merit_grouped(const std::vector<std::vector<double>>& waits_per_trajectory);

struct TradeoffPoint {
    int threshold;
    MeritSummary merit;
};

// One merit point per threshold, pooling waits across trajectories.
std::vector<TradeoffPoint> sweep_thresholds(const std::vector<TrajectoryRecord>& records,
                                            const CountingObservable& obs,
                                            const std::vector<int>& thresholds);

// Default threshold grid: 40 log-spaced points, [S/2, 40 S] above criticality
// and [1, 100] below.
std::vector<int> default_threshold_grid(double total_spin, double lambda, int points = 40);

// Accuracy-peak threshold that also minimizes the Fano factor; peaks located
// by local-maximum scan after window-3 moving-median smoothing. Without a
// peak, returns the global Fano minimizer flagged as no-peak.
struct OptimalThreshold {
    int threshold;
    bool no_peak;
};

OptimalThreshold optimal_threshold(const std::vector<TradeoffPoint>& curve);

// |integral of N(t) e^{-i w t} dt| over [0, horizon] on the given grid.
std::vector<double> count_spectrum(const CountPath& path, double horizon,
                                   const std::vector<double>& omega_grid);

}  // namespace tcclock
