#include "tcclock/ticks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcclock {

CountingObservable CountingObservable::by_name(const std::string& name) {
    if (name == "emissions") return emissions();
    if (name == "activity") return activity();
    if (name == "heat") return heat();
    throw std::invalid_argument("unknown counting observable: " + name);
}

CountPath accumulate(const TrajectoryRecord& record, const CountingObservable& obs) {
    if (obs.a_minus == 0 && obs.a_plus == 0)
        throw std::invalid_argument("counting observable weights must not both be zero");
    CountPath path;
    path.times.reserve(record.events.size());
    path.levels.reserve(record.events.size());
    long long n = 0;
    for (const auto& ev : record.events) {
        n += obs.increment(ev.kind);
        path.times.push_back(ev.time);
        path.levels.push_back(n);
    }
    return path;
}

std::vector<double> TickSeries::waiting_times() const {
    std::vector<double> waits;
    for (size_t i = 1; i < tick_times.size(); ++i)
        waits.push_back(tick_times[i] - tick_times[i - 1]);
    return waits;
}

TickSeries extract_ticks(const CountPath& path, const CountingObservable& obs, int threshold) {
    if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
    TickSeries series;
    series.threshold = threshold;
    const bool exact = obs.unit_increments();
    long long next = threshold;
    for (size_t i = 0; i < path.times.size(); ++i) {
        const long long n = path.levels[i];
        if (exact ? (n == next) : (n >= next)) {
            series.tick_times.push_back(path.times[i]);
            next += threshold;
        }
    }
    return series;
}

namespace {

struct Moments {
    double n = 0.0, sum = 0.0, sumsq = 0.0;
    void add(double x) { n += 1.0; sum += x; sumsq += x * x; }
    void add(const Moments& o) { n += o.n; sum += o.sum; sumsq += o.sumsq; }
    void subtract(const Moments& o) { n -= o.n; sum -= o.sum; sumsq -= o.sumsq; }
    double mean() const { return sum / n; }
    double var() const { return (sumsq - sum * sum / n) / (n - 1.0); }
};

MeritSummary merit_from_moments(const Moments& m) {
    MeritSummary out;
    out.samples = static_cast<size_t>(m.n);
    if (m.n < 2.0) throw std::invalid_argument("merit: need at least 2 waiting times");
    const double mean = m.mean();
    const double var = m.var();
    out.resolution = 1.0 / mean;
    if (var <= 0.0) {
        out.degenerate = true;
        out.accuracy = std::numeric_limits<double>::infinity();
        out.fano = 0.0;
        return out;
    }
    out.accuracy = mean * mean / var;
    out.fano = var / mean;
    return out;
}

}  // namespace

MeritSummary merit(const std::vector<double>& waits) {
    Moments m;
    for (double w : waits) m.add(w);
    return merit_from_moments(m);
}

MeritSummary merit_grouped(const std::vector<std::vector<double>>& groups) {
    Moments total;
    std::vector<Moments> per_group;
    for (const auto& g : groups) {
        Moments m;
        for (double w : g) m.add(w);
        if (m.n > 0.0) {
            per_group.push_back(m);
            total.add(m);
        }
    }
    MeritSummary out = merit_from_moments(total);
    // Leave-one-trajectory-out jackknife: waits within a trajectory are
    // correlated, so i.i.d. errors would be too optimistic.
    const size_t j = per_group.size();
    if (j < 2 || out.degenerate) return out;
    std::vector<double> rs, as, fs;
    for (const auto& g : per_group) {
        Moments loo = total;
        loo.subtract(g);
        if (loo.n < 2.0) return out;
        const MeritSummary ms = merit_from_moments(loo);
        if (ms.degenerate) return out;
        rs.push_back(ms.resolution);
        as.push_back(ms.accuracy);
        fs.push_back(ms.fano);
    }
    auto jk_se = [j](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(j);
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt((static_cast<double>(j) - 1.0) / static_cast<double>(j) * ss);
    };
    out.d_resolution = jk_se(rs);
    out.d_accuracy = jk_se(as);
    out.d_fano = jk_se(fs);
    return out;
}

std::vector<TradeoffPoint> sweep_thresholds(const std::vector<TrajectoryRecord>& records,
                                            const CountingObservable& obs,
                                            const std::vector<int>& thresholds) {
    std::vector<CountPath> paths;
    paths.reserve(records.size());
    for (const auto& r : records) paths.push_back(accumulate(r, obs));

    std::vector<TradeoffPoint> curve;
    for (int m : thresholds) {
        std::vector<std::vector<double>> groups;
        for (const auto& p : paths)
            groups.push_back(extract_ticks(p, obs, m).waiting_times());
        size_t total = 0;
        for (const auto& g : groups) total += g.size();
        if (total < 2) continue;  // empty-series flag: point dropped
        curve.push_back({m, merit_grouped(groups)});
    }
    return curve;
}

std::vector<int> default_threshold_grid(double total_spin, double lambda, int points) {
    double lo, hi;
    if (lambda > 1.0) {
        lo = std::max(1.0, total_spin / 2.0);
        hi = 40.0 * total_spin;
    } else {
        lo = 1.0;
        hi = 100.0;
    }
    std::vector<int> grid;
    for (int i = 0; i < points; ++i) {
        const double x = lo * std::pow(hi / lo, points == 1 ? 0.0 : i / double(points - 1));
        const int m = std::max(1, static_cast<int>(std::lround(x)));
        if (grid.empty() || grid.back() != m) grid.push_back(m);
    }
    return grid;
}

OptimalThreshold optimal_threshold(const std::vector<TradeoffPoint>& curve) {
    const size_t n = curve.size();
    if (n < 3) throw std::invalid_argument("optimal_threshold: need at least 3 points");

    auto median3 = [](double a, double b, double c) {
        return std::max(std::min(a, b), std::min(std::max(a, b), c));
    };
    std::vector<double> smooth(n);
    smooth[0] = curve[0].merit.accuracy;
    smooth[n - 1] = curve[n - 1].merit.accuracy;
    for (size_t i = 1; i + 1 < n; ++i)
        smooth[i] = median3(curve[i - 1].merit.accuracy, curve[i].merit.accuracy,
                            curve[i + 1].merit.accuracy);

    std::vector<size_t> peaks;
    for (size_t i = 1; i + 1 < n; ++i) {
        if (smooth[i] >= smooth[i - 1] && smooth[i] >= smooth[i + 1] &&
            (smooth[i] > smooth[i - 1] || smooth[i] > smooth[i + 1]))
            peaks.push_back(i);
    }

    if (peaks.empty()) {
        size_t best = 0;
        for (size_t i = 1; i < n; ++i)
            if (curve[i].merit.fano < curve[best].merit.fano) best = i;
        return {curve[best].threshold, true};
    }
    size_t best = peaks[0];
    for (size_t i : peaks)
        if (curve[i].merit.fano < curve[best].merit.fano) best = i;
    return {curve[best].threshold, false};
}

std::vector<double> count_spectrum(const CountPath& path, double horizon,
                                   const std::vector<double>& omega_grid) {
    std::vector<double> mag(omega_grid.size(), 0.0);
    for (size_t k = 0; k < omega_grid.size(); ++k) {
        const double w = omega_grid[k];
        cplx acc(0.0, 0.0);
        for (size_t j = 0; j < path.times.size(); ++j) {
            const double t0 = path.times[j];
            const double t1 = (j + 1 < path.times.size()) ? path.times[j + 1] : horizon;
            const double n = static_cast<double>(path.levels[j]);
            if (w == 0.0) {
                acc += n * (t1 - t0);
            } else {
                const cplx iw(0.0, w);
                acc += n * (std::exp(-iw * t0) - std::exp(-iw * t1)) / iw;
            }
        }
        mag[k] = std::abs(acc);
    }
    return mag;
}

}  // namespace tcclock
