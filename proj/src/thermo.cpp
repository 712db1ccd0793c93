#include "tcclock/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace tcclock {

namespace {

double fidelity(const CVec& psi, const CMat& pi) {
    const double f = (psi.adjoint() * pi * psi)(0, 0).real();
    if (f < 1e-300)
        throw std::runtime_error("steady-state fidelity underflow: <psi|pi|psi> < 1e-300");
    return f;
}

double require_beta(const CollectiveOps& ops) {
    if (ops.params().zero_temperature)
        throw std::invalid_argument("entropy operations are undefined at zero temperature");
    return ops.params().beta;
}

// Counts of each jump kind in the half-open interval (t0, t1].
std::pair<long long, long long> count_jumps(const TrajectoryRecord& rec, double t0, double t1) {
    long long dm = 0, dp = 0;
    for (const auto& ev : rec.events) {
        if (ev.time <= t0) continue;
        if (ev.time > t1) break;
        (ev.kind == JumpKind::Emission ? dm : dp)++;
    }
    return {dm, dp};
}

const CVec& snapshot_at(const TrajectoryRecord& rec, double t) {
    for (const auto& s : rec.snapshots)
        if (s.time == t) return s.state;
    throw std::runtime_error("missing snapshot at tick boundary");
}

}  // namespace

double delta_s_psi(const CVec& psi1, const CVec& psi2, const CMat& pi) {
    return -std::log(fidelity(psi2, pi)) + std::log(fidelity(psi1, pi));
}

HeatWork heat_work(long long dn_minus, long long dn_plus,
                   const CVec& psi_start, const CVec& psi_end,
                   const CollectiveOps& ops) {
    HeatWork hw;
    hw.heat = static_cast<double>(dn_minus - dn_plus);  // omega_C = 1
    hw.delta_e = ops.energy(psi_end) - ops.energy(psi_start);
    hw.work = hw.delta_e + hw.heat;
    return hw;
}

double tick_entropy(const CVec& psi_start, const CVec& psi_end,
                    long long dn_minus, long long dn_plus,
                    const CMat& pi, double beta) {
    return delta_s_psi(psi_start, psi_end, pi) +
           beta * static_cast<double>(dn_minus - dn_plus);
}

JumpObserver make_tick_snapshotter(const CountingObservable& obs, int threshold) {
    if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
    auto state = std::make_shared<std::pair<long long, long long>>(0, threshold);
    const bool exact = obs.unit_increments();
    return [state, obs, threshold, exact](double, JumpKind kind, const CVec&) {
        state->first += obs.increment(kind);
        if (exact ? (state->first == state->second) : (state->first >= state->second)) {
            state->second += threshold;
            return true;
        }
        return false;
    };
}

ThermoLedger build_ledger(const TrajectoryRecord& record, const CollectiveOps& ops,
                          const SpectralNESS& ness, const CountingObservable& obs,
                          int threshold) {
    const double beta = require_beta(ops);
    const TickSeries ticks = extract_ticks(accumulate(record, obs), obs, threshold);
    ThermoLedger ledger;
    for (size_t i = 1; i < ticks.tick_times.size(); ++i) {
        const double t0 = ticks.tick_times[i - 1];
        const double t1 = ticks.tick_times[i];
        const CVec& s0 = snapshot_at(record, t0);
        const CVec& s1 = snapshot_at(record, t1);
        const auto [dm, dp] = count_jumps(record, t0, t1);
        TickLedgerEntry e;
        e.t_start = t0;
        e.t_end = t1;
        e.dn_minus = dm;
        e.dn_plus = dp;
        const HeatWork hw = heat_work(dm, dp, s0, s1, ops);
        e.heat = hw.heat;
        e.delta_e = hw.delta_e;
        e.work = hw.work;
        e.activity = static_cast<double>(dm + dp);
        e.ds_psi = delta_s_psi(s0, s1, ness.pi);
        e.s_tick = e.ds_psi + beta * e.heat;
        ledger.ticks.push_back(e);
    }
    return ledger;
}

std::vector<double> ft_tick_samples(const TrajectoryRecord& record, const CollectiveOps& ops,
                                    const SpectralNESS& ness, const CountingObservable& obs,
                                    int threshold) {
    const double beta = require_beta(ops);
    const TickSeries ticks = extract_ticks(accumulate(record, obs), obs, threshold);
    const size_t j = ticks.tick_times.size();
    if (j == 0) return {0.0};  // T1 = T2 = horizon
    std::vector<double> samples;
    if (j == 1) {
        const double t1 = ticks.tick_times[0];
        const auto [dm, dp] = count_jumps(record, t1, record.horizon);
        samples.push_back(
            tick_entropy(snapshot_at(record, t1), record.final_state, dm, dp, ness.pi, beta));
        return samples;
    }
    for (size_t i = 1; i < j; ++i) {
        const double t0 = ticks.tick_times[i - 1];
        const double t1 = ticks.tick_times[i];
        const auto [dm, dp] = count_jumps(record, t0, t1);
        samples.push_back(
            tick_entropy(snapshot_at(record, t0), snapshot_at(record, t1), dm, dp, ness.pi, beta));
    }
    return samples;
}

double first_tick_entropy(const TrajectoryRecord& record, const CollectiveOps& ops,
                          const SpectralNESS& ness, const CountingObservable& obs,
                          int threshold) {
    const double beta = require_beta(ops);
    const CVec psi0 = ness.eigenvectors.col(record.initial_eigenindex);
    const TickSeries ticks = extract_ticks(accumulate(record, obs), obs, threshold);
    double t1;
    const CVec* psi1;
    if (ticks.tick_times.empty()) {
        t1 = record.horizon;
        psi1 = &record.final_state;
    } else {
        t1 = ticks.tick_times[0];
        psi1 = &snapshot_at(record, t1);
    }
    const auto [dm, dp] = count_jumps(record, 0.0, t1);
    return tick_entropy(psi0, *psi1, dm, dp, ness.pi, beta);
}

double uncertainty_entropy(const CVec& psi, const SpectralNESS& ness, std::mt19937_64& rng) {
    const int d = static_cast<int>(psi.size());
    Eigen::VectorXd probs(d);
    for (int n = 0; n < d; ++n)
        probs[n] = std::norm((ness.eigenvectors.col(n).adjoint() * psi)(0, 0));
    probs /= probs.sum();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    int pick = d - 1;
    double acc = 0.0;
    for (int n = 0; n < d; ++n) {
        acc += probs[n];
        if (u < acc) { pick = n; break; }
    }
    return -std::log(ness.eigenvalues[pick]) + std::log(fidelity(psi, ness.pi));
}

FtEstimate ft_estimator(const std::vector<double>& entropy_samples, size_t trace_points) {
    FtEstimate est;
    const size_t n = entropy_samples.size();
    if (n == 0) return est;
    double sum = 0.0, sumsq = 0.0;
    const size_t stride = std::max<size_t>(1, n / std::max<size_t>(trace_points, 1));
    for (size_t i = 0; i < n; ++i) {
        const double x = std::exp(-entropy_samples[i]);
        sum += x;
        sumsq += x * x;
        if ((i + 1) % stride == 0 || i + 1 == n)
            est.trace.emplace_back(i + 1, sum / static_cast<double>(i + 1));
    }
    est.mean = sum / static_cast<double>(n);
    if (n > 1) {
        const double var = (sumsq - sum * sum / static_cast<double>(n)) / (static_cast<double>(n) - 1.0);
        est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
    return est;
}

BoundReport tur_kur_report(const MeritSummary& merit, const std::vector<ThermoLedger>& ledgers) {
    double s_sum = 0.0, s_sumsq = 0.0, k_sum = 0.0, k_sumsq = 0.0;
    double n = 0.0;
    for (const auto& l : ledgers)
        for (const auto& e : l.ticks) {
            s_sum += e.s_tick;
            s_sumsq += e.s_tick * e.s_tick;
            k_sum += e.activity;
            k_sumsq += e.activity * e.activity;
            n += 1.0;
        }
    if (n < 2.0) throw std::invalid_argument("tur_kur_report: need at least 2 ticks");

    BoundReport rep;
    rep.accuracy = merit.accuracy;
    rep.d_accuracy = merit.d_accuracy;
    rep.s_tick_mean = s_sum / n;
    rep.s_tick_se = std::sqrt(std::max((s_sumsq - s_sum * s_sum / n) / (n - 1.0), 0.0) / n);
    rep.k_tick_mean = k_sum / n;
    rep.k_tick_se = std::sqrt(std::max((k_sumsq - k_sum * k_sum / n) / (n - 1.0), 0.0) / n);

    auto excess = [&](double bound, double bound_se) {
        const double err = std::hypot(merit.d_accuracy, bound_se);
        return (merit.accuracy - bound) / std::max(err, 1e-300);
    };
    rep.tur_excess_sigma = excess(0.5 * rep.s_tick_mean, 0.5 * rep.s_tick_se);
    rep.kur_excess_sigma = excess(rep.k_tick_mean, rep.k_tick_se);
    rep.tur_holds = rep.tur_excess_sigma <= 2.0;
    rep.kur_holds = rep.kur_excess_sigma <= 2.0;
    return rep;
}

}  // namespace tcclock
