#pragma once

#include <random>
#include <utility>
#include <vector>

#include "tcclock/ticks.hpp"

namespace tcclock {

// Entropy change -ln<psi2|pi|psi2> + ln<psi1|pi|psi1> of the conditional
// wavefunction relative to the steady state.
double delta_s_psi(const CVec& psi1, const CVec& psi2, const CMat& pi);

// Energy bookkeeping for a record segment. H_C is diagonal in the Dicke
// basis; Q = omega_C (dN_- - dN_+) and W = dE + Q.
struct HeatWork {
    double heat;
    double delta_e;
    double work;
};

HeatWork heat_work(long long dn_minus, long long dn_plus,
                   const CVec& psi_start, const CVec& psi_end,
                   const CollectiveOps& ops);

// Martingale entropy production of a segment, dS_psi + beta*Q.
double tick_entropy(const CVec& psi_start, const CVec& psi_end,
                    long long dn_minus, long long dn_plus,
                    const CMat& pi, double beta);

// Per-tick thermodynamic ledger over the same tick set as the merit
// statistics (intervals [T_i, T_{i+1}], i >= 1).
struct TickLedgerEntry {
    double t_start, t_end;
    long long dn_minus, dn_plus;
    double heat;        // Q
    double activity;    // K_tick
    double ds_psi;
    double s_tick;
    double delta_e;
    double work;
};

struct ThermoLedger {
    std::vector<TickLedgerEntry> ticks;
};

// Requires the record to carry snapshots at tick boundaries (run the
// trajectory with make_tick_snapshotter). Rejects zero temperature.
ThermoLedger build_ledger(const TrajectoryRecord& record, const CollectiveOps& ops,
                          const SpectralNESS& ness, const CountingObservable& obs,
                          int threshold);

// Observer that requests a snapshot whenever N(t) completes a threshold.
JumpObserver make_tick_snapshotter(const CountingObservable& obs, int threshold);

// S_tick samples for the stopping-time fluctuation theorem, horizon-capped:
// multi-tick records contribute one sample per consecutive tick pair,
// single-tick records use T2 = horizon, no-tick records contribute 0.
std::vector<double> ft_tick_samples(const TrajectoryRecord& record, const CollectiveOps& ops,
                                    const SpectralNESS& ness, const CountingObservable& obs,
                                    int threshold);

// S_mar at the first tick (or at the horizon if no tick occurred).
double first_tick_entropy(const TrajectoryRecord& record, const CollectiveOps& ops,
                          const SpectralNESS& ness, const CountingObservable& obs,
                          int threshold);

// Uncertainty entropy production from a virtual projective outcome in the
// pi eigenbasis; the initial term vanishes for trajectories started in a
// pi eigenstate.
double uncertainty_entropy(const CVec& psi, const SpectralNESS& ness, std::mt19937_64& rng);

// Running estimate of <e^{-S}> versus sample count.
struct FtEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<std::pair<size_t, double>> trace;
};

FtEstimate ft_estimator(const std::vector<double>& entropy_samples, size_t trace_points = 50);

// Accuracy versus the TUR bound <S_tick>/2 and the KUR bound <K_tick>.
struct BoundReport {
    double accuracy, d_accuracy;
    double s_tick_mean, s_tick_se;
    double k_tick_mean, k_tick_se;
    bool tur_holds;          // A <= <S_tick>/2 within combined error
    bool kur_holds;          // A <= <K_tick> within combined error
    double tur_excess_sigma; // (A - <S_tick>/2) / combined error
    double kur_excess_sigma;
};

BoundReport tur_kur_report(const MeritSummary& merit, const std::vector<ThermoLedger>& ledgers);

}  // namespace tcclock
