#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "tcclock/thermo.hpp"

namespace tcclock {

// Gaussian amplitude noise on the drive parameter: lambda(t) is piecewise
// constant, resampled every resample_dt, truncated at 0.
struct NoiseModel {
    double mean_lambda = 2.0;
    double sigma = 0.0;          // sqrt(Var[lambda])
    double resample_dt = 0.0;    // 0 -> default 1/(10 gamma0 lambda^2 S)

    double default_resample_dt(const ClockParams& p) const {
        const double rate = 10.0 * p.gamma0 * mean_lambda * mean_lambda * p.spin();
        return 1.0 / rate;
    }
    void validate() const;
};

// Figures of merit of the noisy classical drive itself.
struct RabiBenchmark {
    double resolution;   // (gamma0/2pi) <lambda>
    double accuracy;     // <lambda>^2 / Var[lambda], +inf at zero variance
    double fano;         // 1/(R A)
};

RabiBenchmark rabi_benchmark(const NoiseModel& noise, double gamma0);

// Read-mostly cache of per-lambda operators, steady states, and drift
// eigenbases, with lambda quantized to 1e-3.
class LambdaCache {
public:
    explicit LambdaCache(const ClockParams& base);

    struct Entry {
        std::unique_ptr<CollectiveOps> ops;
        std::unique_ptr<JumpEngine> engine;
        std::unique_ptr<SpectralNESS> ness;  // solved lazily
    };

    const Entry& engine_for(double lambda);
    const SpectralNESS& ness_for(double lambda);
    static double quantize(double lambda) { return std::round(lambda * 1000.0) / 1000.0; }

private:
    Entry& locate(double lambda);
    ClockParams base_;
    std::map<long, Entry> entries_;  // key = round(lambda * 1000)
    std::mutex mutex_;
};

// One lambda drawn per trajectory for initial-state sampling from pi_lambda;
// within the run, the jump operators are rebuilt with lambda(t) resampled
// every resample_dt. With sigma = 0 this reduces bit-identically to the
// noiseless engine. Fraction of truncated draws is reported via *truncated.
TrajectoryRecord run_noisy_trajectory(LambdaCache& cache, const NoiseModel& noise,
                                      double horizon, uint64_t seed,
                                      const JumpObserver& observer = nullptr,
                                      size_t* truncated = nullptr);

// Fano factor per observable across a noise grid, against the Rabi benchmark.
struct CrossoverRow {
    double sigma_rel;
    double fano_emissions, d_fano_emissions;
    double fano_activity, d_fano_activity;
    double fano_heat, d_fano_heat;
    double fano_rabi;
    double resolution_activity;
};

std::vector<CrossoverRow> crossover_scan(const ClockParams& params, double mean_lambda,
                                         const std::vector<double>& sigma_rel_grid,
                                         int threshold, int trajectories, double horizon,
                                         uint64_t master_seed);

}  // namespace tcclock
