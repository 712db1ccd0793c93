#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcclock/noise.hpp"

namespace tcclock {

// Thrown when a run cannot produce the statistics it was asked for
// (e.g. zero ticks within the horizon). Maps to exit code 4.
class InsufficientStatistics : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ClockParams params;
    std::string mode = "simulate";
    std::string observable = "emissions";
    int threshold = 0;                 // fixed M; 0 -> use m_grid / default grid
    std::vector<int> m_grid;           // empty -> default_threshold_grid
    int trajectories = 100;
    int horizon_min_ticks = 20;        // horizon policy: largest M ticks >= this
    double horizon_override = 0.0;     // > 0 bypasses the policy
    uint64_t seed = 1;
    std::string out_dir = "out";
    unsigned workers = 1;
    double noise_sigma_rel = 0.05;
    double noise_dt = 0.0;
    std::vector<double> noise_grid;    // noise mode; empty -> {0.02..0.15}
    std::vector<double> lambda_grid;   // sweep-lambda
    std::vector<int> spin2_grid;       // sweep-spin

    void validate() const;
    static RunConfig from_json_file(const std::string& path);
    std::string to_json() const;
};

// Expected NESS rate of the counting observable per unit time.
double observable_rate(const CollectiveOps& ops, const SpectralNESS& ness,
                       const CountingObservable& obs);

// Horizon so the largest threshold yields at least min_ticks ticks.
double horizon_for(int min_ticks, int max_threshold, double rate);

// Deterministic ensemble: per-index counter-derived seeds, results deposited
// by index so the worker count never changes the output.
std::vector<TrajectoryRecord> simulate_ensemble(const JumpEngine& engine,
                                                const SpectralNESS& ness, double horizon,
                                                int count, uint64_t master_seed,
                                                unsigned workers,
                                                const CountingObservable* snapshot_obs = nullptr,
                                                int snapshot_threshold = 0);

// Executes one mode and writes data CSVs plus manifest.json into out_dir.
// Returns the artifact directory.
std::string run(const RunConfig& config);

}  // namespace tcclock
