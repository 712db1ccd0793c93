#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "tcclock/liouville.hpp"
#include "tcclock/spin_core.hpp"

namespace tcclock {

enum class JumpKind : int8_t { Emission = 0, Absorption = 1 };

struct JumpEvent {
    double time;     // units 1/omega_C
    JumpKind kind;
};

struct Snapshot {
    double time;
    CVec state;      // unit norm
};

struct TrajectoryRecord {
    uint64_t seed = 0;
    int initial_eigenindex = -1;
    double horizon = 0.0;
    std::vector<JumpEvent> events;
    std::vector<Snapshot> snapshots;
    CVec final_state;   // state at the horizon, unit norm
};

// Called after every jump with the post-jump state; return true to store a
// snapshot at this time. The state reference is only valid during the call.
using JumpObserver = std::function<bool(double t, JumpKind kind, const CVec& psi)>;

// Precomputed eigenbasis of the no-jump drift generator
//   G = (gamma_-/S) L+L- + (gamma_+/S) L-L+,
// so the unnormalized state between jumps is psi(t) = V exp(-G t/2) V^dag psi(0)
// and the squared norm sum_i |w_i|^2 exp(-g_i t) is evaluated in O(d).
class JumpEngine {
public:
    explicit JumpEngine(const CollectiveOps& ops);

    const CollectiveOps& ops() const { return *ops_; }

    // Deterministic drift of the unnormalized state until its squared norm
    // crosses `target`, or until dt_max if it does not. `state` is
    // renormalized; `norm2` is the squared norm actually reached.
    struct Advance {
        double dt;
        bool crossed;
        CVec state;   // unit norm, pre-jump
        double norm2;
    };
    Advance advance(const CVec& psi, double dt_max, double target) const;

    // Channel choice at the crossing, proportional to (gamma_k/S)<L_k^dag L_k>,
    // and the renormalized post-jump state. u is a uniform variate in [0,1).
    std::pair<JumpKind, CVec> jump(const CVec& psi, double u) const;

    // One full step: pre-drawn norm target, drift with bisection to the
    // crossing, channel sampling, post-jump renormalization.
    struct StepResult {
        double dt;
        bool jumped;
        JumpKind kind;
        CVec state;   // unit norm
    };
    StepResult waiting_time_step(const CVec& psi, double dt_max, std::mt19937_64& rng) const;

    // Normalized state after drifting for dt < time of next crossing.
    CVec drift(const CVec& psi, double dt) const;

private:
    const CollectiveOps* ops_;
    Eigen::VectorXd gvals;   // eigenvalues of G, >= 0
    CMat gvecs;              // columns are eigenvectors
};

// Runs one monitored trajectory over [0, horizon]. The initial state is an
// eigenstate of pi sampled with probability pi_n. marker_times (sorted
// ascending) request snapshots of the conditional state at fixed times;
// the observer may request additional snapshots at jump times.
TrajectoryRecord run_trajectory(const JumpEngine& engine, const SpectralNESS& ness,
                                double horizon, uint64_t seed,
                                const std::vector<double>& marker_times = {},
                                const JumpObserver& observer = nullptr);

// Counter-derived seed for trajectory index i under a master seed, so results
// do not depend on worker scheduling.
uint64_t derive_seed(uint64_t master_seed, uint64_t index);

}  // namespace tcclock
