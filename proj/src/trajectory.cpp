#include "tcclock/trajectory.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace tcclock {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

uint64_t derive_seed(uint64_t master_seed, uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index + 1));
}

JumpEngine::JumpEngine(const CollectiveOps& ops) : ops_(&ops) {
    const double s = ops.params().spin();
    const double gm = ops.rates().gamma_minus / s;
    const double gp = ops.rates().gamma_plus / s;
    const CMat g = gm * (ops.l_plus() * ops.l_minus()) + gp * (ops.l_minus() * ops.l_plus());
    Eigen::SelfAdjointEigenSolver<CMat> es(g);
    gvals = es.eigenvalues().cwiseMax(0.0);
    gvecs = es.eigenvectors();
}

CVec JumpEngine::drift(const CVec& psi, double dt) const {
    CVec w = gvecs.adjoint() * psi;
    for (int i = 0; i < w.size(); ++i) w[i] *= std::exp(-0.5 * gvals[i] * dt);
    CVec out = gvecs * w;
    out.normalize();
    return out;
}

JumpEngine::Advance JumpEngine::advance(const CVec& psi, double dt_max, double target) const {
    const CVec w = gvecs.adjoint() * psi;
    const int d = static_cast<int>(w.size());
    Eigen::VectorXd p(d);
    for (int i = 0; i < d; ++i) p[i] = std::norm(w[i]);
    p /= p.sum();  // psi is unit norm up to roundoff

    auto norm2_at = [&](double t) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += p[i] * std::exp(-gvals[i] * t);
        return acc;
    };
    auto state_at = [&](double t) {
        CVec wt = w;
        for (int i = 0; i < d; ++i) wt[i] *= std::exp(-0.5 * gvals[i] * t);
        CVec out = gvecs * wt;
        out.normalize();
        return out;
    };

    Advance res;
    const double tail = norm2_at(dt_max);
    if (tail >= target) {
        res.dt = dt_max;
        res.crossed = false;
        res.state = state_at(dt_max);
        res.norm2 = tail;
        return res;
    }

    // Bisection on the monotone decreasing squared norm, tolerance 1e-10
    // on the norm target.
    double lo = 0.0, hi = dt_max;
    double mid = 0.5 * (lo + hi);
    double f = target;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        f = norm2_at(mid);
        if (std::abs(f - target) <= 1e-10) break;
        (f > target ? lo : hi) = mid;
        if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
    }
    if (!std::isfinite(mid))
        throw std::runtime_error("advance: bisection underflow");
    res.dt = mid;
    res.crossed = true;
    res.state = state_at(mid);
    res.norm2 = f;
    return res;
}

std::pair<JumpKind, CVec> JumpEngine::jump(const CVec& psi, double u) const {
    const double s = ops_->params().spin();
    const CVec down = ops_->apply_l_minus(psi);
    const CVec up = ops_->apply_l_plus(psi);
    const double rm = ops_->rates().gamma_minus / s * down.squaredNorm();
    const double rp = ops_->rates().gamma_plus / s * up.squaredNorm();
    const JumpKind kind = (u * (rm + rp) < rm) ? JumpKind::Emission : JumpKind::Absorption;
    CVec post = (kind == JumpKind::Emission) ? down : up;
    const double n = post.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::runtime_error("jump: non-finite post-jump amplitudes");
    post /= n;
    return {kind, std::move(post)};
}

JumpEngine::StepResult JumpEngine::waiting_time_step(const CVec& psi, double dt_max,
                                                     std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);  // pre-drawn norm target
    const Advance adv = advance(psi, dt_max, u);
    StepResult res;
    res.dt = adv.dt;
    if (!adv.crossed) {
        res.jumped = false;
        res.kind = JumpKind::Emission;
        res.state = adv.state;
        return res;
    }
    res.jumped = true;
    auto [kind, post] = jump(adv.state, unif(rng));
    res.kind = kind;
    res.state = std::move(post);
    return res;
}

TrajectoryRecord run_trajectory(const JumpEngine& engine, const SpectralNESS& ness,
                                double horizon, uint64_t seed,
                                const std::vector<double>& marker_times,
                                const JumpObserver& observer) {
    if (horizon <= 0.0) throw std::invalid_argument("run_trajectory: horizon must be > 0");
    std::mt19937_64 rng(seed);

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.horizon = horizon;

    auto [n0, psi] = sample_initial(ness, rng);
    rec.initial_eigenindex = n0;

    size_t next_marker = 0;
    double t = 0.0;
    while (t < horizon) {
        const auto step = engine.waiting_time_step(psi, horizon - t, rng);
        // Fixed-time snapshots inside the drift interval.
        while (next_marker < marker_times.size() &&
               marker_times[next_marker] <= t + step.dt && marker_times[next_marker] >= t) {
            rec.snapshots.push_back({marker_times[next_marker],
                                     engine.drift(psi, marker_times[next_marker] - t)});
            ++next_marker;
        }
        t += step.dt;
        psi = step.state;
        if (!step.jumped) break;  // reached the horizon without a crossing
        rec.events.push_back({t, step.kind});
        if (observer && observer(t, step.kind, psi))
            rec.snapshots.push_back({t, psi});
    }
    rec.final_state = psi;
    return rec;
}

}  // namespace tcclock
