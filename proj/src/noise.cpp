#include "tcclock/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcclock {

void NoiseModel::validate() const {
    if (sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
    if (resample_dt < 0.0) throw std::invalid_argument("resample interval must be >= 0");
    if (mean_lambda < 0.0) throw std::invalid_argument("mean lambda must be >= 0");
}

RabiBenchmark rabi_benchmark(const NoiseModel& noise, double gamma0) {
    noise.validate();
    RabiBenchmark b;
    b.resolution = gamma0 / (2.0 * std::numbers::pi) * noise.mean_lambda;
    if (noise.sigma == 0.0) {
        b.accuracy = std::numeric_limits<double>::infinity();
        b.fano = 0.0;
        return b;
    }
    b.accuracy = noise.mean_lambda * noise.mean_lambda / (noise.sigma * noise.sigma);
    b.fano = 1.0 / (b.resolution * b.accuracy);
    return b;
}

LambdaCache::LambdaCache(const ClockParams& base) : base_(base) {}

LambdaCache::Entry& LambdaCache::locate(double lambda) {
    const long key = std::lround(lambda * 1000.0);
    std::lock_guard<std::mutex> lock(mutex_);
    Entry& e = entries_[key];
    if (!e.ops) {
        ClockParams p = base_;
        p.lambda = static_cast<double>(key) / 1000.0;
        e.ops = std::make_unique<CollectiveOps>(p);
        e.engine = std::make_unique<JumpEngine>(*e.ops);
    }
    return e;
}

const LambdaCache::Entry& LambdaCache::engine_for(double lambda) {
    return locate(lambda);
}

const SpectralNESS& LambdaCache::ness_for(double lambda) {
    Entry& e = locate(lambda);
    if (!e.ness)
        e.ness = std::make_unique<SpectralNESS>(steady_state(*e.ops));
    return *e.ness;
}

TrajectoryRecord run_noisy_trajectory(LambdaCache& cache, const NoiseModel& noise,
                                      double horizon, uint64_t seed,
                                      const JumpObserver& observer, size_t* truncated) {
    noise.validate();
    if (horizon <= 0.0) throw std::invalid_argument("run_noisy_trajectory: horizon must be > 0");
    const bool noisy = noise.sigma > 0.0;

    std::mt19937_64 rng(seed);
    // Independent stream for the noise draws so the dynamics stream is
    // untouched when sigma = 0.
    std::mt19937_64 noise_rng(derive_seed(seed, 0x6e6f697365ULL));
    std::normal_distribution<double> gauss(noise.mean_lambda, noise.sigma);
    auto draw_lambda = [&]() {
        double l = gauss(noise_rng);
        if (l < 0.0) {
            l = 0.0;
            if (truncated) ++*truncated;
        }
        return LambdaCache::quantize(l);
    };

    const double lambda0 = noisy ? draw_lambda() : LambdaCache::quantize(noise.mean_lambda);
    const SpectralNESS& ness0 = cache.ness_for(lambda0);

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.horizon = horizon;
    auto [n0, psi] = sample_initial(ness0, rng);
    rec.initial_eigenindex = n0;

    const double seg_dt = noisy ? (noise.resample_dt > 0.0
                                       ? noise.resample_dt
                                       : noise.default_resample_dt(cache.engine_for(lambda0).ops->params()))
                                : horizon;

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double t = 0.0;
    double lambda = lambda0;
    double seg_end = std::min(seg_dt, horizon);
    double target = unif(rng);
    double norm_acc = 1.0;  // squared-norm factor accumulated across segments

    while (t < horizon) {
        const JumpEngine& engine = *cache.engine_for(lambda).engine;
        const auto adv = engine.advance(psi, seg_end - t, target / norm_acc);
        t += adv.dt;
        psi = adv.state;
        if (adv.crossed) {
            auto [kind, post] = engine.jump(psi, unif(rng));
            psi = std::move(post);
            rec.events.push_back({t, kind});
            if (observer && observer(t, kind, psi))
                rec.snapshots.push_back({t, psi});
            target = unif(rng);
            norm_acc = 1.0;
        } else {
            if (t >= horizon) break;
            // Segment boundary: the norm target persists across the
            // piecewise-constant lambda change.
            norm_acc *= adv.norm2;
            if (noisy) lambda = draw_lambda();
            seg_end = std::min(t + seg_dt, horizon);
        }
    }
    rec.final_state = psi;
    return rec;
}

std::vector<CrossoverRow> crossover_scan(const ClockParams& params, double mean_lambda,
                                         const std::vector<double>& sigma_rel_grid,
                                         int threshold, int trajectories, double horizon,
                                         uint64_t master_seed) {
    std::vector<CrossoverRow> rows;
    for (size_t gi = 0; gi < sigma_rel_grid.size(); ++gi) {
        const double sigma_rel = sigma_rel_grid[gi];
        NoiseModel noise{mean_lambda, sigma_rel * mean_lambda, 0.0};
        LambdaCache cache(params);

        std::vector<TrajectoryRecord> records;
        records.reserve(trajectories);
        for (int i = 0; i < trajectories; ++i) {
            const uint64_t seed = derive_seed(master_seed, gi * 1000003ULL + i);
            records.push_back(run_noisy_trajectory(cache, noise, horizon, seed));
        }

        auto merit_for = [&](const CountingObservable& obs) {
            std::vector<std::vector<double>> groups;
            for (const auto& r : records)
                groups.push_back(extract_ticks(accumulate(r, obs), obs, threshold).waiting_times());
            return merit_grouped(groups);
        };
        const MeritSummary me = merit_for(CountingObservable::emissions());
        const MeritSummary ma = merit_for(CountingObservable::activity());
        const MeritSummary mh = merit_for(CountingObservable::heat());

        CrossoverRow row;
        row.sigma_rel = sigma_rel;
        row.fano_emissions = me.fano;
        row.d_fano_emissions = me.d_fano;
        row.fano_activity = ma.fano;
        row.d_fano_activity = ma.d_fano;
        row.fano_heat = mh.fano;
        row.d_fano_heat = mh.d_fano;
        row.fano_rabi = rabi_benchmark(noise, params.gamma0).fano;
        row.resolution_activity = ma.resolution;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tcclock
