#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tcclock/noise.hpp"

using namespace tcclock;

TEST_CASE("noise model validation") {
    NoiseModel n{2.0, -0.1, 0.0};
    CHECK_THROWS_AS(n.validate(), std::invalid_argument);
    n = {2.0, 0.1, -1.0};
    CHECK_THROWS_AS(n.validate(), std::invalid_argument);
    n = {2.0, 0.1, 0.0};
    n.validate();
}

TEST_CASE("default resample interval") {
    ClockParams p;
    p.spin2 = 50;
    p.gamma0 = 1e-3;
    NoiseModel n{2.0, 0.1, 0.0};
    // 1 / (10 gamma0 <lambda>^2 S) with S = 25.
    CHECK(n.default_resample_dt(p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rabi benchmark frozen values") {
    NoiseModel n{2.0, 0.2, 0.0};
    const RabiBenchmark b = rabi_benchmark(n, 1e-3);
    CHECK(b.resolution == doctest::Approx(3.1830988618379069e-4).epsilon(1e-12));
    CHECK(b.accuracy == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(b.fano == doctest::Approx(1.0 / (b.resolution * b.accuracy)).epsilon(1e-12));
}

TEST_CASE("noiseless drive has infinite accuracy") {
    const RabiBenchmark b = rabi_benchmark({1.5, 0.0, 0.0}, 1e-3);
    CHECK(std::isinf(b.accuracy));
    CHECK(b.fano == 0.0);
}

TEST_CASE("lambda quantization") {
    CHECK(LambdaCache::quantize(1.5004) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(LambdaCache::quantize(1.5006) == doctest::Approx(1.501).epsilon(1e-12));
    CHECK(LambdaCache::quantize(0.0) == 0.0);
}

TEST_CASE("zero-noise trajectories are bit-identical to the plain engine") {
    ClockParams p;
    p.spin2 = 10;
    p.lambda = 1.5;
    const CollectiveOps ops(p);
    const JumpEngine engine(ops);
    const SpectralNESS ness = steady_state(ops);

    LambdaCache cache(p);
    const NoiseModel quiet{p.lambda, 0.0, 0.0};
    for (uint64_t seed : {1ULL, 17ULL, 901ULL}) {
        const auto a = run_trajectory(engine, ness, 5000.0, seed);
        const auto b = run_noisy_trajectory(cache, quiet, 5000.0, seed);
        REQUIRE(a.events.size() == b.events.size());
        for (size_t i = 0; i < a.events.size(); ++i) {
            CHECK(a.events[i].time == b.events[i].time);
            CHECK(a.events[i].kind == b.events[i].kind);
        }
        CHECK(a.initial_eigenindex == b.initial_eigenindex);
        CHECK((a.final_state - b.final_state).norm() == 0.0);
    }
}

TEST_CASE("noisy trajectories are reproducible and actually noisy") {
    ClockParams p;
    p.spin2 = 10;
    p.lambda = 1.5;
    LambdaCache cache(p);
    const NoiseModel noise{p.lambda, 0.15, 0.0};

    const auto a = run_noisy_trajectory(cache, noise, 4000.0, 5);
    const auto b = run_noisy_trajectory(cache, noise, 4000.0, 5);
    REQUIRE(a.events.size() == b.events.size());
    for (size_t i = 0; i < a.events.size(); ++i) CHECK(a.events[i].time == b.events[i].time);

    // A different noise amplitude changes the record.
    const CollectiveOps ops(p);
    const JumpEngine engine(ops);
    const SpectralNESS ness = steady_state(ops);
    const auto quiet = run_trajectory(engine, ness, 4000.0, 5);
    bool differs = quiet.events.size() != a.events.size();
    for (size_t i = 0; !differs && i < a.events.size(); ++i)
        differs = quiet.events[i].time != a.events[i].time;
    CHECK(differs);
}

TEST_CASE("truncated draws are counted for strong noise") {
    ClockParams p;
    p.spin2 = 4;
    p.lambda = 0.3;
    LambdaCache cache(p);
    const NoiseModel noise{0.3, 1.0, 50.0};
    size_t truncated = 0;
    run_noisy_trajectory(cache, noise, 5000.0, 9, nullptr, &truncated);
    CHECK(truncated > 0);
}

TEST_CASE("lambda cache reuses entries and solves lazily") {
    ClockParams p;
    p.spin2 = 6;
    p.lambda = 1.0;
    LambdaCache cache(p);
    const auto& e1 = cache.engine_for(1.2341);
    const auto& e2 = cache.engine_for(1.2339);  // same key after quantization
    CHECK(&e1 == &e2);
    CHECK(e1.ops->params().lambda == doctest::Approx(1.234).epsilon(1e-12));
    const SpectralNESS& ness = cache.ness_for(1.2341);
    CHECK(ness.residual <= 1e-10);
}

TEST_CASE("crossover scan produces the rabi benchmark alongside clock fanos") {
    ClockParams p;
    p.spin2 = 8;
    p.lambda = 1.5;
    const auto rows = crossover_scan(p, 1.5, {0.05, 0.2}, 5, 12, 30000.0, 99);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sigma_rel == doctest::Approx(0.05));
    // Rabi fano grows quadratically with the noise amplitude.
    CHECK(rows[1].fano_rabi > rows[0].fano_rabi * 10.0);
    for (const auto& r : rows) {
        CHECK(r.fano_emissions > 0.0);
        CHECK(r.fano_activity > 0.0);
        CHECK(r.fano_heat > 0.0);
        CHECK(r.resolution_activity > 0.0);
    }
}
