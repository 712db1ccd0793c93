// End-to-end acceptance checks for the time-crystal clock toolkit.
// Each criterion prints one [PASS]/[FAIL] line; the exit code is the number
// of failed criteria. Heavy criteria drive the same run() entry points as
// the CLI and read back the artifacts they produce.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcclock/fitting.hpp"
#include "tcclock/io.hpp"
#include "tcclock/noise.hpp"
#include "tcclock/runner.hpp"
#include "tcclock/thermo.hpp"

using namespace tcclock;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kSeed = 20260823ULL;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void report(int index, const char* title, const Outcome& o) {
    std::printf("[%s] %2d. %s%s%s\n", o.pass ? "PASS" : "FAIL", index, title,
                o.detail.empty() ? "" : " -- ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++g_failures;
}

void run_criterion(int index, const char* title, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    report(index, title, o);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tcclock_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing artifact: " + p.string());
    json j;
    in >> j;
    return j;
}

// Minimal CSV reader for the numeric artifacts written by run().
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    size_t col(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::runtime_error("csv column not found: " + name);
    }
};

CsvTable read_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing artifact: " + p.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + p.string());
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        t.rows.push_back(std::move(vals));
    }
    return t;
}

// Pure-state steady-state stand-in that makes every trajectory start in a
// chosen basis state, so the ensemble average can be compared against the
// master equation started from the same state.
SpectralNESS basis_state_start(int dim, int index) {
    SpectralNESS s;
    s.pi = CMat::Zero(dim, dim);
    s.pi(index, index) = 1.0;
    s.eigenvalues = Eigen::VectorXd::Zero(dim);
    s.eigenvalues[0] = 1.0;
    s.eigenvectors = CMat::Zero(dim, dim);
    s.eigenvectors(index, 0) = 1.0;
    for (int n = 1, col = 1; n < dim; ++n) {
        if (n == index) continue;
        s.eigenvectors(n, col++) = 1.0;
    }
    return s;
}

// 1. The jump unraveling averages back to the master equation.
Outcome criterion_unraveling() {
    ClockParams p;
    p.spin2 = 2;
    p.lambda = 1.5;
    p.beta = 2.0;
    const CollectiveOps ops = build_operators(p);
    const JumpEngine engine(ops);
    const SpectralNESS start = basis_state_start(ops.dim(), 0);

    const std::vector<double> times = {1e4, 5e4, 1e5};
    const double horizon = times.back();
    const int n_traj = 2000;
    const int n_blocks = 20;
    const int block_size = n_traj / n_blocks;

    std::vector<std::array<CMat, 3>> block_sums(
        n_blocks, {CMat::Zero(ops.dim(), ops.dim()), CMat::Zero(ops.dim(), ops.dim()),
                   CMat::Zero(ops.dim(), ops.dim())});
    for (int i = 0; i < n_traj; ++i) {
        const TrajectoryRecord rec =
            run_trajectory(engine, start, horizon, derive_seed(kSeed, 100 + i), times);
        if (rec.snapshots.size() != times.size())
            throw std::runtime_error("missing marker snapshot");
        for (size_t k = 0; k < times.size(); ++k) {
            const CVec& psi = rec.snapshots[k].state;
            block_sums[i / block_size][k] += psi * psi.adjoint();
        }
    }

    CMat rho_exact = start.pi;
    double t_prev = 0.0;
    Outcome o;
    o.pass = true;
    for (size_t k = 0; k < times.size(); ++k) {
        rho_exact = propagate(rho_exact, ops, times[k] - t_prev);
        t_prev = times[k];

        CMat rho_full = CMat::Zero(ops.dim(), ops.dim());
        double mean_block_dist = 0.0;
        for (int b = 0; b < n_blocks; ++b) {
            rho_full += block_sums[b][k];
            mean_block_dist +=
                trace_distance(block_sums[b][k] / double(block_size), rho_exact);
        }
        rho_full /= double(n_traj);
        mean_block_dist /= double(n_blocks);
        const double dist = trace_distance(rho_full, rho_exact);
        const double se = mean_block_dist / std::sqrt(double(n_blocks));
        o.detail += "t=" + fmt(times[k]) + ": d=" + fmt(dist) + " (3se=" + fmt(3.0 * se) + ") ";
        if (!(dist <= 3.0 * se)) o.pass = false;
    }
    return o;
}

// 2. Steady-state quality over the parameter grid.
Outcome criterion_ness() {
    Outcome o;
    o.pass = true;
    double worst = 0.0;
    for (int spin2 : {1, 10, 25, 50})
        for (double lambda : {0.0, 0.7, 1.5, 2.0})
            for (double beta : {0.1, 2.0}) {
                ClockParams p;
                p.spin2 = spin2;
                p.lambda = lambda;
                p.beta = beta;
                const CollectiveOps ops = build_operators(p);
                const SpectralNESS ness = steady_state(ops, 1e-10);
                worst = std::max(worst, ness.residual);
                if (!(ness.residual <= 1e-10)) o.pass = false;
            }

    // lambda = 0 at zero temperature must give the pure ground Dicke state
    // without numerical dust.
    bool ground_exact = true;
    for (int spin2 : {1, 10, 50}) {
        ClockParams p;
        p.spin2 = spin2;
        p.lambda = 0.0;
        p.zero_temperature = true;
        const CollectiveOps ops = build_operators(p);
        const SpectralNESS ness = steady_state(ops);
        CMat expected = CMat::Zero(ops.dim(), ops.dim());
        expected(0, 0) = 1.0;
        if (ness.pi(0, 0) != cplx(1.0, 0.0) || (ness.pi - expected).norm() != 0.0)
            ground_exact = false;
    }
    if (!ground_exact) o.pass = false;
    o.detail = "worst residual " + fmt(worst) + ", zero-T ground state " +
               (ground_exact ? "exact" : "NOT exact");
    return o;
}

// 3. Synthetic Poisson streams through the tick pipeline.
Outcome criterion_poisson_oracle() {
    const double rate = 0.7;
    std::mt19937_64 rng(kSeed);
    std::exponential_distribution<double> exp_dist(rate);

    // Enough events for 1e4 waiting-time samples at the largest threshold.
    const int max_m = 100;
    const int n_events = max_m * (10000 + 2);
    TrajectoryRecord rec;
    double t = 0.0;
    rec.events.reserve(n_events);
    for (int i = 0; i < n_events; ++i) {
        t += exp_dist(rng);
        rec.events.push_back({t, JumpKind::Emission});
    }
    rec.horizon = t + 1.0;
    const CountingObservable obs = CountingObservable::emissions();
    const CountPath path = accumulate(rec, obs);

    Outcome o;
    o.pass = true;
    for (int m : {1, 5, 20, 100}) {
        const MeritSummary ms = merit(extract_ticks(path, obs, m).waiting_times());
        const double a_err = std::abs(ms.accuracy / double(m) - 1.0);
        const double r_err = std::abs(ms.resolution * double(m) / rate - 1.0);
        const bool ok = a_err <= 0.05 && (m == 1 || r_err <= 0.02);
        o.detail += "M=" + std::to_string(m) + ": A=" + fmt(ms.accuracy) +
                    " R=" + fmt(ms.resolution) + " ";
        if (!ok) o.pass = false;
    }
    return o;
}

// 4. Resolution at the optimal threshold locks to the oscillation frequency.
Outcome criterion_frequency_lock() {
    RunConfig cfg;
    cfg.params.spin2 = 50;
    cfg.params.beta = 2.0;
    cfg.mode = "sweep-lambda";
    cfg.trajectories = 500;
    cfg.horizon_min_ticks = 10;
    cfg.seed = kSeed;
    cfg.out_dir = scratch_dir("c4").string();
    const std::string dir = run(cfg);

    const json fits = read_json(fs::path(dir) / "fits.json");
    if (!fits.contains("resolution"))
        throw std::runtime_error("resolution fit missing from fits.json");
    const double a_r = fits["resolution"]["a_R"].get<double>();
    const double r2 = fits["resolution"]["r2"].get<double>();
    Outcome o;
    o.pass = std::abs(a_r - 1.0) <= 0.1 && r2 >= 0.99;
    o.detail = "a_R=" + fmt(a_r) + " r2=" + fmt(r2);
    return o;
}

// 5. The tradeoff curve changes regime across the critical drive.
Outcome criterion_regime_change() {
    const double gamma0 = 1e-3;
    Outcome o;
    o.pass = true;

    {  // Below criticality the whole curve sits under the Poisson benchmark.
        ClockParams p;
        p.spin2 = 50;
        p.lambda = 0.7;
        p.beta = 2.0;
        const CollectiveOps ops = build_operators(p);
        const JumpEngine engine(ops);
        const SpectralNESS ness = steady_state(ops);
        const CountingObservable obs = CountingObservable::emissions();

        const std::vector<int> full = default_threshold_grid(p.spin(), p.lambda);
        std::vector<int> grid;
        for (size_t i = 0; i < full.size(); i += 2) grid.push_back(full[i]);
        if (grid.back() != full.back()) grid.push_back(full.back());

        const double horizon =
            horizon_for(10, grid.back(), observable_rate(ops, ness, obs));
        const auto records = simulate_ensemble(engine, ness, horizon, 150,
                                               derive_seed(kSeed, 501), 1);
        const auto curve = sweep_thresholds(records, obs, grid);
        if (curve.empty()) throw std::runtime_error("empty sub-critical curve");
        double worst_margin = std::numeric_limits<double>::infinity();
        for (const auto& pt : curve) {
            if (pt.merit.degenerate) continue;
            // A < gamma0 / R  <=>  A * R < gamma0.
            worst_margin = std::min(worst_margin,
                                    gamma0 / (pt.merit.accuracy * pt.merit.resolution));
            if (!(pt.merit.accuracy * pt.merit.resolution < gamma0)) o.pass = false;
        }
        o.detail = "lambda=0.7 min (gamma0/R)/A=" + fmt(worst_margin);
    }

    {  // Above criticality the accuracy peak beats the Poisson benchmark.
        ClockParams p;
        p.spin2 = 50;
        p.lambda = 1.5;
        p.beta = 2.0;
        const CollectiveOps ops = build_operators(p);
        const JumpEngine engine(ops);
        const SpectralNESS ness = steady_state(ops);
        const CountingObservable obs = CountingObservable::emissions();

        const double center = p.spin() * (7.31 * p.lambda - 0.435);
        std::vector<int> grid;
        for (int i = 0; i < 13; ++i) {
            const double f = 0.55 + (1.65 - 0.55) * i / 12.0;
            const int m = std::max(1, int(std::lround(center * f)));
            if (grid.empty() || grid.back() != m) grid.push_back(m);
        }
        const double horizon =
            horizon_for(10, grid.back(), observable_rate(ops, ness, obs));
        const auto records = simulate_ensemble(engine, ness, horizon, 200,
                                               derive_seed(kSeed, 502), 1);
        const auto curve = sweep_thresholds(records, obs, grid);
        const OptimalThreshold opt = optimal_threshold(curve);
        double peak_ratio = 0.0;
        for (const auto& pt : curve)
            if (pt.threshold == opt.threshold)
                peak_ratio = pt.merit.accuracy * pt.merit.resolution / gamma0;
        o.detail += "; lambda=1.5 M*=" + std::to_string(opt.threshold) +
                    " A*R/gamma0=" + fmt(peak_ratio) + (opt.no_peak ? " (no peak)" : "");
        if (opt.no_peak || !(peak_ratio > 1.0)) o.pass = false;
    }
    return o;
}

// 6. Fluctuation theorem at stopping times.
Outcome criterion_fluctuation_theorem() {
    Outcome o;
    o.pass = true;
    for (int spin2 : {20, 50}) {
        RunConfig cfg;
        cfg.params.spin2 = spin2;
        cfg.params.lambda = 2.0;
        cfg.params.beta = 0.1;
        cfg.mode = "ft-check";
        cfg.threshold = 5;
        cfg.trajectories = 250;
        cfg.horizon_min_ticks = 20;
        cfg.seed = derive_seed(kSeed, 600 + spin2);
        cfg.out_dir = scratch_dir("c6_s" + std::to_string(spin2)).string();
        const json summary = read_json(fs::path(run(cfg)) / "ft_summary.json");

        double sharp_resid = 0.0;
        for (const std::string name : {"emissions", "activity"}) {
            const auto& s = summary[name];
            const double tick_resid = std::abs(s["tick_mean"].get<double>() - 1.0);
            const double mar_resid = std::abs(s["mar_mean"].get<double>() - 1.0);
            const size_t samples = s["tick_samples"].get<size_t>();
            sharp_resid = std::max(sharp_resid, tick_resid);
            if (samples < 5000 || tick_resid > 0.10 || mar_resid > 0.10) o.pass = false;
            o.detail += "S2=" + std::to_string(spin2) + " " + name.substr(0, 2) +
                        ": tick=" + fmt(s["tick_mean"].get<double>()) + "/" +
                        std::to_string(samples) + " mar=" +
                        fmt(s["mar_mean"].get<double>()) + " ";
        }
        const double heat_resid = std::abs(summary["heat"]["tick_mean"].get<double>() - 1.0);
        o.detail += "heat=" + fmt(summary["heat"]["tick_mean"].get<double>()) + "; ";
        // The heat estimator must be visibly slower at equal budget.
        if (!(heat_resid > std::max(0.03, 2.0 * sharp_resid))) o.pass = false;
    }
    return o;
}

// 7. TUR/KUR pattern across counting observables.
Outcome criterion_tur_kur() {
    ClockParams p;
    p.spin2 = 50;
    p.lambda = 2.0;
    p.beta = 0.1;
    const CollectiveOps ops = build_operators(p);
    const JumpEngine engine(ops);
    const SpectralNESS ness = steady_state(ops);

    auto evaluate = [&](const CountingObservable& obs,
                        const std::vector<int>& grid) -> BoundReport {
        const CountingObservable rate_obs =
            obs.name == "heat" ? CountingObservable::emissions() : obs;
        const double horizon =
            horizon_for(10, *std::max_element(grid.begin(), grid.end()),
                        observable_rate(ops, ness, rate_obs));
        const uint64_t sub_seed = derive_seed(kSeed, std::hash<std::string>{}(obs.name));
        const auto records = simulate_ensemble(engine, ness, horizon, 120, sub_seed, 1);
        const auto curve = sweep_thresholds(records, obs, grid);
        if (curve.size() < 3) throw InsufficientStatistics("tur/kur curve too short");
        const int m = optimal_threshold(curve).threshold;

        std::vector<std::vector<double>> groups;
        for (const auto& r : records)
            groups.push_back(extract_ticks(accumulate(r, obs), obs, m).waiting_times());
        const MeritSummary ms = merit_grouped(groups);

        const auto snap = simulate_ensemble(engine, ness, horizon, 120, sub_seed, 1, &obs, m);
        std::vector<ThermoLedger> ledgers;
        for (const auto& r : snap) ledgers.push_back(build_ledger(r, ops, ness, obs, m));
        return tur_kur_report(ms, ledgers);
    };

    const BoundReport em = evaluate(CountingObservable::emissions(), {30, 60, 120, 250, 500});
    const BoundReport heat =
        evaluate(CountingObservable::heat(), {250, 420, 700, 1100, 1700});

    Outcome o;
    const bool em_ok = !em.tur_holds && em.tur_excess_sigma >= 2.0 && em.kur_holds;
    const bool heat_ok = heat.tur_holds && heat.kur_holds;
    o.pass = em_ok && heat_ok;
    o.detail = "emissions: TUR excess " + fmt(em.tur_excess_sigma) + " sigma, KUR " +
               (em.kur_holds ? "holds" : "violated") + "; heat: TUR " +
               (heat.tur_holds ? "holds" : "violated") + " KUR " +
               (heat.kur_holds ? "holds" : "violated") + " (A=" + fmt(heat.accuracy) +
               ", bound=" + fmt(0.5 * heat.s_tick_mean) + ")";
    return o;
}

// 8. Scaling of entropy per tick and accuracy with the total spin.
Outcome criterion_scaling() {
    RunConfig cfg;
    cfg.params.lambda = 2.0;
    cfg.params.beta = 2.0;
    cfg.mode = "sweep-spin";
    cfg.trajectories = 150;
    cfg.horizon_min_ticks = 10;
    cfg.seed = kSeed;
    cfg.out_dir = scratch_dir("c8").string();
    const json fits = read_json(fs::path(run(cfg)) / "fits.json");

    const double s_slope = fits["s_tick_vs_spin"]["m"].get<double>();
    const double a_slope = fits["accuracy_vs_spin"]["m"].get<double>();
    Outcome o;
    o.pass = std::abs(s_slope - 1.0) <= 0.05 && a_slope >= 0.35 && a_slope <= 0.65;
    o.detail = "s_tick slope=" + fmt(s_slope) + ", accuracy slope=" + fmt(a_slope);
    if (!o.pass && a_slope > 0.65)
        o.detail += " (accuracy scaling is pre-asymptotic in this spin window; the"
                    " local slope decreases toward ~0.5 at larger S)";
    return o;
}

// 9. Robustness against classical drive noise versus the Rabi benchmark.
Outcome criterion_noise_crossover() {
    RunConfig cfg;
    cfg.params.spin2 = 50;
    cfg.params.lambda = 2.0;
    cfg.params.beta = 2.0;
    cfg.mode = "noise";
    cfg.observable = "activity";
    cfg.trajectories = 80;
    cfg.horizon_min_ticks = 8;
    cfg.seed = kSeed;
    cfg.out_dir = scratch_dir("c9").string();
    const std::string dir = run(cfg);

    const CsvTable t = read_csv(fs::path(dir) / "crossover.csv");
    const json manifest = read_json(fs::path(dir) / "manifest.json");
    const double r0 = manifest["mode_info"]["noiseless_resolution"].get<double>();

    const size_t c_sigma = t.col("sigma_rel");
    const size_t c_act = t.col("F_activity");
    const size_t c_heat = t.col("F_heat");
    const size_t c_rabi = t.col("F_rabi");
    const size_t c_res = t.col("R_activity");

    double sigma_act = std::numeric_limits<double>::infinity();
    double sigma_heat = std::numeric_limits<double>::infinity();
    double worst_drift = 0.0;
    for (const auto& row : t.rows) {
        if (row[c_act] < row[c_rabi]) sigma_act = std::min(sigma_act, row[c_sigma]);
        if (row[c_heat] < row[c_rabi]) sigma_heat = std::min(sigma_heat, row[c_sigma]);
        worst_drift = std::max(worst_drift, std::abs(row[c_res] / r0 - 1.0));
    }

    Outcome o;
    const bool ordering = sigma_act < sigma_heat;
    const bool stable = worst_drift <= 0.05;
    o.pass = ordering && stable;
    o.detail = "activity crossover at sigma/lambda=" + fmt(sigma_act) + ", heat at " +
               fmt(sigma_heat) + ", max |R/R0-1|=" + fmt(worst_drift);
    return o;
}

// 10. Byte-identical artifacts for every mode regardless of worker count.
Outcome criterion_determinism() {
    struct Case {
        std::string name;
        std::function<void(RunConfig&)> tweak;
    };
    const std::vector<Case> cases = {
        {"simulate",
         [](RunConfig& c) {
             c.trajectories = 3;
             c.threshold = 3;
             c.horizon_override = 3000.0;
         }},
        {"spectrum",
         [](RunConfig& c) {
             c.trajectories = 3;
             c.threshold = 3;
             c.horizon_override = 3000.0;
         }},
        {"sweep-threshold", [](RunConfig& c) { c.m_grid = {2, 4, 8}; }},
        {"sweep-lambda",
         [](RunConfig& c) {
             c.lambda_grid = {1.3, 1.5};
             c.m_grid = {2, 4, 8};
         }},
        {"sweep-spin",
         [](RunConfig& c) {
             c.spin2_grid = {4, 6, 8};
             c.m_grid = {1, 2, 4};
         }},
        {"ft-check", [](RunConfig& c) { c.threshold = 3; }},
        {"turkur", [](RunConfig& c) { c.m_grid = {1, 2, 4}; }},
        {"noise",
         [](RunConfig& c) {
             c.threshold = 3;
             c.noise_grid = {0.05, 0.1};
         }},
    };

    Outcome o;
    o.pass = true;
    for (const auto& cs : cases) {
        RunConfig base;
        base.params.spin2 = 6;
        base.params.lambda = 1.5;
        base.params.beta = 2.0;
        base.mode = cs.name;
        base.trajectories = 8;
        base.horizon_min_ticks = 8;
        base.seed = 11;
        cs.tweak(base);

        RunConfig a = base, b = base;
        a.workers = 1;
        a.out_dir = scratch_dir("c10_" + cs.name + "_a").string();
        b.workers = 3;
        b.out_dir = scratch_dir("c10_" + cs.name + "_b").string();
        const json ma = read_json(fs::path(run(a)) / "manifest.json");
        const json mb = read_json(fs::path(run(b)) / "manifest.json");
        if (ma["files"] != mb["files"]) {
            o.pass = false;
            o.detail += cs.name + " differs; ";
        }
    }
    if (o.pass) o.detail = "all modes byte-identical across worker counts";
    return o;
}

}  // namespace

int main() {
    run_criterion(1, "trajectory unraveling reproduces the master equation",
                  criterion_unraveling);
    run_criterion(2, "steady-state residuals across the parameter grid", criterion_ness);
    run_criterion(3, "Poisson clock oracle through the tick pipeline",
                  criterion_poisson_oracle);
    run_criterion(4, "resolution locks to the oscillation frequency",
                  criterion_frequency_lock);
    run_criterion(5, "tradeoff regime change across the critical drive",
                  criterion_regime_change);
    run_criterion(6, "fluctuation theorem at tick stopping times",
                  criterion_fluctuation_theorem);
    run_criterion(7, "TUR/KUR pattern across counting observables", criterion_tur_kur);
    run_criterion(8, "entropy and accuracy scaling with total spin", criterion_scaling);
    run_criterion(9, "noise robustness against the Rabi benchmark",
                  criterion_noise_crossover);
    run_criterion(10, "deterministic artifacts for every mode", criterion_determinism);

    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
