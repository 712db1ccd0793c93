#include "tcclock/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

#include "json.hpp"
#include "tcclock/fitting.hpp"
#include "tcclock/io.hpp"

namespace tcclock {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr const char* kVersion = "1.0.0";
}

void RunConfig::validate() const {
    params.validate();
    static const char* modes[] = {"simulate", "sweep-threshold", "sweep-lambda",
                                  "sweep-spin", "ft-check", "turkur", "noise", "spectrum"};
    bool ok = false;
    for (const char* m : modes) ok |= (mode == m);
    if (!ok) throw std::invalid_argument("unknown mode: " + mode);
    CountingObservable::by_name(observable);
    if (trajectories < 1) throw std::invalid_argument("trajectories must be >= 1");
    if (threshold < 0) throw std::invalid_argument("threshold must be >= 0");
    if (horizon_min_ticks < 1) throw std::invalid_argument("horizon-min-ticks must be >= 1");
    if (out_dir.empty()) throw std::invalid_argument("output directory must be set");
}

namespace {

json params_to_json(const ClockParams& p) {
    return json{{"spin2", p.spin2},
                {"lambda", p.lambda},
                {"gamma0", p.gamma0},
                {"beta", p.beta},
                {"zero_temperature", p.zero_temperature}};
}

ClockParams params_from_json(const json& j, ClockParams base) {
    if (j.contains("spin2")) base.spin2 = j["spin2"].get<int>();
    if (j.contains("lambda")) base.lambda = j["lambda"].get<double>();
    if (j.contains("gamma0")) base.gamma0 = j["gamma0"].get<double>();
    if (j.contains("beta")) base.beta = j["beta"].get<double>();
    if (j.contains("zero_temperature")) base.zero_temperature = j["zero_temperature"].get<bool>();
    return base;
}

}  // namespace

std::string RunConfig::to_json() const {
    json j = params_to_json(params);
    j["mode"] = mode;
    j["observable"] = observable;
    j["threshold"] = threshold;
    j["m_grid"] = m_grid;
    j["trajectories"] = trajectories;
    j["horizon_min_ticks"] = horizon_min_ticks;
    j["horizon_override"] = horizon_override;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["workers"] = workers;
    j["noise_sigma_rel"] = noise_sigma_rel;
    j["noise_dt"] = noise_dt;
    j["noise_grid"] = noise_grid;
    j["lambda_grid"] = lambda_grid;
    j["spin2_grid"] = spin2_grid;
    return j.dump(2);
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    cfg.params = params_from_json(j, cfg.params);
    if (j.contains("mode")) cfg.mode = j["mode"].get<std::string>();
    if (j.contains("observable")) cfg.observable = j["observable"].get<std::string>();
    if (j.contains("threshold")) cfg.threshold = j["threshold"].get<int>();
    if (j.contains("m_grid")) cfg.m_grid = j["m_grid"].get<std::vector<int>>();
    if (j.contains("trajectories")) cfg.trajectories = j["trajectories"].get<int>();
    if (j.contains("horizon_min_ticks")) cfg.horizon_min_ticks = j["horizon_min_ticks"].get<int>();
    if (j.contains("horizon_override")) cfg.horizon_override = j["horizon_override"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<unsigned>();
    if (j.contains("noise_sigma_rel")) cfg.noise_sigma_rel = j["noise_sigma_rel"].get<double>();
    if (j.contains("noise_dt")) cfg.noise_dt = j["noise_dt"].get<double>();
    if (j.contains("noise_grid")) cfg.noise_grid = j["noise_grid"].get<std::vector<double>>();
    if (j.contains("lambda_grid")) cfg.lambda_grid = j["lambda_grid"].get<std::vector<double>>();
    if (j.contains("spin2_grid")) cfg.spin2_grid = j["spin2_grid"].get<std::vector<int>>();
    return cfg;
}

double observable_rate(const CollectiveOps& ops, const SpectralNESS& ness,
                       const CountingObservable& obs) {
    const double s = ops.params().spin();
    const double re = ops.rates().gamma_minus / s *
                      (ops.l_plus() * ops.l_minus() * ness.pi).trace().real();
    const double ra = ops.rates().gamma_plus / s *
                      (ops.l_minus() * ops.l_plus() * ness.pi).trace().real();
    return obs.a_minus * re + obs.a_plus * ra;
}

double horizon_for(int min_ticks, int max_threshold, double rate) {
    if (!(rate > 0.0))
        throw InsufficientStatistics("counting observable has non-positive mean rate");
    // 1.5 margin over the mean requirement.
    return 1.5 * static_cast<double>(min_ticks) * static_cast<double>(max_threshold) / rate;
}

std::vector<TrajectoryRecord> simulate_ensemble(const JumpEngine& engine,
                                                const SpectralNESS& ness, double horizon,
                                                int count, uint64_t master_seed,
                                                unsigned workers,
                                                const CountingObservable* snapshot_obs,
                                                int snapshot_threshold) {
    std::vector<TrajectoryRecord> records(count);
    parallel_for(static_cast<size_t>(count), workers, [&](size_t i) {
        const uint64_t seed = derive_seed(master_seed, i);
        JumpObserver observer;
        if (snapshot_obs && snapshot_threshold > 0)
            observer = make_tick_snapshotter(*snapshot_obs, snapshot_threshold);
        records[i] = run_trajectory(engine, ness, horizon, seed, {}, observer);
    });
    return records;
}

namespace {

struct ModeContext {
    const RunConfig& cfg;
    fs::path dir;
    std::vector<fs::path> files;
    json extra;  // mode-specific manifest entries

    fs::path file(const std::string& name) {
        files.push_back(dir / name);
        return files.back();
    }
};

struct Built {
    CollectiveOps ops;
    JumpEngine engine;
    SpectralNESS ness;
    explicit Built(const ClockParams& p)
        : ops(build_operators(p)), engine(ops), ness(steady_state(ops)) {}
};

std::vector<int> grid_for(const RunConfig& cfg, const ClockParams& p) {
    if (cfg.threshold > 0) return {cfg.threshold};
    if (!cfg.m_grid.empty()) return cfg.m_grid;
    return default_threshold_grid(p.spin(), p.lambda);
}

// Focused grid around the linear threshold-scaling guess, for sweeps where
// only the peak region matters.
std::vector<int> focused_grid(double s, double lambda, int points = 13) {
    const double center = s * (7.31 * lambda - 0.435);
    if (!(center >= 2.0)) return default_threshold_grid(s, lambda);
    std::vector<int> grid;
    for (int i = 0; i < points; ++i) {
        const double f = 0.55 + (1.65 - 0.55) * i / double(points - 1);
        const int m = std::max(1, static_cast<int>(std::lround(center * f)));
        if (grid.empty() || grid.back() != m) grid.push_back(m);
    }
    return grid;
}

double horizon_policy(const RunConfig& cfg, const Built& b, const CountingObservable& obs,
                      int max_m) {
    if (cfg.horizon_override > 0.0) return cfg.horizon_override;
    return horizon_for(cfg.horizon_min_ticks, max_m, observable_rate(b.ops, b.ness, obs));
}

void write_tradeoff_csv(ModeContext& ctx, const std::string& name,
                        const std::vector<TradeoffPoint>& curve) {
    CsvWriter csv(ctx.file(name), {"M", "R", "A", "F", "dR", "dA", "dF"});
    for (const auto& p : curve)
        csv.row({static_cast<double>(p.threshold), p.merit.resolution, p.merit.accuracy,
                 p.merit.fano, p.merit.d_resolution, p.merit.d_accuracy, p.merit.d_fano});
}

MeritSummary merit_at(const std::vector<TrajectoryRecord>& records,
                      const CountingObservable& obs, int m) {
    std::vector<std::vector<double>> groups;
    for (const auto& r : records)
        groups.push_back(extract_ticks(accumulate(r, obs), obs, m).waiting_times());
    size_t total = 0;
    for (const auto& g : groups) total += g.size();
    if (total < 2) throw InsufficientStatistics("fewer than 2 waiting times at threshold");
    return merit_grouped(groups);
}

void mode_simulate(ModeContext& ctx, bool spectrum_only) {
    const RunConfig& cfg = ctx.cfg;
    const Built b(cfg.params);
    const CountingObservable obs = CountingObservable::by_name(cfg.observable);
    double horizon = horizon_policy(cfg, b, obs, std::max(cfg.threshold, 1));
    if (cfg.params.lambda > 1.05 && cfg.horizon_override <= 0.0) {
        // At least ten oscillation periods for a usable spectrum.
        horizon = std::max(horizon, 12.0 / tc_frequency(cfg.params.lambda, cfg.params.gamma0));
    }
    const auto records =
        simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories, cfg.seed, cfg.workers);

    if (!spectrum_only) {
        for (size_t i = 0; i < records.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "record_%04zu.csv", i);
            CsvWriter csv(ctx.file(name), {"t", "kind"});
            for (const auto& ev : records[i].events)
                csv.row({ev.time, ev.kind == JumpKind::Emission ? -1.0 : 1.0});
            std::snprintf(name, sizeof(name), "record_%04zu.json", i);
            json side;
            side["seed"] = records[i].seed;
            side["params"] = params_to_json(cfg.params);
            side["horizon"] = records[i].horizon;
            side["initial_eigenindex"] = records[i].initial_eigenindex;
            std::vector<double> snap_times;
            for (const auto& s : records[i].snapshots) snap_times.push_back(s.time);
            side["snapshot_times"] = snap_times;
            std::ofstream out(ctx.file(name));
            out << side.dump(2) << "\n";
        }
    }

    // Fourier magnitude of the emission count path, averaged over records.
    const int grid_n = 400;
    std::vector<double> omega(grid_n);
    for (int i = 0; i < grid_n; ++i)
        omega[i] = 5.0 * cfg.params.gamma0 * i / double(grid_n - 1);
    std::vector<double> avg(grid_n, 0.0);
    const CountingObservable em = CountingObservable::emissions();
    for (const auto& r : records) {
        const auto mag = count_spectrum(accumulate(r, em), horizon, omega);
        for (int i = 0; i < grid_n; ++i) avg[i] += mag[i];
    }
    for (double& v : avg) v /= static_cast<double>(records.size());
    CsvWriter spec_csv(ctx.file("spectrum.csv"), {"omega", "magnitude"});
    for (int i = 0; i < grid_n; ++i) spec_csv.row({omega[i], avg[i]});

    ctx.extra["horizon"] = horizon;
    {
        CsvWriter pi_csv(ctx.file("ness_spectrum.csv"), {"n", "pi_n"});
        for (int n = 0; n < b.ness.eigenvalues.size(); ++n)
            pi_csv.row({static_cast<double>(n), b.ness.eigenvalues[n]});
    }
}

void mode_sweep_threshold(ModeContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Built b(cfg.params);
    const CountingObservable obs = CountingObservable::by_name(cfg.observable);
    std::vector<int> grid = grid_for(cfg, cfg.params);
    const int max_m = *std::max_element(grid.begin(), grid.end());
    const double horizon = horizon_policy(cfg, b, obs, max_m);
    const auto records =
        simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories, cfg.seed, cfg.workers);

    const auto curve = sweep_thresholds(records, obs, grid);
    if (curve.empty()) throw InsufficientStatistics("no threshold produced >= 2 waiting times");
    write_tradeoff_csv(ctx, "tradeoff.csv", curve);

    const OptimalThreshold opt = optimal_threshold(curve);
    ctx.extra["m_star"] = opt.threshold;
    ctx.extra["no_peak"] = opt.no_peak;
    ctx.extra["horizon"] = horizon;

    std::vector<double> waits;
    for (const auto& r : records) {
        const auto w = extract_ticks(accumulate(r, obs), obs, opt.threshold).waiting_times();
        waits.insert(waits.end(), w.begin(), w.end());
    }
    const Histogram h = histogram_fd(waits);
    CsvWriter wtd(ctx.file("wtd.csv"), {"bin_lo", "bin_hi", "density"});
    for (size_t i = 0; i < h.bin_lo.size(); ++i)
        wtd.row({h.bin_lo[i], h.bin_hi[i], h.density[i]});
    ctx.extra["wtd_bin_width"] = h.bin_width;
}

void mode_sweep_lambda(ModeContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    std::vector<double> lambdas = cfg.lambda_grid;
    if (lambdas.empty()) lambdas = {1.3, 1.5, 1.7, 2.0};
    const CountingObservable obs = CountingObservable::by_name(cfg.observable);

    std::vector<double> m_stars, rs;
    CsvWriter csv(ctx.file("lambda_sweep.csv"),
                  {"lambda", "m_star", "no_peak", "R", "A", "F", "dR", "dA", "dF"});
    for (size_t li = 0; li < lambdas.size(); ++li) {
        ClockParams p = cfg.params;
        p.lambda = lambdas[li];
        const Built b(p);
        std::vector<int> grid = cfg.m_grid.empty() ? focused_grid(p.spin(), p.lambda)
                                                   : cfg.m_grid;
        const int max_m = *std::max_element(grid.begin(), grid.end());
        const double horizon = horizon_policy(cfg, b, obs, max_m);
        const auto records = simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories,
                                               derive_seed(cfg.seed, 7000 + li), cfg.workers);
        const auto curve = sweep_thresholds(records, obs, grid);
        if (curve.size() < 3) throw InsufficientStatistics("lambda sweep: curve too short");
        const OptimalThreshold opt = optimal_threshold(curve);
        const MeritSummary ms = merit_at(records, obs, opt.threshold);
        csv.row({lambdas[li], static_cast<double>(opt.threshold), opt.no_peak ? 1.0 : 0.0,
                 ms.resolution, ms.accuracy, ms.fano, ms.d_resolution, ms.d_accuracy, ms.d_fano});
        m_stars.push_back(opt.threshold);
        rs.push_back(ms.resolution);
    }
    csv.close();

    json fits;
    try {
        const FitResult fr = fit_resolution(lambdas, rs, cfg.params.gamma0);
        fits["resolution"] = {{"a_R", fr.slope}, {"b_R", fr.intercept}, {"r2", fr.r_squared}};
    } catch (const std::invalid_argument&) {
    }
    try {
        const FitResult fm = fit_threshold_scaling(lambdas, m_stars, cfg.params.spin());
        fits["threshold_scaling"] = {{"a_M", fm.slope}, {"b_M", fm.intercept}, {"r2", fm.r_squared}};
    } catch (const std::invalid_argument&) {
    }
    std::ofstream out(ctx.file("fits.json"));
    out << fits.dump(2) << "\n";
}

void mode_sweep_spin(ModeContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    std::vector<int> spins = cfg.spin2_grid;
    if (spins.empty()) spins = {20, 30, 40, 50, 60};
    const CountingObservable obs = CountingObservable::by_name(cfg.observable);

    std::vector<double> svals, avals, stick, ktick;
    CsvWriter csv(ctx.file("spin_sweep.csv"),
                  {"spin2", "m_star", "R", "A", "dA", "s_tick_mean", "k_tick_mean"});
    for (size_t si = 0; si < spins.size(); ++si) {
        ClockParams p = cfg.params;
        p.spin2 = spins[si];
        const Built b(p);
        std::vector<int> grid = cfg.m_grid.empty() ? focused_grid(p.spin(), p.lambda)
                                                   : cfg.m_grid;
        const int max_m = *std::max_element(grid.begin(), grid.end());
        const double horizon = horizon_policy(cfg, b, obs, max_m);
        const uint64_t sub_seed = derive_seed(cfg.seed, 8000 + si);
        const auto records =
            simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories, sub_seed, cfg.workers);
        const auto curve = sweep_thresholds(records, obs, grid);
        if (curve.size() < 3) throw InsufficientStatistics("spin sweep: curve too short");
        const OptimalThreshold opt = optimal_threshold(curve);
        const MeritSummary ms = merit_at(records, obs, opt.threshold);

        // Second pass with tick snapshots for the thermodynamic ledger.
        const auto snap_records = simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories,
                                                    sub_seed, cfg.workers, &obs, opt.threshold);
        double s_sum = 0.0, k_sum = 0.0, n = 0.0;
        for (const auto& r : snap_records) {
            const ThermoLedger l = build_ledger(r, b.ops, b.ness, obs, opt.threshold);
            for (const auto& e : l.ticks) {
                s_sum += e.s_tick;
                k_sum += e.activity;
                n += 1.0;
            }
        }
        if (n < 1.0) throw InsufficientStatistics("spin sweep: no ledger ticks");
        csv.row({static_cast<double>(spins[si]), static_cast<double>(opt.threshold),
                 ms.resolution, ms.accuracy, ms.d_accuracy, s_sum / n, k_sum / n});
        svals.push_back(p.spin());
        avals.push_back(ms.accuracy);
        stick.push_back(s_sum / n);
        ktick.push_back(k_sum / n);
    }
    csv.close();

    json fits;
    auto record_fit = [&fits](const char* name, const std::vector<double>& x,
                              const std::vector<double>& y) {
        const FitResult f = fit_power_law(x, y);
        fits[name] = {{"m", f.slope}, {"b", f.intercept}, {"r2", f.r_squared}};
    };
    record_fit("accuracy_vs_spin", svals, avals);
    record_fit("s_tick_vs_spin", svals, stick);
    record_fit("k_tick_vs_spin", svals, ktick);
    std::ofstream out(ctx.file("fits.json"));
    out << fits.dump(2) << "\n";
}

void mode_ft_check(ModeContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Built b(cfg.params);
    const int m = cfg.threshold > 0 ? cfg.threshold : 5;
    json summary;
    for (const std::string name : {"emissions", "activity", "heat"}) {
        const CountingObservable obs = CountingObservable::by_name(name);
        const CountingObservable rate_obs =
            name == "heat" ? CountingObservable::emissions() : obs;
        const double horizon =
            cfg.horizon_override > 0.0
                ? cfg.horizon_override
                : horizon_for(cfg.horizon_min_ticks, m, observable_rate(b.ops, b.ness, rate_obs));
        const auto records = simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories,
                                               cfg.seed, cfg.workers, &obs, m);
        std::vector<double> mar_samples, tick_samples;
        for (const auto& r : records) {
            mar_samples.push_back(first_tick_entropy(r, b.ops, b.ness, obs, m));
            const auto s = ft_tick_samples(r, b.ops, b.ness, obs, m);
            tick_samples.insert(tick_samples.end(), s.begin(), s.end());
        }
        const FtEstimate mar = ft_estimator(mar_samples);
        const FtEstimate tick = ft_estimator(tick_samples);
        CsvWriter mar_csv(ctx.file("ft_mar_" + name + ".csv"), {"samples", "estimate"});
        for (const auto& [n2, e] : mar.trace) mar_csv.row({static_cast<double>(n2), e});
        CsvWriter tick_csv(ctx.file("ft_tick_" + name + ".csv"), {"samples", "estimate"});
        for (const auto& [n2, e] : tick.trace) tick_csv.row({static_cast<double>(n2), e});
        summary[name] = {{"mar_mean", mar.mean},
                         {"mar_stderr", mar.std_error},
                         {"tick_mean", tick.mean},
                         {"tick_stderr", tick.std_error},
                         {"tick_samples", tick_samples.size()}};
    }
    std::ofstream out(ctx.file("ft_summary.json"));
    out << summary.dump(2) << "\n";
    ctx.extra["threshold"] = m;
}

void mode_turkur(ModeContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Built b(cfg.params);
    json report;
    CsvWriter csv(ctx.file("turkur.csv"),
                  {"observable", "M", "A", "dA", "s_tick_half", "s_tick_half_se", "k_tick",
                   "k_tick_se", "tur_holds", "kur_holds"});
    for (const std::string name : {"emissions", "activity", "heat"}) {
        const CountingObservable obs = CountingObservable::by_name(name);
        std::vector<int> grid =
            cfg.threshold > 0 ? std::vector<int>{cfg.threshold}
                              : (cfg.m_grid.empty() ? focused_grid(cfg.params.spin(), cfg.params.lambda)
                                                    : cfg.m_grid);
        const int max_m = *std::max_element(grid.begin(), grid.end());
        const CountingObservable rate_obs =
            name == "heat" ? CountingObservable::emissions() : obs;
        const double horizon =
            cfg.horizon_override > 0.0
                ? cfg.horizon_override
                : horizon_for(cfg.horizon_min_ticks, max_m, observable_rate(b.ops, b.ness, rate_obs));
        const uint64_t sub_seed = derive_seed(cfg.seed, std::hash<std::string>{}(name));
        const auto records =
            simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories, sub_seed, cfg.workers);
        int m = grid[0];
        if (grid.size() >= 3) {
            const auto curve = sweep_thresholds(records, obs, grid);
            if (curve.size() < 3) throw InsufficientStatistics("turkur: curve too short");
            m = optimal_threshold(curve).threshold;
        }
        const MeritSummary ms = merit_at(records, obs, m);
        const auto snap_records = simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories,
                                                    sub_seed, cfg.workers, &obs, m);
        std::vector<ThermoLedger> ledgers;
        for (const auto& r : snap_records)
            ledgers.push_back(build_ledger(r, b.ops, b.ness, obs, m));
        const BoundReport rep = tur_kur_report(ms, ledgers);
        csv.row_mixed({name, std::to_string(m), format_double(rep.accuracy),
                       format_double(rep.d_accuracy), format_double(0.5 * rep.s_tick_mean),
                       format_double(0.5 * rep.s_tick_se), format_double(rep.k_tick_mean),
                       format_double(rep.k_tick_se), rep.tur_holds ? "1" : "0",
                       rep.kur_holds ? "1" : "0"});
        report[name] = {{"threshold", m},
                        {"accuracy", rep.accuracy},
                        {"d_accuracy", rep.d_accuracy},
                        {"s_tick_mean", rep.s_tick_mean},
                        {"k_tick_mean", rep.k_tick_mean},
                        {"tur_holds", rep.tur_holds},
                        {"kur_holds", rep.kur_holds},
                        {"tur_excess_sigma", rep.tur_excess_sigma},
                        {"kur_excess_sigma", rep.kur_excess_sigma}};
    }
    csv.close();
    std::ofstream out(ctx.file("turkur.json"));
    out << report.dump(2) << "\n";
}

void mode_noise(ModeContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    std::vector<double> grid = cfg.noise_grid;
    if (grid.empty()) grid = {0.02, 0.05, 0.08, 0.11, 0.15};

    // Noiseless baseline for M* and resolution robustness.
    const Built b(cfg.params);
    const CountingObservable obs = CountingObservable::by_name(cfg.observable);
    std::vector<int> m_grid = cfg.m_grid.empty() ? focused_grid(cfg.params.spin(), cfg.params.lambda)
                                                 : cfg.m_grid;
    int m_star = cfg.threshold;
    double r0;
    {
        const int max_m = *std::max_element(m_grid.begin(), m_grid.end());
        const double horizon = horizon_policy(cfg, b, obs, max_m);
        const auto records = simulate_ensemble(b.engine, b.ness, horizon, cfg.trajectories,
                                               derive_seed(cfg.seed, 4242), cfg.workers);
        if (m_star <= 0) {
            const auto curve = sweep_thresholds(records, obs, m_grid);
            if (curve.size() < 3) throw InsufficientStatistics("noise: baseline curve too short");
            m_star = optimal_threshold(curve).threshold;
        }
        r0 = merit_at(records, obs, m_star).resolution;
    }

    const double rate = observable_rate(b.ops, b.ness, obs);
    const double horizon = cfg.horizon_override > 0.0
                               ? cfg.horizon_override
                               : horizon_for(cfg.horizon_min_ticks, m_star, rate);
    const auto rows = crossover_scan(cfg.params, cfg.params.lambda, grid, m_star,
                                     cfg.trajectories, horizon, cfg.seed);
    CsvWriter csv(ctx.file("crossover.csv"),
                  {"sigma_rel", "F_emissions", "dF_emissions", "F_activity", "dF_activity",
                   "F_heat", "dF_heat", "F_rabi", "R_activity"});
    for (const auto& r : rows)
        csv.row({r.sigma_rel, r.fano_emissions, r.d_fano_emissions, r.fano_activity,
                 r.d_fano_activity, r.fano_heat, r.d_fano_heat, r.fano_rabi,
                 r.resolution_activity});
    ctx.extra["m_star"] = m_star;
    ctx.extra["noiseless_resolution"] = r0;
}

}  // namespace

std::string run(const RunConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    ModeContext ctx{config, fs::path(config.out_dir), {}, json::object()};
    fs::create_directories(ctx.dir);

    if (config.mode == "simulate") mode_simulate(ctx, false);
    else if (config.mode == "spectrum") mode_simulate(ctx, true);
    else if (config.mode == "sweep-threshold") mode_sweep_threshold(ctx);
    else if (config.mode == "sweep-lambda") mode_sweep_lambda(ctx);
    else if (config.mode == "sweep-spin") mode_sweep_spin(ctx);
    else if (config.mode == "ft-check") mode_ft_check(ctx);
    else if (config.mode == "turkur") mode_turkur(ctx);
    else if (config.mode == "noise") mode_noise(ctx);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = json::parse(config.to_json());
    manifest["wall_time_s"] = wall;
    manifest["mode_info"] = ctx.extra;
    json files = json::object();
    for (const auto& f : ctx.files)
        files[f.filename().string()] = checksum_hex(file_checksum(f));
    manifest["files"] = files;
    std::ofstream out(ctx.dir / "manifest.json");
    out << manifest.dump(2) << "\n";
    return ctx.dir.string();
}

}  // namespace tcclock
