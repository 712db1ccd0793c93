// Command-line front end: one subcommand per run mode, flags overriding an
// optional JSON config file. Exit codes: 0 success, 2 bad configuration,
// 3 solver failure, 4 insufficient statistics.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tcclock/runner.hpp"

namespace {

struct Flags {
    std::string config_file;
    int spin2 = -1;
    double lambda = -1.0, gamma0 = -1.0, beta = -1.0;
    bool zero_temperature = false;
    std::string observable, out_dir;
    int threshold = -1, trajectories = -1, horizon_min_ticks = -1;
    double horizon = -1.0;
    long long seed = -1;
    int workers = -1;
    double noise_sigma_rel = -1.0, noise_dt = -1.0;
    std::vector<int> m_grid, spin2_grid;
    std::vector<double> lambda_grid, noise_grid;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "JSON config file; flags override it");
    cmd->add_option("--spin2", f.spin2, "2S (integer)");
    cmd->add_option("--lambda", f.lambda, "drive parameter");
    cmd->add_option("--gamma0", f.gamma0, "bare decay rate");
    cmd->add_option("--beta", f.beta, "inverse bath temperature");
    cmd->add_flag("--zero-temperature", f.zero_temperature, "take the beta -> inf limit");
    cmd->add_option("--observable", f.observable, "emissions | activity | heat");
    cmd->add_option("--threshold", f.threshold, "fixed tick threshold M");
    cmd->add_option("--m-grid", f.m_grid, "explicit threshold grid");
    cmd->add_option("--trajectories", f.trajectories, "ensemble size");
    cmd->add_option("--horizon-min-ticks", f.horizon_min_ticks,
                    "horizon policy: at least this many ticks at the largest M");
    cmd->add_option("--horizon", f.horizon, "horizon override (simulation time)");
    cmd->add_option("--seed", f.seed, "master RNG seed");
    cmd->add_option("--out", f.out_dir, "artifact output directory");
    cmd->add_option("--workers", f.workers, "worker thread count");
    cmd->add_option("--noise-sigma-rel", f.noise_sigma_rel, "relative drive-noise strength");
    cmd->add_option("--noise-dt", f.noise_dt, "drive-noise resample interval");
    cmd->add_option("--noise-grid", f.noise_grid, "relative sigma grid (noise mode)");
    cmd->add_option("--lambda-grid", f.lambda_grid, "lambda grid (sweep-lambda mode)");
    cmd->add_option("--spin2-grid", f.spin2_grid, "2S grid (sweep-spin mode)");
}

tcclock::RunConfig assemble(const Flags& f, const std::string& mode) {
    tcclock::RunConfig cfg;
    if (!f.config_file.empty()) cfg = tcclock::RunConfig::from_json_file(f.config_file);
    cfg.mode = mode;
    if (f.spin2 >= 0) cfg.params.spin2 = f.spin2;
    if (f.lambda >= 0.0) cfg.params.lambda = f.lambda;
    if (f.gamma0 >= 0.0) cfg.params.gamma0 = f.gamma0;
    if (f.beta >= 0.0) cfg.params.beta = f.beta;
    if (f.zero_temperature) cfg.params.zero_temperature = true;
    if (!f.observable.empty()) cfg.observable = f.observable;
    if (f.threshold >= 0) cfg.threshold = f.threshold;
    if (!f.m_grid.empty()) cfg.m_grid = f.m_grid;
    if (f.trajectories >= 0) cfg.trajectories = f.trajectories;
    if (f.horizon_min_ticks >= 0) cfg.horizon_min_ticks = f.horizon_min_ticks;
    if (f.horizon >= 0.0) cfg.horizon_override = f.horizon;
    if (f.seed >= 0) cfg.seed = static_cast<uint64_t>(f.seed);
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.workers >= 1) cfg.workers = static_cast<unsigned>(f.workers);
    if (f.noise_sigma_rel >= 0.0) cfg.noise_sigma_rel = f.noise_sigma_rel;
    if (f.noise_dt >= 0.0) cfg.noise_dt = f.noise_dt;
    if (!f.noise_grid.empty()) cfg.noise_grid = f.noise_grid;
    if (!f.lambda_grid.empty()) cfg.lambda_grid = f.lambda_grid;
    if (!f.spin2_grid.empty()) cfg.spin2_grid = f.spin2_grid;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative collective-spin clock simulator"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> modes = {
        {"simulate", "record jump trajectories and the count spectrum"},
        {"spectrum", "count spectrum only"},
        {"sweep-threshold", "resolution/accuracy trade-off over a threshold grid"},
        {"sweep-lambda", "optimal threshold and resolution versus the drive"},
        {"sweep-spin", "accuracy and per-tick entropy scaling with S"},
        {"ft-check", "stopping-time fluctuation-theorem estimators"},
        {"turkur", "accuracy against the TUR and KUR bounds"},
        {"noise", "figure-of-merit crossover under drive noise"},
    };

    std::vector<Flags> flags(modes.size());
    std::vector<CLI::App*> cmds;
    for (size_t i = 0; i < modes.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(modes[i].first, modes[i].second);
        add_common(cmd, flags[i]);
        cmds.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (size_t i = 0; i < cmds.size(); ++i) {
            if (!cmds[i]->parsed()) continue;
            const auto cfg = assemble(flags[i], modes[i].first);
            const std::string dir = tcclock::run(cfg);
            std::printf("artifacts written to %s\n", dir.c_str());
            return 0;
        }
        std::fprintf(stderr, "error: no mode selected\n");
        return 2;
    } catch (const tcclock::InsufficientStatistics& e) {
        std::fprintf(stderr, "insufficient statistics: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    }
}
