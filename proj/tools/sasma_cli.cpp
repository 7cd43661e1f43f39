// Command line front end: simulate, periodogram, estimate, montecarlo, check.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sasma/sasma.hpp"

namespace fs = std::filesystem;
using namespace sasma;

namespace {

struct GlobalOptions {
    std::string config_file;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out_dir = ".";
};

struct Settings {
    ExperimentConfig experiment;
    ScheduleSpec schedule;
    double a_decay = 3.0;
};

Settings load_settings(const GlobalOptions& g) {
    KeyValueConfig kv = g.config_file.empty() ? KeyValueConfig{} : KeyValueConfig::load(g.config_file);
    for (const auto& o : g.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
        kv.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (g.seed) kv.set("seed", std::to_string(*g.seed));
    if (g.workers) kv.set("workers", std::to_string(*g.workers));
    Settings s;
    s.experiment = experiment_from_config(kv);
    s.schedule = schedule_from_config(kv);
    s.a_decay = kv.num("a_decay", s.a_decay);
    kv.require_all_used();
    return s;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run_simulate(const GlobalOptions& g, std::uint64_t stream) {
    const Settings s = load_settings(g);
    const ExperimentConfig& cfg = s.experiment;
    cfg.validate();
    RngStream rng(cfg.base_seed, stream);
    const KernelSpec kernel = cfg.simulation_kernel();
    if (kernel.dimension == 2) {
        const auto field = simulate_ma_2d(kernel, cfg.integrator, cfg.n, cfg.delta, cfg.truncation_radius(), rng,
                                          cfg.simulation_options());
        const fs::path out = fs::path(g.out_dir) / "field.csv";
        write_field_csv(field, out);
        std::cout << "wrote " << out.string() << " (" << cfg.n << " x " << cfg.n << ")\n";
    } else {
        const auto path = simulate_ma_1d(kernel, cfg.integrator, cfg.n, cfg.delta, cfg.truncation_radius(), rng,
                                         cfg.simulation_options());
        const fs::path out = fs::path(g.out_dir) / "path.csv";
        write_path_csv(path, out);
        std::cout << "wrote " << out.string() << " (" << cfg.n << " values)\n";
    }
    return 0;
}

int run_periodogram(const GlobalOptions& g, const std::string& input, double lambda_max, std::size_t points) {
    const Settings s = load_settings(g);
    const SampledPath path = read_path_csv(input);
    const SmoothingFilter filter = make_filter(s.experiment.filter, s.experiment.m);
    const double bound = lambda_max > 0.0 ? lambda_max : s.experiment.estimator.a_n;
    const FrequencyGrid grid = FrequencyGrid::uniform(bound, points);
    const Periodogram pg(path);
    const fs::path out = fs::path(g.out_dir) / "periodogram.csv";
    auto os = detail::open_output(out);
    os << "# n=" << path.size() << " delta=" << detail::format_double(path.delta()) << " filter="
       << to_string(s.experiment.filter) << " m=" << s.experiment.m << '\n';
    os << "lambda,I_raw,I_smoothed\n";
    for (double l : grid.lambdas)
        os << detail::format_double(l) << ',' << detail::format_double(pg.raw(l)) << ','
           << detail::format_double(pg.smoothed(l, filter)) << '\n';
    detail::finish_output(os, out);
    std::cout << "wrote " << out.string() << " (" << grid.lambdas.size() << " frequencies)\n";
    return 0;
}

int run_estimate(const GlobalOptions& g, const std::string& input) {
    const Settings s = load_settings(g);
    const ExperimentConfig& cfg = s.experiment;
    const SmoothingFilter filter = make_filter(cfg.filter, cfg.m);
    const SampleFile file = read_sample_csv(input);
    EstimatorConfig ec = cfg.estimator;
    if (cfg.integrator.stable() && file.alpha > 0.0 && file.alpha <= 2.0) ec.alpha = file.alpha;
    const fs::path out = fs::path(g.out_dir) / "estimate.csv";
    if (file.is_field()) {
        const auto est = estimate_g_2d(file.field(), filter, ec, cfg.memory_budget);
        print_warnings(est.warnings);
        write_estimate_2d_csv(est, out);
    } else {
        const SampledPath path = file.path();
        const auto est = cfg.target == EstimationTarget::f ? estimate_f(path, filter, ec) : estimate_g(path, filter, ec);
        print_warnings(est.warnings);
        write_estimate_csv(est, out);
        if (est.norm2) std::cout << "estimated ||f||_2 = " << *est.norm2 << '\n';
    }
    std::cout << "wrote " << out.string() << '\n';
    return 0;
}

int run_montecarlo(const GlobalOptions& g) {
    const Settings s = load_settings(g);
    const MonteCarloReport report = run_monte_carlo(s.experiment);
    print_warnings(report.warnings);
    const fs::path out = fs::path(g.out_dir) / "report.csv";
    export_report(report, out);
    std::vector<double> errors = report.l2_errors;
    std::cout << "M=" << report.replications << " aggregation=" << to_string(report.aggregation)
              << " median_l2_error=" << empirical_quantile(errors, 0.5)
              << " center_l2_error=" << report.center_l2_error;
    if (!report.norm2.empty()) {
        std::vector<double> norms = report.norm2;
        std::cout << " median_norm2=" << empirical_quantile(norms, 0.5);
    }
    std::cout << " wall_clock_seconds=" << report.wall_clock_seconds << '\n';
    std::cout << "wrote " << out.string() << " and " << errors_path(out).string() << '\n';
    return 0;
}

int run_check(const GlobalOptions& g) {
    const Settings s = load_settings(g);
    const ConditionReport report =
        check_schedule(s.schedule, s.experiment.kernel, s.experiment.integrator.alpha, s.a_decay);
    std::cout << report.table();
    const fs::path out = fs::path(g.out_dir) / "conditions.csv";
    auto os = detail::open_output(out);
    os << report.csv();
    detail::finish_output(os, out);
    std::cout << "wrote " << out.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and kernel recovery for stable moving averages"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", g.overrides, "override a configuration key (key=value), repeatable");
    app.add_option("--seed", g.seed, "base seed (u64)");
    app.add_option("--workers", g.workers, "worker threads for Monte Carlo replications");
    app.add_option("--out", g.out_dir, "output directory");

    std::uint64_t stream = 0;
    auto* sim = app.add_subcommand("simulate", "simulate one path or field and write it as CSV");
    sim->add_option("--stream", stream, "stream id of the random stream");

    std::string input;
    double lambda_max = 0.0;
    std::size_t points = 400;
    auto* per = app.add_subcommand("periodogram", "raw and smoothed periodogram of a path CSV");
    per->add_option("--input", input, "path CSV")->required()->check(CLI::ExistingFile);
    per->add_option("--lambda-max", lambda_max, "frequency bound (default a_n)");
    per->add_option("--points", points, "number of grid intervals (even)");

    auto* est = app.add_subcommand("estimate", "estimate g (and f) from a path or field CSV");
    est->add_option("--input", input, "path or field CSV")->required()->check(CLI::ExistingFile);

    auto* mc = app.add_subcommand("montecarlo", "run a Monte Carlo study and export the report");
    auto* chk = app.add_subcommand("check", "audit the schedule conditions for a configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ExitCode::config);
    }

    try {
        if (sim->parsed()) return run_simulate(g, stream);
        if (per->parsed()) return run_periodogram(g, input, lambda_max, points);
        if (est->parsed()) return run_estimate(g, input);
        if (mc->parsed()) return run_montecarlo(g);
        if (chk->parsed()) return run_check(g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::numeric);
    }
    return 0;
}
