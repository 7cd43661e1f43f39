#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sasma/config.hpp"
#include "sasma/error.hpp"
#include "sasma/estimate.hpp"
#include "sasma/io.hpp"
#include "sasma/rng.hpp"
#include "sasma/simulate.hpp"

namespace sasma {

inline constexpr const char* library_version = "1.0.0";

struct MonteCarloReport {
    /// Abscissae per axis; two-dimensional curves are row-major over t_grid x t_grid.
    std::vector<double> t_grid;
    int dimension = 1;
    std::vector<double> f_true;
    std::vector<double> center;
    /// Pointwise quantile envelopes; NaN when fewer than 3 replications.
    std::vector<double> env_lo;
    std::vector<double> env_hi;
    bool has_envelopes = false;
    std::vector<std::vector<double>> curves;
    std::vector<double> l2_errors;
    /// Per-replication ||f||_2 estimates (target f only).
    std::vector<double> norm2;
    double center_l2_error = 0.0;
    Aggregation aggregation = Aggregation::mean;
    std::uint64_t base_seed = 0;
    std::size_t replications = 0;
    double alpha = 0.0;
    std::string kernel_id;
    std::string config_echo;
    /// Distinct estimator warnings, each tagged with the first stream that raised it.
    std::vector<std::string> warnings;
    double wall_clock_seconds = 0.0;
};

namespace detail {

/// sqrt of the trapezoid integral of (a - b)^2 over grid points with |t| <= window.
inline double l2_distance_1d(std::span<const double> t, std::span<const double> a, std::span<const double> b,
                             double window) {
    const double slack = 1e-9 * std::max(1.0, window);
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t[i - 1]) > window + slack || std::abs(t[i]) > window + slack) continue;
        const double u = a[i] - b[i];
        const double v = a[i - 1] - b[i - 1];
        s += 0.5 * (t[i] - t[i - 1]) * (u * u + v * v);
    }
    return std::sqrt(s);
}

/// Tensor trapezoid analogue on [-window, window]^2.
inline double l2_distance_2d(std::span<const double> t, std::span<const double> a, std::span<const double> b,
                             double window) {
    const double slack = 1e-9 * std::max(1.0, window);
    const std::size_t nt = t.size();
    std::vector<double> w(nt, 0.0);
    for (std::size_t i = 1; i < nt; ++i) {
        if (std::abs(t[i - 1]) > window + slack || std::abs(t[i]) > window + slack) continue;
        const double h = t[i] - t[i - 1];
        w[i - 1] += 0.5 * h;
        w[i] += 0.5 * h;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nt; ++j) {
            const double d = a[i * nt + j] - b[i * nt + j];
            s += w[i] * w[j] * d * d;
        }
    return std::sqrt(s);
}

struct Replication {
    std::vector<double> curve;
    double l2_error = 0.0;
    double norm2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;
};

inline Replication run_replication(const ExperimentConfig& cfg, const KernelSpec& sim_kernel,
                                   std::span<const double> truth, std::size_t index) {
    RngStream rng(cfg.base_seed, index);
    const SmoothingFilter filter = make_filter(cfg.filter, cfg.m);
    Replication rep;
    const double window = cfg.comparison_window();
    if (sim_kernel.dimension == 2) {
        const SampledField field = simulate_ma_2d(sim_kernel, cfg.integrator, cfg.n, cfg.delta,
                                                  cfg.truncation_radius(), rng, cfg.simulation_options());
        KernelEstimate2D est = estimate_g_2d(field, filter, cfg.estimator, cfg.memory_budget);
        rep.curve = std::move(est.values);
        rep.warnings = std::move(est.warnings);
        rep.l2_error = l2_distance_2d(cfg.estimator.t_grid, rep.curve, truth, window);
        return rep;
    }
    const SampledPath path = simulate_ma_1d(sim_kernel, cfg.integrator, cfg.n, cfg.delta, cfg.truncation_radius(),
                                            rng, cfg.simulation_options());
    KernelEstimate est = cfg.target == EstimationTarget::g ? estimate_g(path, filter, cfg.estimator)
                                                           : estimate_f(path, filter, cfg.estimator);
    rep.curve = std::move(est.values);
    rep.warnings = std::move(est.warnings);
    if (est.norm2) rep.norm2 = *est.norm2;
    rep.l2_error = l2_distance_1d(cfg.estimator.t_grid, rep.curve, truth, window);
    return rep;
}

}  // namespace detail

/// M independent replications (stream_id = replication index), each
/// simulate -> estimate -> L2 error, aggregated pointwise in index order.
inline MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const KernelSpec sim_kernel = cfg.simulation_kernel();
    const KernelSpec truth_kernel =
        cfg.target == EstimationTarget::g ? normalize_kernel_l2(sim_kernel) : sim_kernel;
    const auto& t = cfg.estimator.t_grid;
    const int dim = sim_kernel.dimension;
    if (dim == 2 && cfg.target == EstimationTarget::f)
        throw ConfigError("the plug-in f estimate is one-dimensional; use target = g for fields");

    MonteCarloReport report;
    report.t_grid = t;
    report.dimension = dim;
    if (dim == 1) {
        report.f_true.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) report.f_true[i] = kernel_eval(truth_kernel, t[i]);
    } else {
        report.f_true.resize(t.size() * t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j) report.f_true[i * t.size() + j] = kernel_eval(truth_kernel, t[i], t[j]);
    }

    const std::size_t M = cfg.replications;
    std::vector<std::optional<detail::Replication>> results(M);
    std::vector<std::exception_ptr> failures(M);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::size_t r = next.fetch_add(1);
            if (r >= M) return;
            try {
                results[r] = detail::run_replication(cfg, sim_kernel, report.f_true, r);
            } catch (...) {
                failures[r] = std::current_exception();
                failed.store(true);
            }
        }
    };
    const std::size_t workers = std::min(cfg.workers, M);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t r = 0; r < M; ++r) {
        if (!failures[r]) continue;
        const std::string where =
            "replication failed (stream_id=" + std::to_string(r) + ", seed=" + std::to_string(cfg.base_seed) + "): ";
        try {
            std::rethrow_exception(failures[r]);
        } catch (const Error& e) {
            throw Error(e.code(), where + e.what());
        } catch (const std::exception& e) {
            throw Error(ExitCode::numeric, where + e.what());
        }
    }

    report.aggregation = cfg.effective_aggregation();
    report.base_seed = cfg.base_seed;
    report.replications = M;
    report.alpha = cfg.integrator.alpha;
    report.kernel_id = sim_kernel.id();
    report.config_echo = cfg.echo();
    std::map<std::string, bool> seen;
    for (std::size_t r = 0; r < M; ++r) {
        auto& rep = *results[r];
        report.l2_errors.push_back(rep.l2_error);
        if (cfg.target == EstimationTarget::f) report.norm2.push_back(rep.norm2);
        for (const auto& w : rep.warnings)
            if (!seen[w]) {
                seen[w] = true;
                report.warnings.push_back("stream " + std::to_string(r) + ": " + w);
            }
        report.curves.push_back(std::move(rep.curve));
    }

    const std::size_t points = report.f_true.size();
    report.center.resize(points);
    report.env_lo.assign(points, std::numeric_limits<double>::quiet_NaN());
    report.env_hi.assign(points, std::numeric_limits<double>::quiet_NaN());
    report.has_envelopes = M >= 3;
    std::vector<double> column(M);
    for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t r = 0; r < M; ++r) column[r] = report.curves[r][i];
        if (report.aggregation == Aggregation::median) {
            report.center[i] = empirical_quantile(column, 0.5);
        } else {
            double s = 0.0;
            for (double v : column) s += v;
            report.center[i] = s / static_cast<double>(M);
        }
        if (report.has_envelopes) {
            report.env_lo[i] = empirical_quantile(column, cfg.envelope_lo);
            report.env_hi[i] = empirical_quantile(column, cfg.envelope_hi);
        }
    }
    const double window = cfg.comparison_window();
    report.center_l2_error = dim == 1 ? detail::l2_distance_1d(t, report.center, report.f_true, window)
                                      : detail::l2_distance_2d(t, report.center, report.f_true, window);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

/// Sibling path for the per-replication errors: `<stem>.errors.csv`.
inline std::filesystem::path errors_path(const std::filesystem::path& report_path) {
    std::filesystem::path p = report_path;
    p.replace_filename(report_path.stem().string() + ".errors.csv");
    return p;
}

/// Writes the report CSV and its errors sibling. Only the wall-clock line
/// varies between identical runs.
inline void export_report(const MonteCarloReport& report, const std::filesystem::path& file) {
    using detail::format_double;
    auto out = detail::open_output(file);
    out << "# sasma monte carlo report version=" << library_version << '\n';
    out << "# M=" << report.replications << " alpha=" << format_double(report.alpha) << " kernel=" << report.kernel_id
        << '\n';
    out << "# seed=" << report.base_seed << " aggregation=" << to_string(report.aggregation)
        << " dimension=" << report.dimension << " envelopes=" << (report.has_envelopes ? "pointwise" : "omitted")
        << '\n';
    out << "# center_l2_error=" << format_double(report.center_l2_error) << '\n';
    std::istringstream echo(report.config_echo);
    for (std::string line; std::getline(echo, line);) out << "# config " << line << '\n';
    for (const auto& w : report.warnings) out << "# warning " << w << '\n';
    out << "# wall_clock_seconds=" << format_double(report.wall_clock_seconds) << '\n';
    const auto& t = report.t_grid;
    if (report.dimension == 1) {
        out << "t,f_true,center,env_lo,env_hi\n";
        for (std::size_t i = 0; i < report.f_true.size(); ++i)
            out << format_double(t[i]) << ',' << format_double(report.f_true[i]) << ','
                << format_double(report.center[i]) << ',' << format_double(report.env_lo[i]) << ','
                << format_double(report.env_hi[i]) << '\n';
    } else {
        out << "t1,t2,f_true,center,env_lo,env_hi\n";
        const std::size_t nt = t.size();
        for (std::size_t i = 0; i < report.f_true.size(); ++i)
            out << format_double(t[i / nt]) << ',' << format_double(t[i % nt]) << ','
                << format_double(report.f_true[i]) << ',' << format_double(report.center[i]) << ','
                << format_double(report.env_lo[i]) << ',' << format_double(report.env_hi[i]) << '\n';
    }
    detail::finish_output(out, file);

    const auto err_file = errors_path(file);
    auto err = detail::open_output(err_file);
    err << "replication,l2_error\n";
    for (std::size_t r = 0; r < report.l2_errors.size(); ++r)
        err << r << ',' << format_double(report.l2_errors[r]) << '\n';
    detail::finish_output(err, err_file);
}

/// Numeric content of an exported report.
struct ReportFile {
    std::vector<std::string> metadata;
    std::vector<std::string> columns;
    /// One vector per column.
    std::vector<std::vector<double>> data;
    std::vector<double> l2_errors;

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return data[i];
        throw IoError("report has no column '" + name + "'");
    }
};

inline ReportFile import_report(const std::filesystem::path& file) {
    ReportFile rf;
    {
        auto in = detail::open_input(file);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            if (line[0] == '#') {
                rf.metadata.push_back(line);
                continue;
            }
            if (rf.columns.empty()) {
                std::istringstream is(line);
                for (std::string c; std::getline(is, c, ',');) rf.columns.push_back(c);
                rf.data.resize(rf.columns.size());
                continue;
            }
            const auto v = parse_csv_numbers(line, file.string() + ":" + std::to_string(line_no));
            if (v.size() != rf.columns.size()) throw IoError(file.string() + ":" + std::to_string(line_no) + ": wrong column count");
            for (std::size_t i = 0; i < v.size(); ++i) rf.data[i].push_back(v[i]);
        }
        if (rf.columns.empty()) throw IoError(file.string() + ": missing column header");
    }
    const auto err_file = errors_path(file);
    auto in = detail::open_input(err_file);
    std::string line;
    std::getline(in, line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto v = parse_csv_numbers(line, err_file.string() + ":" + std::to_string(line_no));
        if (v.size() != 2) throw IoError(err_file.string() + ":" + std::to_string(line_no) + ": expected 2 columns");
        rf.l2_errors.push_back(v[1]);
    }
    return rf;
}

}  // namespace sasma
