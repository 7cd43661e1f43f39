#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sasma/conditions.hpp"
#include "sasma/error.hpp"
#include "sasma/estimate.hpp"
#include "sasma/io.hpp"
#include "sasma/kernel.hpp"
#include "sasma/simulate.hpp"

namespace sasma {

enum class Aggregation { automatic, mean, median };

inline std::string to_string(Aggregation a) {
    switch (a) {
        case Aggregation::automatic: return "auto";
        case Aggregation::mean: return "mean";
        case Aggregation::median: return "median";
    }
    return "unknown";
}

inline Aggregation aggregation_from_string(const std::string& name) {
    if (name == "auto") return Aggregation::automatic;
    if (name == "mean") return Aggregation::mean;
    if (name == "median") return Aggregation::median;
    throw ConfigError("unknown aggregation '" + name + "'");
}

/// Quantity estimated in each replication.
enum class EstimationTarget { g, f };

/// A complete simulate-estimate-aggregate experiment.
struct ExperimentConfig {
    Integrator integrator = Integrator::sas(1.7);
    KernelSpec kernel = KernelSpec::triangular();
    /// Rescale the kernel to unit L2 norm before simulating.
    bool normalize_kernel = true;
    std::size_t n = 1000;
    double delta = 0.01;
    /// Kernel truncation radius T_n; 0 selects the support radius for
    /// compact kernels and 20 otherwise.
    double truncation = 0.0;
    FilterKind filter = FilterKind::uniform;
    std::size_t m = 5;
    EstimatorConfig estimator;
    EstimationTarget target = EstimationTarget::g;
    std::size_t replications = 20;
    std::uint64_t base_seed = 1;
    Aggregation aggregation = Aggregation::automatic;
    double envelope_lo = 0.025;
    double envelope_hi = 0.975;
    /// Half-width of the L2 error window; 0 selects the support radius for
    /// compact kernels and the t grid range otherwise.
    double error_window = 0.0;
    std::size_t workers = 1;
    std::size_t memory_budget = std::size_t{1} << 27;

    KernelSpec simulation_kernel() const { return normalize_kernel ? normalize_kernel_l2(kernel) : kernel; }

    double truncation_radius() const {
        if (truncation > 0.0) return truncation;
        return kernel.compact() ? kernel.support_radius : 20.0;
    }

    double comparison_window() const {
        if (error_window > 0.0) return error_window;
        const double t_range = estimator.t_grid.empty() ? 0.0 : estimator.t_grid.back();
        return kernel.compact() ? std::min(kernel.support_radius, t_range) : t_range;
    }

    Aggregation effective_aggregation() const {
        if (aggregation != Aggregation::automatic) return aggregation;
        return integrator.alpha < 1.0 ? Aggregation::median : Aggregation::mean;
    }

    SimulationOptions simulation_options() const {
        SimulationOptions o;
        o.memory_budget = memory_budget;
        return o;
    }

    void validate() const {
        integrator.validate();
        kernel.validate();
        estimator.validate();
        if (replications < 1) throw ConfigError("M must be >= 1");
        if (!(envelope_lo > 0.0 && envelope_lo < envelope_hi && envelope_hi < 1.0))
            throw ConfigError("envelope quantiles must satisfy 0 < lo < hi < 1");
        if (n < 2) throw ConfigError("n must be >= 2");
        if (!(delta > 0.0)) throw ConfigError("delta must be positive");
        if (m < 1) throw ConfigError("filter half width m must be >= 1");
        if (workers < 1) throw ConfigError("workers must be >= 1");
        if (integrator.alpha != estimator.alpha && integrator.stable())
            throw ConfigError("estimator alpha differs from the integrator's stability index");
    }

    /// One `key=value` per line, in a fixed order.
    std::string echo() const {
        using detail::format_double;
        std::ostringstream os;
        os << "integrator=" << to_string(integrator.kind) << '\n'
           << "alpha=" << format_double(integrator.alpha) << '\n';
        if (integrator.kind == IntegratorKind::skewed_stable) os << "beta=" << format_double(integrator.beta) << '\n';
        if (integrator.kind == IntegratorKind::truncated_levy)
            os << "levy.c1=" << format_double(integrator.levy.c1) << '\n'
               << "levy.c2=" << format_double(integrator.levy.c2) << '\n'
               << "levy.p1=" << format_double(integrator.levy.p1) << '\n'
               << "levy.p2=" << format_double(integrator.levy.p2) << '\n'
               << "levy.eps=" << format_double(integrator.levy.eps) << '\n';
        os << "kernel=" << kernel.id() << '\n'
           << "kernel.c=" << format_double(kernel.c) << '\n'
           << "kernel.normalize=" << (normalize_kernel ? "true" : "false") << '\n'
           << "n=" << n << '\n'
           << "delta=" << format_double(delta) << '\n'
           << "truncation=" << format_double(truncation_radius()) << '\n'
           << "filter=" << to_string(filter) << '\n'
           << "m=" << m << '\n'
           << "a_n=" << format_double(estimator.a_n) << '\n'
           << "lambda_points=" << estimator.lambda_points << '\n'
           << "refine=" << (estimator.refine ? "true" : "false") << '\n'
           << "refine_tol=" << format_double(estimator.refine_tol) << '\n'
           << "max_lambda_points=" << estimator.max_lambda_points << '\n'
           << "lambda_points_2d=" << estimator.lambda_points_2d << '\n'
           << "t_max=" << format_double(estimator.t_grid.empty() ? 0.0 : estimator.t_grid.back()) << '\n'
           << "t_points=" << estimator.t_grid.size() << '\n'
           << "p=" << format_double(estimator.moment_order()) << '\n'
           << "norm_bound=" << format_double(estimator.norm_bound) << '\n'
           << "scale=" << to_string(estimator.scale) << '\n';
        if (estimator.support_radius > 0.0) os << "support_radius=" << format_double(estimator.support_radius) << '\n';
        if (estimator.known_norm2) os << "known_norm2=" << format_double(*estimator.known_norm2) << '\n';
        os << "target=" << (target == EstimationTarget::g ? "g" : "f") << '\n'
           << "M=" << replications << '\n'
           << "seed=" << base_seed << '\n'
           << "aggregation=" << to_string(effective_aggregation()) << '\n'
           << "envelope_lo=" << format_double(envelope_lo) << '\n'
           << "envelope_hi=" << format_double(envelope_hi) << '\n'
           << "error_window=" << format_double(comparison_window()) << '\n';
        return os.str();
    }
};

/// Parsed `key = value` text: '#' starts a comment, blank lines are skipped.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text, const std::string& source = "config") {
        KeyValueConfig cfg;
        std::istringstream is(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(is, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KeyValueConfig load(const std::filesystem::path& file) {
        std::ifstream in(file);
        if (!in) throw IoError("cannot open config file " + file.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), file.string());
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string str(const std::string& key, const std::string& fallback) const {
        used_[key] = true;
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double num(const std::string& key, double fallback) const {
        used_[key] = true;
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return detail::parse_double(it->second, key);
        } catch (const IoError&) {
            throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
        }
    }

    std::size_t count(const std::string& key, std::size_t fallback) const {
        const double v = num(key, static_cast<double>(fallback));
        if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("key '" + key + "': expected a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
        used_[key] = true;
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': expected an unsigned 64-bit integer");
        }
    }

    bool flag(const std::string& key, bool fallback) const {
        const std::string v = str(key, fallback ? "true" : "false");
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("key '" + key + "': expected true or false");
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
        used_[key] = true;
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return parse_csv_numbers(it->second, key);
        } catch (const IoError&) {
            throw ConfigError("key '" + key + "': expected a comma-separated list of numbers");
        }
    }

    /// Rejects keys that were never read (typos).
    void require_all_used() const {
        for (const auto& [key, value] : values_)
            if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

private:
    static std::string trim(const std::string& s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string::npos) return {};
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    }

    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> used_;
};

/// Builds an experiment from key-value settings; missing keys keep defaults.
inline ExperimentConfig experiment_from_config(const KeyValueConfig& kv) {
    ExperimentConfig cfg;
    const std::string kind = kv.str("integrator", "sas");
    const double alpha = kv.num("alpha", 1.7);
    const double beta = kv.num("beta", 0.0);
    LevyDensityParams levy;
    levy.c1 = kv.num("levy.c1", levy.c1);
    levy.c2 = kv.num("levy.c2", levy.c2);
    levy.p1 = kv.num("levy.p1", levy.p1);
    levy.p2 = kv.num("levy.p2", levy.p2);
    levy.eps = kv.num("levy.eps", levy.eps);
    switch (integrator_kind_from_string(kind)) {
        case IntegratorKind::sas: cfg.integrator = Integrator::sas(alpha); break;
        case IntegratorKind::skewed_stable: cfg.integrator = Integrator::skewed(alpha, beta); break;
        case IntegratorKind::gaussian: cfg.integrator = Integrator::gaussian(); break;
        case IntegratorKind::gamma: cfg.integrator = Integrator::gamma(); break;
        case IntegratorKind::truncated_levy: cfg.integrator = Integrator::truncated_levy(levy); break;
    }

    const KernelFamily family = kernel_family_from_string(kv.str("kernel", "triangular"));
    const double c = kv.num("kernel.c", 1.0);
    switch (family) {
        case KernelFamily::triangular: cfg.kernel = KernelSpec::triangular(c); break;
        case KernelFamily::spherical: cfg.kernel = KernelSpec::spherical(c); break;
        case KernelFamily::exponential: cfg.kernel = KernelSpec::exponential(c); break;
        case KernelFamily::gaussian2d: cfg.kernel = KernelSpec::gaussian2d(c); break;
        case KernelFamily::tabulated: {
            const auto values = kv.list("kernel.values", {});
            if (values.empty()) throw ConfigError("tabulated kernel needs kernel.values");
            cfg.kernel = KernelSpec::tabulated(values, kv.num("kernel.half_width", 1.0),
                                               static_cast<int>(kv.count("kernel.dimension", 1)), c);
            break;
        }
    }
    cfg.normalize_kernel = kv.flag("kernel.normalize", true);

    cfg.n = kv.count("n", cfg.n);
    cfg.delta = kv.num("delta", cfg.delta);
    cfg.truncation = kv.num("truncation", cfg.truncation);
    cfg.filter = filter_kind_from_string(kv.str("filter", "uniform"));
    cfg.m = kv.count("m", cfg.m);

    EstimatorConfig& e = cfg.estimator;
    e.alpha = cfg.integrator.stable() ? cfg.integrator.alpha : kv.num("estimator.alpha", 2.0);
    e.a_n = kv.num("a_n", e.a_n);
    e.lambda_points = kv.count("lambda_points", e.lambda_points);
    e.refine = kv.flag("refine", e.refine);
    e.refine_tol = kv.num("refine_tol", e.refine_tol);
    e.max_lambda_points = kv.count("max_lambda_points", std::max(e.max_lambda_points, e.lambda_points));
    e.lambda_points_2d = kv.count("lambda_points_2d", e.lambda_points_2d);
    const double default_t = cfg.kernel.compact() ? 1.5 * cfg.kernel.support_radius : 5.0;
    e.t_grid = EstimatorConfig::uniform_t_grid(kv.num("t_max", default_t), kv.count("t_points", 301));
    e.p = kv.num("p", 0.0);
    e.norm_bound = kv.num("norm_bound", cfg.kernel.compact() ? cfg.kernel.support_radius : 5.0);
    e.scale = scale_estimator_from_string(kv.str("scale", "quantile"));
    e.support_radius = kv.num("support_radius", 0.0);
    if (kv.has("known_norm2")) e.known_norm2 = kv.num("known_norm2", 1.0);

    const std::string target = kv.str("target", "g");
    if (target != "g" && target != "f") throw ConfigError("target must be g or f");
    cfg.target = target == "g" ? EstimationTarget::g : EstimationTarget::f;
    cfg.replications = kv.count("M", cfg.replications);
    cfg.base_seed = kv.u64("seed", cfg.base_seed);
    cfg.aggregation = aggregation_from_string(kv.str("aggregation", "auto"));
    cfg.envelope_lo = kv.num("envelope_lo", cfg.envelope_lo);
    cfg.envelope_hi = kv.num("envelope_hi", cfg.envelope_hi);
    cfg.error_window = kv.num("error_window", cfg.error_window);
    cfg.workers = kv.count("workers", cfg.workers);
    cfg.memory_budget = kv.count("memory_budget", cfg.memory_budget);
    return cfg;
}

/// Schedule settings for the condition audit (keys prefixed `schedule.`).
inline ScheduleSpec schedule_from_config(const KeyValueConfig& kv) {
    ScheduleSpec s;
    s.delta_exponent = kv.num("schedule.delta", s.delta_exponent);
    s.m_exponent = kv.num("schedule.gamma", s.m_exponent);
    s.filter = filter_kind_from_string(kv.str("schedule.filter", to_string(s.filter)));
    s.a_rule = sequence_rule_from_string(kv.str("schedule.a", "log_n"));
    s.a_constant = kv.num("schedule.a_constant", s.a_constant);
    s.a_table = kv.list("schedule.a_table", {});
    s.b_rule = sequence_rule_from_string(kv.str("schedule.b", "log_n"));
    s.b_constant = kv.num("schedule.b_constant", s.b_constant);
    s.b_table = kv.list("schedule.b_table", {});
    s.n_range = kv.list("schedule.n_range", s.n_range);
    return s;
}

}  // namespace sasma
