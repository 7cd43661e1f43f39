// Recovers a unit-norm triangular kernel from SaS moving-average paths and
// prints the aggregated curve next to the truth.

#include <cstdio>
#include <vector>

#include "sasma/sasma.hpp"

int main() {
    using namespace sasma;
    ExperimentConfig cfg;
    cfg.integrator = Integrator::sas(1.7);
    cfg.kernel = KernelSpec::triangular();
    cfg.n = 1000;
    cfg.delta = 0.01;
    cfg.m = 5;
    cfg.estimator.alpha = 1.7;
    cfg.estimator.a_n = 20.0;
    cfg.estimator.t_grid = EstimatorConfig::uniform_t_grid(1.5, 31);
    cfg.replications = 5;
    cfg.base_seed = 7;

    const MonteCarloReport report = run_monte_carlo(cfg);
    std::printf("%8s %10s %10s %10s %10s\n", "t", "f_true", "mean", "env_lo", "env_hi");
    for (std::size_t i = 0; i < report.t_grid.size(); ++i)
        std::printf("%8.3f %10.4f %10.4f %10.4f %10.4f\n", report.t_grid[i], report.f_true[i], report.center[i],
                    report.env_lo[i], report.env_hi[i]);
    std::vector<double> errors = report.l2_errors;
    std::printf("median L2 error on [-1, 1]: %.4f\n", empirical_quantile(errors, 0.5));
    return 0;
}
