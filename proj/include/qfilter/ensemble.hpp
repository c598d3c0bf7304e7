#ifndef QFILTER_ENSEMBLE_HPP
#define QFILTER_ENSEMBLE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qfilter/gaussian_filter.hpp"
#include "qfilter/grid_sse.hpp"

namespace qfilter {

// Monte Carlo over independent Gaussian-filter trajectories. Trajectory i
// uses the noise stream derive_seed(base_seed, i). Statistics are reduced in
// fixed blocks of `reduction_block` trajectories, combined in block order, so
// the result is bit-identical for any worker count.

inline constexpr std::size_t reduction_block = 64;

struct EnsembleOptions {
    std::size_t record_every = 1;
    std::size_t workers = 0;  // 0: hardware concurrency
};

/// Pointwise-in-time sample statistics. Matrices are [t_grid.size() x dim], row-major.
struct EnsembleStats {
    std::size_t n_traj = 0;
    std::size_t dim = 1;
    std::vector<double> t_grid;
    std::vector<double> mean_qhat;
    std::vector<double> mean_phat;
    std::vector<double> var_qhat;
    std::vector<double> var_phat;
    std::vector<double> stderr_qhat;
    std::vector<double> stderr_phat;
    std::vector<double> mean_tau_q2;
    std::vector<double> tau_q2_spread;  // max - min across trajectories
    std::optional<double> likelihood_mean;
    std::optional<double> likelihood_stderr;

    double at(const std::vector<double>& m, std::size_t k, std::size_t i) const { return m[k * dim + i]; }
};

EnsembleStats run_ensemble(const InitialState& init, const PhysParams& params, double dt, double t_end,
                           std::size_t n_traj, std::uint64_t base_seed, const EnsembleOptions& options = {});

struct BallisticCheck {
    double final_q_deviation = 0.0;  // |mean q(T) - (q + p T/m)| / stderr, worst component
    double max_p_deviation = 0.0;    // max over t of |mean p(t) - p| / stderr
    bool passed = false;             // both within 3 standard errors
};

/// Mean law of the posterior means: E q(t) = q + p t/m, E p(t) = p.
BallisticCheck check_ballistic_law(const EnsembleStats& stats, const InitialState& init, const PhysParams& params);

struct MartingaleResult {
    double likelihood_mean = 1.0;
    double likelihood_stderr = 0.0;
    std::size_t n_traj = 0;
    bool within_3_stderr = true;
};

struct MartingaleSetup {
    double q = 0.0;
    double p = 0.0;
    double sigma_q2 = 1.0;
    GridSpec grid;
};

/// Terminal likelihood of the linear lattice equation driven by prior
/// standard Wiener records (not innovation-derived outputs).
MartingaleResult martingale_check(const MartingaleSetup& setup, const PhysParams& params, double dt, double t_end,
                                  std::size_t n_traj, std::uint64_t base_seed, std::size_t workers = 0);

/// Columns t, mean_qhat_i.., stderr_qhat_i.., mean_phat_i.., mean_tau_q2
/// [, likelihood_mean, likelihood_stderr].
void write_ensemble_csv(std::ostream& os, const EnsembleStats& stats);

}  // namespace qfilter

#endif  // QFILTER_ENSEMBLE_HPP
