#include "qfilter/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "qfilter/csv.hpp"
#include "qfilter/noise.hpp"

namespace qfilter {

namespace {

std::size_t resolve_workers(std::size_t requested, std::size_t jobs) {
    std::size_t w = requested;
    if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(w, jobs));
}

std::size_t steps_for(double t_end, double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("dt", "must be positive");
    if (!(t_end >= dt)) throw InvalidParameter("t_end", "must be at least dt");
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

// Runs job(index) for index in [0, n_jobs) on a pool of threads. The error of
// the lowest failing index is rethrown, so failures are deterministic too.
template <typename Job>
void parallel_for(std::size_t n_jobs, std::size_t workers, Job job) {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;

    auto worker = [&] {
        for (std::size_t i = next++; i < n_jobs; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    const std::size_t n_threads = resolve_workers(workers, n_jobs);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

// Welford accumulator over one reduction block; merged with Chan's rule.
struct Moments2 {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        count += 1.0;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }

    void merge(const Moments2& o) {
        if (o.count == 0.0) return;
        if (count == 0.0) {
            *this = o;
            return;
        }
        const double n = count + o.count;
        const double d = o.mean - mean;
        mean += d * o.count / n;
        m2 += o.m2 + d * d * count * o.count / n;
        count = n;
    }

    double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
};

struct BlockStats {
    std::vector<Moments2> q, p;  // [n_rec x dim]
    std::vector<Moments2> tau;   // [n_rec]
    std::vector<double> tau_min, tau_max;

    BlockStats(std::size_t n_rec, std::size_t dim)
        : q(n_rec * dim), p(n_rec * dim), tau(n_rec),
          tau_min(n_rec, std::numeric_limits<double>::infinity()),
          tau_max(n_rec, -std::numeric_limits<double>::infinity()) {}

    void merge(const BlockStats& o) {
        for (std::size_t i = 0; i < q.size(); ++i) {
            q[i].merge(o.q[i]);
            p[i].merge(o.p[i]);
        }
        for (std::size_t k = 0; k < tau.size(); ++k) {
            tau[k].merge(o.tau[k]);
            tau_min[k] = std::min(tau_min[k], o.tau_min[k]);
            tau_max[k] = std::max(tau_max[k], o.tau_max[k]);
        }
    }
};

}  // namespace

EnsembleStats run_ensemble(const InitialState& init, const PhysParams& params, double dt, double t_end,
                           std::size_t n_traj, std::uint64_t base_seed, const EnsembleOptions& options) {
    if (n_traj < 2) throw InvalidParameter("n_traj", "an ensemble needs at least 2 trajectories");
    const std::size_t n_steps = steps_for(t_end, dt);
    const std::size_t dim = params.dim;
    const std::size_t every = options.record_every == 0 ? 1 : options.record_every;
    const TrajectoryOptions traj_opts{false, every};

    // Recorded time grid: same rule as simulate_trajectory.
    std::vector<double> t_grid;
    for (std::size_t k = 0; k <= n_steps; ++k)
        if (k % every == 0 || k == n_steps) t_grid.push_back(init.posterior.t + static_cast<double>(k) * dt);
    const std::size_t n_rec = t_grid.size();

    const std::size_t n_blocks = (n_traj + reduction_block - 1) / reduction_block;
    std::vector<BlockStats> blocks(n_blocks, BlockStats(n_rec, dim));

    parallel_for(n_blocks, options.workers, [&](std::size_t b) {
        BlockStats& acc = blocks[b];
        const std::size_t first = b * reduction_block;
        const std::size_t last = std::min(n_traj, first + reduction_block);
        for (std::size_t i = first; i < last; ++i) {
            const NoisePath path = wiener_path(dt, n_steps, dim, derive_seed(base_seed, i));
            TrajectoryRecord rec;
            try {
                rec = simulate_trajectory(init, path, params, traj_opts);
            } catch (const BlowUp& e) {
                throw BlowUp(e.time(), e.step(), "trajectory " + std::to_string(i) + ": Re(omega) left the positive half-plane");
            }
            for (std::size_t k = 0; k < n_rec; ++k) {
                const GaussianPosterior& s = rec.states[k];
                for (std::size_t j = 0; j < dim; ++j) {
                    acc.q[k * dim + j].add(s.qhat[j]);
                    acc.p[k * dim + j].add(s.phat[j]);
                }
                const double tau = dispersions(s.omega, params).tau_q2;
                acc.tau[k].add(tau);
                acc.tau_min[k] = std::min(acc.tau_min[k], tau);
                acc.tau_max[k] = std::max(acc.tau_max[k], tau);
            }
        }
    });

    BlockStats total(n_rec, dim);
    for (const auto& b : blocks) total.merge(b);

    EnsembleStats stats;
    stats.n_traj = n_traj;
    stats.dim = dim;
    stats.t_grid = std::move(t_grid);
    const double root_n = std::sqrt(static_cast<double>(n_traj));
    for (std::size_t i = 0; i < n_rec * dim; ++i) {
        stats.mean_qhat.push_back(total.q[i].mean);
        stats.mean_phat.push_back(total.p[i].mean);
        stats.var_qhat.push_back(total.q[i].variance());
        stats.var_phat.push_back(total.p[i].variance());
        stats.stderr_qhat.push_back(std::sqrt(total.q[i].variance()) / root_n);
        stats.stderr_phat.push_back(std::sqrt(total.p[i].variance()) / root_n);
    }
    for (std::size_t k = 0; k < n_rec; ++k) {
        stats.mean_tau_q2.push_back(total.tau[k].mean);
        stats.tau_q2_spread.push_back(total.tau_max[k] - total.tau_min[k]);
    }
    return stats;
}

BallisticCheck check_ballistic_law(const EnsembleStats& stats, const InitialState& init, const PhysParams& params) {
    BallisticCheck out;
    const std::size_t last = stats.t_grid.size() - 1;
    auto z = [](double dev, double se) {
        if (dev == 0.0) return 0.0;
        return se > 0.0 ? dev / se : std::numeric_limits<double>::infinity();
    };
    const double elapsed = stats.t_grid[last] - init.posterior.t;
    for (std::size_t j = 0; j < stats.dim; ++j) {
        const double expected_q = init.posterior.qhat[j] + init.posterior.phat[j] * elapsed / params.m;
        const double dev = std::abs(stats.at(stats.mean_qhat, last, j) - expected_q);
        out.final_q_deviation = std::max(out.final_q_deviation, z(dev, stats.at(stats.stderr_qhat, last, j)));
        for (std::size_t k = 0; k < stats.t_grid.size(); ++k) {
            const double pdev = std::abs(stats.at(stats.mean_phat, k, j) - init.posterior.phat[j]);
            out.max_p_deviation = std::max(out.max_p_deviation, z(pdev, stats.at(stats.stderr_phat, k, j)));
        }
    }
    out.passed = out.final_q_deviation <= 3.0 && out.max_p_deviation <= 3.0;
    return out;
}

MartingaleResult martingale_check(const MartingaleSetup& setup, const PhysParams& params, double dt, double t_end,
                                  std::size_t n_traj, std::uint64_t base_seed, std::size_t workers) {
    if (n_traj < 2) throw InvalidParameter("n_traj", "need at least 2 trajectories");
    if (!(dt > 0.0)) throw InvalidParameter("dt", "must be positive");
    if (!(t_end >= 0.0)) throw InvalidParameter("t_end", "must be non-negative");
    const GridState init = init_grid(setup.q, setup.p, setup.sigma_q2, setup.grid, params);

    MartingaleResult result;
    result.n_traj = n_traj;
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    if (n_steps == 0) return result;

    const GridSolver solver(setup.grid, params, dt);
    std::vector<double> likelihood(n_traj);
    parallel_for(n_traj, workers, [&](std::size_t i) {
        const NoisePath prior = wiener_path(dt, n_steps, 1, derive_seed(base_seed, i));
        if (prior.kind != NoiseKind::innovation) throw InvalidParameter("kind", "expected a raw Wiener record");
        GridState state = init;
        for (double dq : prior.increments) solver.step_linear(state, dq);
        likelihood[i] = state.likelihood();
    });

    double mean = 0.0;
    for (std::size_t i = 0; i < n_traj; ++i) mean += (likelihood[i] - mean) / static_cast<double>(i + 1);
    double ss = 0.0;
    for (double l : likelihood) ss += (l - mean) * (l - mean);
    const double n = static_cast<double>(n_traj);
    result.likelihood_mean = mean;
    result.likelihood_stderr = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    // floor covers rounding when the likelihood is deterministic (lambda = 0)
    result.within_3_stderr = std::abs(mean - 1.0) <= 3.0 * result.likelihood_stderr + 1e-12;
    return result;
}

void write_ensemble_csv(std::ostream& os, const EnsembleStats& stats) {
    const std::size_t dim = stats.dim;
    std::vector<std::string> header{"t"};
    for (std::size_t j = 1; j <= dim; ++j) header.push_back("mean_qhat_" + std::to_string(j));
    for (std::size_t j = 1; j <= dim; ++j) header.push_back("stderr_qhat_" + std::to_string(j));
    for (std::size_t j = 1; j <= dim; ++j) header.push_back("mean_phat_" + std::to_string(j));
    header.emplace_back("mean_tau_q2");
    const bool with_likelihood = stats.likelihood_mean.has_value();
    if (with_likelihood) {
        header.emplace_back("likelihood_mean");
        header.emplace_back("likelihood_stderr");
    }
    CsvWriter csv(os, header);
    for (std::size_t k = 0; k < stats.t_grid.size(); ++k) {
        csv.number(stats.t_grid[k]);
        for (std::size_t j = 0; j < dim; ++j) csv.number(stats.at(stats.mean_qhat, k, j));
        for (std::size_t j = 0; j < dim; ++j) csv.number(stats.at(stats.stderr_qhat, k, j));
        for (std::size_t j = 0; j < dim; ++j) csv.number(stats.at(stats.mean_phat, k, j));
        csv.number(stats.mean_tau_q2[k]);
        if (with_likelihood) csv.number(*stats.likelihood_mean).number(stats.likelihood_stderr.value_or(0.0));
        csv.end_row();
    }
}

}  // namespace qfilter
