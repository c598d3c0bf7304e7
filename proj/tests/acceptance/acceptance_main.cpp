// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "qfilter/ensemble.hpp"
#include "qfilter/gaussian_filter.hpp"
#include "qfilter/grid_sse.hpp"
#include "qfilter/riccati.hpp"

using namespace qfilter;

namespace {

constexpr std::uint64_t seed = 42;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

NoisePath pairwise_coarsen(const NoisePath& fine) {
    NoisePath coarse{2.0 * fine.dt, fine.n_steps / 2, fine.dim, {}, fine.kind, fine.seed};
    coarse.increments.resize(coarse.n_steps * coarse.dim);
    for (std::size_t k = 0; k < coarse.n_steps; ++k)
        for (std::size_t j = 0; j < fine.dim; ++j)
            coarse.increments[k * fine.dim + j] = fine.row(2 * k)[j] + fine.row(2 * k + 1)[j];
    return coarse;
}

Outcome ac1_localization() {
    double worst = 0.0;
    const std::vector<complex> starts{{0.5, 0.0}, {2.0, 0.0}, {0.3, 0.7}};
    for (double lambda : {0.5, 1.0, 2.0}) {
        const PhysParams p = make_params(1, 1, lambda, 1);
        const double T = 40.0 / relaxation_rate(p);
        const double tq = std::sqrt(p.hbar / (2.0 * lambda * p.m));
        const double tp = p.hbar * std::sqrt(lambda * p.m * p.hbar / 2.0);
        for (const complex& w0 : starts) {
            const RiccatiSolution sol = integrate_riccati(ComplexWidth{w0}, p, T, 1e-3);
            for (const ComplexWidth& end : {sol.omega_series.back(), omega_analytic(T, ComplexWidth{w0}, p)}) {
                const Dispersions d = dispersions(end, p);
                worst = std::max({worst, std::abs(d.tau_q2 - tq), std::abs(d.tau_p2 - tp)});
            }
        }
    }
    return {worst <= 1e-6, "max_abs_err=" + fmt("%.3e", worst) + " tol=1e-06 (3 lambdas x 3 starts)"};
}

Outcome ac2_closed_form() {
    double worst = 0.0;
    for (double lambda : {0.5, 1.0, 2.0})
        for (const complex& w0 : {complex{0.5, 0.0}, complex{2.0, 0.0}, complex{0.3, 0.7}}) {
            const PhysParams p = make_params(1, 1, lambda, 1);
            const RiccatiSolution sol = integrate_riccati(ComplexWidth{w0}, p, 10.0, 1e-4);
            for (std::size_t k = 0; k < sol.t_grid.size(); ++k)
                worst = std::max(worst, std::abs(sol.omega_series[k].value() -
                                                 omega_analytic(sol.t_grid[k], ComplexWidth{w0}, p).value()));
        }
    return {worst <= 1e-6, "max_abs_dev=" + fmt("%.3e", worst) + " tol=1e-06"};
}

Outcome ac3_free_spreading() {
    double worst = 0.0;
    const PhysParams p = make_params(1, 1, 0, 1);
    for (double s2 : {0.25, 1.0, 4.0}) {
        const InitialState init = initial_from_packet(RealVector{0.0}, RealVector{0.0}, s2, p);
        const TrajectoryRecord rec = simulate_trajectory(init, wiener_path(1e-4, 100000, 1, seed), p, {false, 100});
        for (std::size_t k = 0; k < rec.states.size(); ++k) {
            const double t = rec.t_grid[k];
            const double expected = s2 * (1.0 + std::pow(p.hbar * t / (2.0 * p.m * s2), 2));
            const double got = dispersions(rec.states[k].omega, p).tau_q2;
            worst = std::max(worst, std::abs(got - expected) / expected);
        }
    }
    return {worst <= 1e-8, "max_rel_err=" + fmt("%.3e", worst) + " tol=1e-08 over t in [0,10]"};
}

Outcome ac4_heisenberg() {
    const PhysParams p = make_params(1, 1, 1, 1);
    const InitialState init = initial_from_packet(RealVector{0.0}, RealVector{1.0}, 1.0, p);
    const double bound = p.hbar * p.hbar / 4.0;
    double min_product = INFINITY;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        const TrajectoryRecord rec = simulate_trajectory(init, wiener_path(1e-4, 50000, 1, derive_seed(seed, i)), p);
        for (const auto& s : rec.states) {
            const Dispersions d = dispersions(s.omega, p);
            min_product = std::min(min_product, d.tau_q2 * d.tau_p2);
            ++checked;
        }
    }
    return {min_product >= bound,
            "min_product=" + fmt("%.17g", min_product) + " bound=0.25 steps=" + std::to_string(checked)};
}

Outcome ac5_ballistic() {
    const PhysParams p = make_params(1, 1, 1, 1);
    const InitialState init = initial_from_packet(RealVector{0.0}, RealVector{1.0}, 1.0, p);
    const EnsembleStats stats = run_ensemble(init, p, 1e-3, 2.0, 10000, seed, {10, 0});
    const BallisticCheck c = check_ballistic_law(stats, init, p);
    const double mean_q = stats.mean_qhat.back();
    return {c.passed, "mean_q(T)=" + fmt("%.5f", mean_q) + " stderr=" + fmt("%.2e", stats.stderr_qhat.back()) +
                          " q_dev=" + fmt("%.2f", c.final_q_deviation) + "se max_p_dev=" +
                          fmt("%.2f", c.max_p_deviation) + "se bound=3se"};
}

Outcome ac6_grid_oracle() {
    const PhysParams p = make_params(1, 1, 1, 1);
    const double q0 = 0.0, p0 = 0.5, s2 = 1.0, T = 5.0, dt = 1e-4;
    const double half = 20.0 * std::max(std::sqrt(s2), std::sqrt(asymptotic_dispersions(p).tau_q2));
    const double centre = q0 + p0 * T / (2.0 * p.m);
    const GridSpec spec = make_grid_spec(centre - half, centre + half, 2048);
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    const NoisePath path = wiener_path(dt, n, 1, seed);

    const InitialState init = initial_from_packet(RealVector{q0}, RealVector{p0}, s2, p);
    const TrajectoryRecord rec = simulate_trajectory(init, path, p);
    GridState g = init_grid(q0, p0, s2, spec, p);
    const GridSolver solver(spec, p, dt);
    double err_q = 0.0, err_tau = 0.0;
    for (std::size_t k = 0;; ++k) {
        const Moments m = grid_moments(g, p);
        const GaussianPosterior& s = rec.states[k];
        const Dispersions d = dispersions(s.omega, p);
        err_q = std::max(err_q, std::abs(m.qhat - s.qhat[0]) / std::max(std::abs(s.qhat[0]), std::sqrt(d.tau_q2)));
        err_tau = std::max(err_tau, std::abs(m.tau_q2 - d.tau_q2) / d.tau_q2);
        if (k == n) break;
        solver.step_nonlinear(g, path.increments[k]);
    }
    return {err_q <= 1e-2 && err_tau <= 1e-2,
            "max_rel_err_qhat=" + fmt("%.3e", err_q) + " max_rel_err_tau_q2=" + fmt("%.3e", err_tau) + " tol=1e-02"};
}

Outcome ac7_linear_nonlinear() {
    const PhysParams p = make_params(1, 1, 1, 1);
    const double dt = 1e-3;
    const GridSpec spec = make_grid_spec(-20.0, 20.0, 2048);
    const GridSolver solver(spec, p, dt);
    GridState nl = init_grid(0.0, 0.5, 1.0, spec, p);
    GridState lin = nl;
    const NoisePath path = wiener_path(dt, 1000, 1, seed);
    for (double dqt : path.increments) {
        const double q = grid_moments(nl, p).qhat;
        solver.step_nonlinear(nl, dqt);
        solver.step_linear(lin, dqt + std::sqrt(2.0 * p.lambda) * q * dt);
    }
    const double d = l2_distance(nl, lin);
    return {d <= 1e-6, "l2_distance=" + fmt("%.3e", d) + " tol=1e-06 after 1000 steps"};
}

Outcome ac8_martingale() {
    const PhysParams p = make_params(1, 1, 1, 1);
    const MartingaleSetup setup{0.0, 0.0, 1.0, make_grid_spec(-20.0, 20.0, 2048)};
    const MartingaleResult r = martingale_check(setup, p, 1e-3, 1.0, 2000, seed);
    return {r.within_3_stderr, "likelihood_mean=" + fmt("%.5f", r.likelihood_mean) +
                                   " stderr=" + fmt("%.5f", r.likelihood_stderr) + " n=2000 bound=3se"};
}

double route_deviation(const InitialState& init, const NoisePath& path, const PhysParams& p) {
    const TrajectoryRecord rec = simulate_trajectory(init, path, p, {true, 1});
    double m = 0.0;
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
        const MeanPair qp = reconstruct_qp((*rec.w_series)[k], rec.states[k].omega, p);
        m = std::max({m, std::abs(qp.qhat[0] - rec.states[k].qhat[0]), std::abs(qp.phat[0] - rec.states[k].phat[0])});
    }
    return m;
}

Outcome ac9_dual_routes() {
    const PhysParams p = make_params(1, 1, 1, 1);
    const InitialState init = initial_from_packet(RealVector{0.0}, RealVector{0.0}, 1.0, p);
    const NoisePath fine = wiener_path(5e-5, 100000, 1, seed);
    const double coarse_dev = route_deviation(init, pairwise_coarsen(fine), p);
    const double fine_dev = route_deviation(init, fine, p);
    const double ratio = coarse_dev / fine_dev;
    return {coarse_dev <= 1e-4 && ratio >= 1.4,
            "max_dev(dt=1e-4)=" + fmt("%.3e", coarse_dev) + " tol=1e-04 max_dev(dt=5e-5)=" + fmt("%.3e", fine_dev) +
                " halving_ratio=" + fmt("%.2f", ratio) + " min=1.4"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 asymptotic localization", ac1_localization},
        {"AC2 closed-form vs RK4 Riccati", ac2_closed_form},
        {"AC3 free spreading", ac3_free_spreading},
        {"AC4 Heisenberg inequality", ac4_heisenberg},
        {"AC5 ballistic mean law", ac5_ballistic},
        {"AC6 grid vs Gaussian", ac6_grid_oracle},
        {"AC7 linear vs nonlinear grid", ac7_linear_nonlinear},
        {"AC8 likelihood martingale", ac8_martingale},
        {"AC9 dual-coordinate routes", ac9_dual_routes},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %s: %s (%.1fs)\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.passed ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
