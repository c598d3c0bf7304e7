#include "qfilter/grid_sse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qfilter/csv.hpp"

namespace qfilter {

namespace {

// 8th-order central difference weights for offsets 1..4.
constexpr double d1_weights[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr double d2_center = -205.0 / 72.0;
constexpr double d2_weights[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};

complex at(const std::vector<complex>& psi, std::ptrdiff_t j) {
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(psi.size())) return {0.0, 0.0};
    return psi[static_cast<std::size_t>(j)];
}

double squared_norm(const std::vector<complex>& psi, double dx) {
    double s = 0.0;
    for (const complex& a : psi) s += std::norm(a);
    return s * dx;
}

double position_mean(const GridState& state) {
    double mass = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        const double rho = std::norm(state.amps[i]);
        mass += rho;
        first += state.spec.x(i) * rho;
    }
    return first / mass;
}

}  // namespace

GridSpec make_grid_spec(double x_min, double x_max, std::size_t n_points) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        throw InvalidParameter("grid.x_max", "must exceed grid.x_min");
    if (n_points < 16) throw InvalidParameter("grid.n_points", "must be at least 16");
    return GridSpec{x_min, x_max, n_points};
}

double GridState::likelihood() const { return std::exp(log_likelihood); }

GridState init_grid(double q, double p, double sigma_q2, const GridSpec& spec, const PhysParams& params) {
    if (params.dim != 1) throw InvalidParameter("dim", "the lattice solver is one-dimensional");
    if (!(sigma_q2 > 0.0)) throw InvalidParameter("sigma_q2", "must be positive");
    const double sigma = std::sqrt(sigma_q2);
    if (q - 8.0 * sigma < spec.x_min || q + 8.0 * sigma > spec.x_max)
        throw PacketOutOfDomain("packet q +- 8 sigma = [" + std::to_string(q - 8.0 * sigma) + ", " +
                                std::to_string(q + 8.0 * sigma) + "] exceeds the grid");

    GridState state;
    state.spec = spec;
    state.amps.resize(spec.n_points);
    for (std::size_t i = 0; i < spec.n_points; ++i) {
        const double x = spec.x(i);
        const double u = x - q;
        state.amps[i] = std::exp(complex{-u * u / (4.0 * sigma_q2), p * x / params.hbar});
    }
    const double scale = 1.0 / std::sqrt(squared_norm(state.amps, spec.dx()));
    for (complex& a : state.amps) a *= scale;
    return state;
}

double lattice_norm(const GridState& state) { return squared_norm(state.amps, state.spec.dx()); }

double boundary_mass(const GridState& state) {
    const std::size_t n = state.amps.size();
    const auto edge = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(boundary_fraction * n)));
    double s = 0.0;
    for (std::size_t i = 0; i < edge; ++i) s += std::norm(state.amps[i]) + std::norm(state.amps[n - 1 - i]);
    return s * state.spec.dx();
}

Moments grid_moments(const GridState& state, const PhysParams& params) {
    const double dx = state.spec.dx();
    Moments m;
    m.norm = lattice_norm(state);
    if (!state.normalized || std::abs(m.norm - 1.0) > 1e-8)
        throw NotNormalized("lattice norm is " + format_double(m.norm));

    const auto& psi = state.amps;
    const std::size_t n = psi.size();
    double first = 0.0;
    for (std::size_t i = 0; i < n; ++i) first += state.spec.x(i) * std::norm(psi[i]);
    m.qhat = first * dx / m.norm;

    double second = 0.0;
    double current = 0.0;
    double weighted_current = 0.0;
    double kinetic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::ptrdiff_t>(i);
        complex d1{0.0, 0.0};
        complex d2 = d2_center * psi[i];
        for (std::ptrdiff_t k = 1; k <= 4; ++k) {
            d1 += d1_weights[k - 1] * (at(psi, j + k) - at(psi, j - k));
            d2 += d2_weights[k - 1] * (at(psi, j + k) + at(psi, j - k));
        }
        d1 /= dx;
        d2 /= dx * dx;
        const double u = state.spec.x(i) - m.qhat;
        const double flux = (std::conj(psi[i]) * d1).imag();
        second += u * u * std::norm(psi[i]);
        current += flux;
        weighted_current += u * flux;
        kinetic += (std::conj(psi[i]) * d2).real();
    }
    const double hbar = params.hbar;
    m.tau_q2 = second * dx / m.norm;
    m.phat = hbar * current * dx / m.norm;
    m.cov_qp = hbar * weighted_current * dx / m.norm;
    m.tau_p2 = -hbar * hbar * kinetic * dx / m.norm - m.phat * m.phat;
    return m;
}

complex equivalent_width(const Moments& m, const PhysParams& params) {
    return {1.0 / (2.0 * m.tau_q2), -m.cov_qp / (params.hbar * m.tau_q2)};
}

double l2_distance(const GridState& a, const GridState& b) {
    if (a.amps.size() != b.amps.size()) throw ShapeMismatch("grids differ in size");
    double s = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i) s += std::norm(a.amps[i] - b.amps[i]);
    return std::sqrt(s * a.spec.dx());
}

GridSolver::GridSolver(const GridSpec& spec, const PhysParams& params, double dt)
    : spec_(make_grid_spec(spec.x_min, spec.x_max, spec.n_points)), params_(params), dt_(dt) {
    if (!(dt > 0.0)) throw InvalidParameter("dt", "must be positive");
    if (params.dim != 1) throw InvalidParameter("dim", "the lattice solver is one-dimensional");
    const std::size_t n = spec_.n_points;
    const double dx = spec_.dx();
    x_.resize(n);
    for (std::size_t i = 0; i < n; ++i) x_[i] = spec_.x(i);

    // Half step h = dt/2 of psi_t = (i hbar / 2m) psi_xx.
    const double h = 0.5 * dt;
    coupling_ = complex{0.0, params.hbar * h / (4.0 * params.m * dx * dx)};
    const complex diag = 1.0 + 2.0 * coupling_;
    const complex off = -coupling_;
    upper_.resize(n);
    inv_pivot_.resize(n);
    complex pivot = diag;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) pivot = diag - off * upper_[i - 1];
        inv_pivot_[i] = 1.0 / pivot;
        upper_[i] = off * inv_pivot_[i];
    }
    scratch_.resize(n);
}

void GridSolver::kinetic_half_step(std::vector<complex>& psi) const {
    const std::size_t n = psi.size();
    const complex c = coupling_;
    const complex center = 1.0 - 2.0 * c;
    const complex off = -c;
    // Right-hand side (1 + cT) psi, forward sweep fused in.
    complex prev_y{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const complex left = i > 0 ? psi[i - 1] : complex{0.0, 0.0};
        const complex right = i + 1 < n ? psi[i + 1] : complex{0.0, 0.0};
        const complex rhs = center * psi[i] + c * (left + right);
        prev_y = (rhs - off * prev_y) * inv_pivot_[i];
        scratch_[i] = prev_y;
    }
    psi[n - 1] = scratch_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) psi[i] = scratch_[i] - upper_[i] * psi[i + 1];
}

void GridSolver::apply_multiplier(std::vector<complex>& psi, double center, double dq) const {
    if (params_.lambda == 0.0) return;
    const double gain = std::sqrt(0.5 * params_.lambda);
    const double damping = 0.5 * params_.lambda * dt_;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double u = x_[i] - center;
        psi[i] *= std::exp(gain * u * dq - damping * u * u);
    }
}

void GridSolver::finish_step(GridState& state, bool accumulate_likelihood) const {
    const double n2 = squared_norm(state.amps, spec_.dx());
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw BlowUp(state.t + dt_, 0, "lattice norm degenerated");
    state.last_norm_factor = n2;
    if (accumulate_likelihood) state.log_likelihood += std::log(n2);
    const double scale = 1.0 / std::sqrt(n2);
    for (complex& a : state.amps) a *= scale;
    state.normalized = true;
    state.t += dt_;
    const double edge_mass = boundary_mass(state);
    if (edge_mass >= boundary_mass_limit) throw BoundaryMassExceeded(state.t, edge_mass);
}

void GridSolver::step_nonlinear(GridState& state, double dq_tilde) const {
    if (state.amps.size() != spec_.n_points) throw ShapeMismatch("state does not match solver grid");
    if (!state.normalized) throw NotNormalized("nonlinear step needs a normalized state");
    const double qhat = position_mean(state);
    kinetic_half_step(state.amps);
    apply_multiplier(state.amps, qhat, dq_tilde);
    kinetic_half_step(state.amps);
    finish_step(state, false);
}

void GridSolver::step_linear(GridState& state, double dq) const {
    if (state.amps.size() != spec_.n_points) throw ShapeMismatch("state does not match solver grid");
    kinetic_half_step(state.amps);
    apply_multiplier(state.amps, 0.0, dq);
    kinetic_half_step(state.amps);
    finish_step(state, true);
}

GridState step_nonlinear(const GridState& state, double dq_tilde, double dt, const PhysParams& params) {
    GridState next = state;
    GridSolver(state.spec, params, dt).step_nonlinear(next, dq_tilde);
    return next;
}

GridState step_linear(const GridState& state, double dq, double dt, const PhysParams& params) {
    GridState next = state;
    GridSolver(state.spec, params, dt).step_linear(next, dq);
    return next;
}

GridRun run_grid(const GridState& init, const NoisePath& path, const PhysParams& params,
                 const GridRunOptions& options) {
    if (path.dim != 1) throw ShapeMismatch("lattice runs need a one-dimensional noise path");
    const GridSolver solver(init.spec, params, path.dt);
    const std::size_t every = options.record_every == 0 ? 1 : options.record_every;
    const std::size_t n = path.n_steps;

    GridRun run{{}, init};
    GridState& state = run.final_state;
    auto sample = [&] { run.samples.push_back({state.t, grid_moments(state, params), state.likelihood()}); };
    auto snapshot = [&](std::size_t k) {
        if (options.snapshot_every > 0 && options.on_snapshot && (k % options.snapshot_every == 0 || k == n))
            options.on_snapshot(state, k);
    };

    sample();
    snapshot(0);
    for (std::size_t k = 0; k < n; ++k) {
        const double dq = path.increments[k];
        if (options.equation == GridEquation::nonlinear)
            solver.step_nonlinear(state, dq);
        else
            solver.step_linear(state, dq);
        state.t = init.t + static_cast<double>(k + 1) * path.dt;
        if ((k + 1) % every == 0 || k + 1 == n) sample();
        snapshot(k + 1);
    }
    return run;
}

void write_snapshot_csv(std::ostream& os, const GridState& state) {
    CsvWriter csv(os, {"x", "re_psi", "im_psi", "density"});
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        const complex a = state.amps[i];
        csv.number(state.spec.x(i)).number(a.real()).number(a.imag()).number(std::norm(a));
        csv.end_row();
    }
}

void write_grid_moments_csv(std::ostream& os, const std::vector<GridSample>& samples, const PhysParams& params) {
    CsvWriter csv(os, {"t", "qhat_1", "phat_1", "re_omega", "im_omega", "tau_q2", "tau_p2", "norm", "likelihood"});
    for (const auto& s : samples) {
        const complex w = equivalent_width(s.moments, params);
        csv.number(s.t).number(s.moments.qhat).number(s.moments.phat).number(w.real()).number(w.imag());
        csv.number(s.moments.tau_q2).number(s.moments.tau_p2).number(s.moments.norm).number(s.likelihood);
        csv.end_row();
    }
}

}  // namespace qfilter
