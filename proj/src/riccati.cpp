#include "qfilter/riccati.hpp"

#include <cmath>
#include <string>

namespace qfilter {

namespace {

// tanh for Re z >= 0 written through exp(-2z), which stays bounded and
// underflows to the limit 1 instead of overflowing.
complex tanh_right_half_plane(const complex& z) {
    const complex e = std::exp(-2.0 * z);
    return (1.0 - e) / (1.0 + e);
}

std::size_t step_count(double t_end, double dt) {
    const double ratio = t_end / dt;
    auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
    return n == 0 ? 1 : n;
}

}  // namespace

complex riccati_rhs(const complex& omega, const PhysParams& params) {
    return params.lambda - complex{0.0, params.hbar / params.m} * omega * omega;
}

complex riccati_rk4_step(const complex& omega, double dt, const PhysParams& params) {
    const complex k1 = riccati_rhs(omega, params);
    const complex k2 = riccati_rhs(omega + 0.5 * dt * k1, params);
    const complex k3 = riccati_rhs(omega + 0.5 * dt * k2, params);
    const complex k4 = riccati_rhs(omega + dt * k3, params);
    return omega + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ComplexWidth omega_stationary(const PhysParams& params) {
    if (params.lambda == 0.0) throw DegenerateCase("no stationary width for lambda = 0 (free spreading)");
    const double s = std::sqrt(params.lambda * params.m / (2.0 * params.hbar));
    return ComplexWidth{complex{s, -s}};
}

double relaxation_rate(const PhysParams& params) { return std::sqrt(params.lambda * params.hbar / params.m); }

ComplexWidth omega_analytic(double t, const ComplexWidth& omega0, const PhysParams& params) {
    if (!(t >= 0.0)) throw InvalidParameter("t", "must be non-negative");
    const complex w0 = omega0.value();
    complex result;
    if (params.lambda == 0.0) {
        result = w0 / (1.0 + complex{0.0, params.hbar * t / params.m} * w0);
    } else {
        const complex alpha = omega_stationary(params).value();
        const complex th = tanh_right_half_plane(params.lambda * t / alpha);
        result = alpha * (w0 + alpha * th) / (w0 * th + alpha);
    }
    if (!(result.real() > 0.0) || !std::isfinite(result.real()) || !std::isfinite(result.imag()))
        throw NonNormalizable("closed-form omega lost normalizability at t=" + std::to_string(t));
    return ComplexWidth{result};
}

RiccatiSolution integrate_riccati(const ComplexWidth& omega0, const PhysParams& params, double t_end, double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("dt", "must be positive");
    if (!(t_end >= dt)) throw InvalidParameter("t_end", "must be at least dt");
    const std::size_t n = step_count(t_end, dt);

    RiccatiSolution sol;
    sol.method = RiccatiMethod::rk4;
    sol.t_grid.reserve(n + 1);
    sol.omega_series.reserve(n + 1);
    sol.t_grid.push_back(0.0);
    sol.omega_series.push_back(omega0);

    complex omega = omega0.value();
    double t_prev = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double t = (k == n) ? t_end : static_cast<double>(k) * dt;
        omega = riccati_rk4_step(omega, t - t_prev, params);
        if (!(omega.real() > 0.0) || !std::isfinite(omega.imag()))
            throw BlowUp(t, k, "Re(omega) left the positive half-plane");
        sol.t_grid.push_back(t);
        sol.omega_series.emplace_back(omega);
        t_prev = t;
    }
    return sol;
}

RiccatiSolution sample_analytic(const ComplexWidth& omega0, const PhysParams& params,
                                const std::vector<double>& t_grid) {
    RiccatiSolution sol;
    sol.method = RiccatiMethod::analytic;
    sol.t_grid = t_grid;
    sol.omega_series.reserve(t_grid.size());
    for (double t : t_grid) sol.omega_series.push_back(omega_analytic(t, omega0, params));
    return sol;
}

Dispersions asymptotic_dispersions(const PhysParams& params) {
    if (params.lambda == 0.0) throw DegenerateCase("dispersions grow without bound for lambda = 0");
    const double lm = params.lambda * params.m;
    return {std::sqrt(params.hbar / (2.0 * lm)), params.hbar * std::sqrt(lm * params.hbar / 2.0)};
}

}  // namespace qfilter
