#ifndef QFILTER_RICCATI_HPP
#define QFILTER_RICCATI_HPP

#include <vector>

#include "qfilter/core_types.hpp"

namespace qfilter {

// Width flow of the observed free particle:
//
//     d omega / dt = lambda - (i hbar / m) omega^2
//
// For lambda > 0 every solution with Re omega(0) > 0 relaxes to the
// stationary width alpha = (lambda m / 2 hbar)^{1/2} (1 - i) at the rate
// |lambda / alpha| = (lambda hbar / m)^{1/2}. For lambda = 0 the packet spreads
// freely and omega(t) = omega0 / (1 + i hbar omega0 t / m).

enum class RiccatiMethod { analytic, rk4 };

struct RiccatiSolution {
    std::vector<double> t_grid;
    std::vector<ComplexWidth> omega_series;
    RiccatiMethod method = RiccatiMethod::rk4;
};

/// Right-hand side of the width equation.
complex riccati_rhs(const complex& omega, const PhysParams& params);

/// One classical RK4 step of the width equation. No positivity check.
complex riccati_rk4_step(const complex& omega, double dt, const PhysParams& params);

/// Stationary width alpha. Throws DegenerateCase for lambda = 0.
ComplexWidth omega_stationary(const PhysParams& params);

/// e-folding rate of the approach to alpha, (lambda hbar / m)^{1/2}.
double relaxation_rate(const PhysParams& params);

/// Closed-form omega(t). Uses the tanh solution for lambda > 0 and the free
/// spreading limit for lambda = 0.
ComplexWidth omega_analytic(double t, const ComplexWidth& omega0, const PhysParams& params);

/// Fixed-step RK4 integration on t_k = k dt; the final step is shortened to
/// land exactly on t_end. Throws BlowUp if Re omega <= 0 is produced.
RiccatiSolution integrate_riccati(const ComplexWidth& omega0, const PhysParams& params, double t_end, double dt);

/// Closed-form solution sampled on the given time grid.
RiccatiSolution sample_analytic(const ComplexWidth& omega0, const PhysParams& params,
                                const std::vector<double>& t_grid);

/// Limits of (tau_q2, tau_p2) as t -> infinity. Throws DegenerateCase for lambda = 0.
Dispersions asymptotic_dispersions(const PhysParams& params);

}  // namespace qfilter

#endif  // QFILTER_RICCATI_HPP
