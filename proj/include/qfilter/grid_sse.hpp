#ifndef QFILTER_GRID_SSE_HPP
#define QFILTER_GRID_SSE_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "qfilter/core_types.hpp"
#include "qfilter/noise.hpp"

namespace qfilter {

// Lattice solver for the posterior wave equation of a continuously observed
// free particle in one dimension,
//
//   nonlinear:  dpsi = [(i hbar/2m) psi'' - (lambda/4)(x - q)^2 psi] dt + (lambda/2)^{1/2} (x - q) psi dQtilde
//   linear:     dchi = [(i hbar/2m) chi'' - (lambda/4) x^2 chi] dt + (lambda/2)^{1/2} x chi dQ
//
// with q the posterior mean of |psi|^2. Each step is a Strang split: half a
// Crank-Nicolson kinetic step, the exact Ito solution of the pointwise
// multiplicative part, and another half kinetic step. The grid uses
// Dirichlet-zero ghost points; a boundary-mass guard rejects any state that
// has spread to the edges.

struct GridSpec {
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t n_points = 2048;

    double dx() const noexcept { return (x_max - x_min) / static_cast<double>(n_points - 1); }
    double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx(); }
};

GridSpec make_grid_spec(double x_min, double x_max, std::size_t n_points);

struct GridState {
    GridSpec spec;
    double t = 0.0;
    std::vector<complex> amps;
    bool normalized = true;
    // log of the accumulated likelihood (product of per-step squared-norm
    // factors); only advanced by the linear equation.
    double log_likelihood = 0.0;
    // squared lattice norm right before the last renormalization
    double last_norm_factor = 1.0;

    double likelihood() const;
};

struct Moments {
    double qhat = 0.0;
    double phat = 0.0;
    double tau_q2 = 0.0;
    double tau_p2 = 0.0;
    double cov_qp = 0.0;  // symmetrized position-momentum covariance
    double norm = 0.0;
};

/// Fraction of outer points (per side) watched by the boundary guard.
inline constexpr double boundary_fraction = 0.05;
/// Largest mass allowed on the guarded points.
inline constexpr double boundary_mass_limit = 1e-6;

/// Gaussian packet with means (q, p) and variance sigma_q2, sampled on the
/// lattice and renormalized. Requires q +- 8 sigma inside the domain.
GridState init_grid(double q, double p, double sigma_q2, const GridSpec& spec, const PhysParams& params);

double lattice_norm(const GridState& state);

/// Mass carried by the outer boundary_fraction of points on each side.
double boundary_mass(const GridState& state);

/// Moments of a normalized state. Derivatives use 8th-order central stencils.
Moments grid_moments(const GridState& state, const PhysParams& params);

/// Width of the Gaussian with the same (tau_q2, cov_qp):
/// Re w = 1/(2 tau_q2), Im w = -cov_qp / (hbar tau_q2).
complex equivalent_width(const Moments& m, const PhysParams& params);

/// Lattice L2 distance sqrt(sum |a - b|^2 dx).
double l2_distance(const GridState& a, const GridState& b);

// Propagator bound to one (grid, params, dt). Caches the Crank-Nicolson
// factorization so repeated steps cost two tridiagonal back-substitutions.
class GridSolver {
public:
    GridSolver(const GridSpec& spec, const PhysParams& params, double dt);

    double dt() const noexcept { return dt_; }
    const GridSpec& spec() const noexcept { return spec_; }

    /// Nonlinear (normalized) step driven by the innovation increment.
    void step_nonlinear(GridState& state, double dq_tilde) const;

    /// Linear (unnormalized) step driven by the output increment. The
    /// squared-norm factor goes into the likelihood; amps are renormalized.
    void step_linear(GridState& state, double dq) const;

private:
    void kinetic_half_step(std::vector<complex>& psi) const;
    void apply_multiplier(std::vector<complex>& psi, double center, double dq) const;
    void finish_step(GridState& state, bool accumulate_likelihood) const;

    GridSpec spec_;
    PhysParams params_;
    double dt_;
    std::vector<double> x_;
    complex coupling_;              // c in (1 - c T) psi' = (1 + c T) psi
    std::vector<complex> upper_;    // modified super-diagonal of the Thomas sweep
    std::vector<complex> inv_pivot_;
    mutable std::vector<complex> scratch_;
};

GridState step_nonlinear(const GridState& state, double dq_tilde, double dt, const PhysParams& params);
GridState step_linear(const GridState& state, double dq, double dt, const PhysParams& params);

struct GridSample {
    double t = 0.0;
    Moments moments;
    double likelihood = 1.0;
};

enum class GridEquation { nonlinear, linear };

struct GridRunOptions {
    GridEquation equation = GridEquation::nonlinear;
    std::size_t record_every = 1;
    std::size_t snapshot_every = 0;  // 0 disables snapshots
    std::function<void(const GridState&, std::size_t step)> on_snapshot;
};

struct GridRun {
    std::vector<GridSample> samples;
    GridState final_state;
};

/// Drives a grid state through every increment of a 1-D noise path.
GridRun run_grid(const GridState& init, const NoisePath& path, const PhysParams& params,
                 const GridRunOptions& options = {});

/// Columns x, re_psi, im_psi, density.
void write_snapshot_csv(std::ostream& os, const GridState& state);

/// Trajectory schema (t, qhat_1, phat_1, re_omega, im_omega, tau_q2, tau_p2)
/// plus norm and likelihood; omega is the equivalent Gaussian width.
void write_grid_moments_csv(std::ostream& os, const std::vector<GridSample>& samples, const PhysParams& params);

}  // namespace qfilter

#endif  // QFILTER_GRID_SSE_HPP
