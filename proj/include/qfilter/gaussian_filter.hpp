#ifndef QFILTER_GAUSSIAN_FILTER_HPP
#define QFILTER_GAUSSIAN_FILTER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qfilter/core_types.hpp"
#include "qfilter/noise.hpp"

namespace qfilter {

// Closed-form Gaussian posterior of the observed free particle. The means
// follow the Hamilton-Langevin equations
//
//     dq = (p/m) dt + ((lambda/2)^{1/2} / Re w) dQtilde
//     dp = -hbar (lambda/2)^{1/2} (Im w / Re w) dQtilde
//
// and the width w = omega follows the deterministic Riccati flow, so it is
// identical for every noise realization.

struct InitialState {
    GaussianPosterior posterior;
    WaveCoefficient w;
};

struct TrajectoryRecord {
    PhysParams params;
    std::uint64_t seed = 0;
    std::vector<double> t_grid;
    std::vector<GaussianPosterior> states;
    std::optional<std::vector<WaveCoefficient>> w_series;
};

struct TrajectoryOptions {
    bool record_w = false;
    std::size_t record_every = 1;  // the final step is always recorded
};

/// State of the Gaussian packet with means (q, p) and position variance
/// sigma_q2 at t = 0: omega = 1/(2 sigma_q2), w = (hbar/2m sigma_q2) q + (i/m) p.
InitialState initial_from_packet(const RealVector& q, const RealVector& p, double sigma_q2, const PhysParams& params);

/// One Euler-Maruyama step of the means (coefficients frozen at the step
/// start) plus one RK4 step of omega.
GaussianPosterior step_qp(const GaussianPosterior& state, std::span<const double> dq_tilde, double dt,
                          const PhysParams& params);

/// One Euler-Maruyama step of dw + (i hbar/m) omega w dt = (lambda/2)^{1/2} (hbar/m) dQ.
/// Driven by the output increment dQ.
WaveCoefficient step_w(const WaveCoefficient& w, const complex& omega, std::span<const double> dq, double dt,
                       const PhysParams& params);

/// Runs step_qp over every increment of an innovation path. With record_w,
/// the w route is run on the output record derived from the same path.
TrajectoryRecord simulate_trajectory(const InitialState& init, const NoisePath& path, const PhysParams& params,
                                     const TrajectoryOptions& options = {});

/// Columns t, qhat_1..dim, phat_1..dim, re_omega, im_omega, tau_q2, tau_p2.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

}  // namespace qfilter

#endif  // QFILTER_GAUSSIAN_FILTER_HPP
