#include "qfilter/gaussian_filter.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "qfilter/csv.hpp"
#include "qfilter/riccati.hpp"

namespace qfilter {

InitialState initial_from_packet(const RealVector& q, const RealVector& p, double sigma_q2, const PhysParams& params) {
    if (!(sigma_q2 > 0.0) || !std::isfinite(sigma_q2)) throw InvalidParameter("sigma_q2", "must be positive");
    if (q.size() != params.dim || p.size() != params.dim)
        throw ShapeMismatch("packet means must have " + std::to_string(params.dim) + " components");

    const ComplexWidth omega0{complex{1.0 / (2.0 * sigma_q2), 0.0}};
    InitialState init{GaussianPosterior{0.0, q, p, omega0}, WaveCoefficient{ComplexVector(params.dim)}};
    const double position_gain = params.hbar / (2.0 * params.m * sigma_q2);
    for (std::size_t i = 0; i < params.dim; ++i)
        init.w.w[i] = complex{position_gain * q[i], p[i] / params.m};
    return init;
}

GaussianPosterior step_qp(const GaussianPosterior& state, std::span<const double> dq_tilde, double dt,
                          const PhysParams& params) {
    if (!(dt > 0.0)) throw InvalidParameter("dt", "must be positive");
    if (dq_tilde.size() != state.qhat.size()) throw ShapeMismatch("noise increment dimension mismatch");

    const complex omega = state.omega.value();
    const double root_half_lambda = std::sqrt(0.5 * params.lambda);
    const double q_gain = root_half_lambda / omega.real();
    const double p_gain = -params.hbar * root_half_lambda * omega.imag() / omega.real();

    GaussianPosterior next = state;
    for (std::size_t i = 0; i < state.qhat.size(); ++i) {
        next.qhat[i] = state.qhat[i] + state.phat[i] / params.m * dt + q_gain * dq_tilde[i];
        next.phat[i] = state.phat[i] + p_gain * dq_tilde[i];
    }
    const complex advanced = riccati_rk4_step(omega, dt, params);
    if (!(advanced.real() > 0.0) || !std::isfinite(advanced.imag()))
        throw BlowUp(state.t + dt, 0, "Re(omega) left the positive half-plane");
    next.omega = ComplexWidth{advanced};
    next.t = state.t + dt;
    return next;
}

WaveCoefficient step_w(const WaveCoefficient& w, const complex& omega, std::span<const double> dq, double dt,
                       const PhysParams& params) {
    if (dq.size() != w.w.size()) throw ShapeMismatch("noise increment dimension mismatch");
    const complex decay = complex{0.0, -params.hbar / params.m * dt} * omega;
    const double drive = std::sqrt(0.5 * params.lambda) * params.hbar / params.m;
    WaveCoefficient next = w;
    for (std::size_t i = 0; i < w.w.size(); ++i) next.w[i] = w.w[i] + decay * w.w[i] + drive * dq[i];
    return next;
}

TrajectoryRecord simulate_trajectory(const InitialState& init, const NoisePath& path, const PhysParams& params,
                                     const TrajectoryOptions& options) {
    if (path.dim != params.dim) throw ShapeMismatch("noise path dimension differs from params.dim");
    if (path.kind != NoiseKind::innovation) throw InvalidParameter("kind", "trajectories are driven by innovations");
    if (init.posterior.qhat.size() != params.dim) throw ShapeMismatch("initial state dimension differs from params.dim");
    const std::size_t every = options.record_every == 0 ? 1 : options.record_every;
    const std::size_t n = path.n_steps;
    auto recorded = [&](std::size_t k) { return k % every == 0 || k == n; };

    TrajectoryRecord rec;
    rec.params = params;
    rec.seed = path.seed;
    rec.t_grid.reserve(n / every + 2);
    rec.states.reserve(n / every + 2);

    // Pre-step means, needed to derive the output record for the w route.
    std::vector<double> qhat_series;
    if (options.record_w) qhat_series.resize(n * params.dim);

    GaussianPosterior state = init.posterior;
    rec.t_grid.push_back(state.t);
    rec.states.push_back(state);
    for (std::size_t k = 0; k < n; ++k) {
        if (options.record_w)
            for (std::size_t i = 0; i < params.dim; ++i) qhat_series[k * params.dim + i] = state.qhat[i];
        try {
            state = step_qp(state, path.row(k), path.dt, params);
        } catch (const BlowUp& e) {
            throw BlowUp(e.time(), k + 1, "Re(omega) left the positive half-plane");
        }
        // Time from the step index, not accumulated, so t_grid has no drift.
        state.t = init.posterior.t + static_cast<double>(k + 1) * path.dt;
        if (recorded(k + 1)) {
            rec.t_grid.push_back(state.t);
            rec.states.push_back(state);
        }
    }

    if (options.record_w) {
        const NoisePath output = innovation_to_output(path, qhat_series, params);
        std::vector<WaveCoefficient> ws;
        ws.reserve(rec.states.size());
        WaveCoefficient w = init.w;
        ws.push_back(w);
        complex omega = init.posterior.omega.value();
        for (std::size_t k = 0; k < n; ++k) {
            w = step_w(w, omega, output.row(k), path.dt, params);
            omega = riccati_rk4_step(omega, path.dt, params);
            if (recorded(k + 1)) ws.push_back(w);
        }
        rec.w_series = std::move(ws);
    }
    return rec;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
    const std::size_t dim = record.params.dim;
    std::vector<std::string> header{"t"};
    for (std::size_t j = 1; j <= dim; ++j) header.push_back("qhat_" + std::to_string(j));
    for (std::size_t j = 1; j <= dim; ++j) header.push_back("phat_" + std::to_string(j));
    for (const char* c : {"re_omega", "im_omega", "tau_q2", "tau_p2"}) header.emplace_back(c);

    CsvWriter csv(os, header);
    for (const auto& s : record.states) {
        const Dispersions d = dispersions(s.omega, record.params);
        csv.number(s.t);
        for (double q : s.qhat) csv.number(q);
        for (double p : s.phat) csv.number(p);
        csv.number(s.omega.re()).number(s.omega.im()).number(d.tau_q2).number(d.tau_p2);
        csv.end_row();
    }
}

}  // namespace qfilter
