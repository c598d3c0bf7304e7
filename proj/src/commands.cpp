#include "qfilter/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qfilter/csv.hpp"
#include "qfilter/ensemble.hpp"
#include "qfilter/gaussian_filter.hpp"
#include "qfilter/grid_sse.hpp"
#include "qfilter/riccati.hpp"
#include "qfilter/run_record.hpp"

namespace qfilter {

namespace {

namespace fs = std::filesystem;

// Collects output files and summary lines for one run.
class RunContext {
public:
    RunContext(const fs::path& dir, std::ostream& log) : dir_(dir), log_(log) {}

    std::ofstream open(const std::string& name) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw IoError("cannot write '" + (dir_ / name).string() + "'");
        files_.push_back(name);
        return out;
    }

    void summary(const std::string& line) {
        log_ << line << '\n';
        summaries_ += line + '\n';
    }

    void gate(bool ok) { passed_ = passed_ && ok; }
    bool passed() const { return passed_; }

    void finish(std::string_view subcommand, const Config& config, double wall_time) {
        if (!summaries_.empty()) {
            std::ofstream out = open("summary.txt");
            out << summaries_;
        }
        RunRecord rec{std::string(subcommand), QFILTER_VERSION, wall_time, render_config(config), {}};
        for (const auto& f : files_) rec.files.push_back({f, sha256_file(dir_ / f)});
        write_run_record(dir_ / "run_record.txt", rec);
    }

private:
    fs::path dir_;
    std::ostream& log_;
    std::vector<std::string> files_;
    std::string summaries_;
    bool passed_ = true;
};

const char* status(bool ok) { return ok ? "pass" : "fail"; }

std::size_t step_count(const Config& c) {
    return static_cast<std::size_t>(std::llround(c.run.t_end / c.run.dt));
}

InitialState packet_state(const Config& c) {
    return initial_from_packet(c.packet.q, c.packet.p, c.packet.sigma_q2, c.params);
}

void require_one_dimensional(const Config& c, std::string_view what) {
    if (c.params.dim != 1) throw InvalidParameter("params.dim", std::string(what) + " runs on a 1-D lattice");
}

void cmd_riccati(const Config& c, RunContext& ctx) {
    const PhysParams& pp = c.params;
    const ComplexWidth omega0{complex{1.0 / (2.0 * c.packet.sigma_q2), 0.0}};
    double t_end = c.riccati_t_end;
    if (t_end == 0.0) t_end = pp.lambda > 0.0 ? 40.0 / relaxation_rate(pp) : c.run.t_end;

    const RiccatiSolution rk4 = integrate_riccati(omega0, pp, t_end, c.run.dt);
    const std::size_t n = rk4.t_grid.size();

    std::ofstream out = ctx.open("riccati.csv");
    CsvWriter csv(out, {"t", "re_omega", "im_omega", "tau_q2", "tau_p2", "re_omega_analytic", "im_omega_analytic",
                        "abs_deviation"});
    double max_dev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const complex num = rk4.omega_series[k].value();
        const complex exact = omega_analytic(rk4.t_grid[k], omega0, pp).value();
        const double dev = std::abs(num - exact);
        max_dev = std::max(max_dev, dev);
        if (k % c.run.record_every == 0 || k + 1 == n) {
            const Dispersions d = dispersions(num, pp);
            csv.number(rk4.t_grid[k]).number(num.real()).number(num.imag()).number(d.tau_q2).number(d.tau_p2);
            csv.number(exact.real()).number(exact.imag()).number(dev);
            csv.end_row();
        }
    }
    const bool agree = max_dev <= 1e-6;
    ctx.gate(agree);
    ctx.summary("riccati: max_abs_deviation=" + format_double(max_dev) + " tolerance=1e-06 status=" + status(agree));

    if (pp.lambda > 0.0 && t_end >= 40.0 / relaxation_rate(pp) * (1.0 - 1e-12)) {
        const complex alpha = omega_stationary(pp).value();
        const double gap = std::abs(rk4.omega_series.back().value() - alpha);
        const bool converged = gap < 1e-9;
        ctx.gate(converged);
        const Dispersions lim = asymptotic_dispersions(pp);
        ctx.summary("riccati: final_abs_gap_to_alpha=" + format_double(gap) + " tau_q2_inf=" +
                    format_double(lim.tau_q2) + " tau_p2_inf=" + format_double(lim.tau_p2) +
                    " tolerance=1e-09 status=" + status(converged));
    }
}

void cmd_trajectory(const Config& c, RunContext& ctx) {
    const InitialState init = packet_state(c);
    const NoisePath path = wiener_path(c.run.dt, step_count(c), c.params.dim, c.run.seed);
    const TrajectoryRecord rec =
        simulate_trajectory(init, path, c.params, {c.outputs.record_w, c.run.record_every});
    {
        std::ofstream out = ctx.open("trajectory.csv");
        write_trajectory_csv(out, rec);
    }
    {
        std::ofstream out = ctx.open("noise.csv");
        write_noise_csv(out, path);
    }
    if (rec.w_series) {
        double max_dev = 0.0;
        for (std::size_t k = 0; k < rec.states.size(); ++k) {
            const MeanPair qp = reconstruct_qp((*rec.w_series)[k], rec.states[k].omega, c.params);
            for (std::size_t j = 0; j < c.params.dim; ++j)
                max_dev = std::max({max_dev, std::abs(qp.qhat[j] - rec.states[k].qhat[j]),
                                    std::abs(qp.phat[j] - rec.states[k].phat[j])});
        }
        ctx.summary("trajectory: w_route_max_abs_deviation=" + format_double(max_dev));
    }
}

void cmd_grid(const Config& c, RunContext& ctx) {
    require_one_dimensional(c, "grid");
    const GridSpec spec = resolve_grid(c);
    const GridState init = init_grid(c.packet.q[0], c.packet.p[0], c.packet.sigma_q2, spec, c.params);
    const NoisePath path = wiener_path(c.run.dt, step_count(c), 1, c.run.seed);

    GridRunOptions opts;
    opts.record_every = c.run.record_every;
    opts.snapshot_every = c.grid.snapshot_every;
    opts.on_snapshot = [&](const GridState& s, std::size_t step) {
        std::ofstream out = ctx.open("grid_snapshot_" + std::to_string(step) + ".csv");
        write_snapshot_csv(out, s);
    };
    const GridRun run = run_grid(init, path, c.params, opts);
    std::ofstream out = ctx.open("grid_moments.csv");
    write_grid_moments_csv(out, run.samples, c.params);
}

void cmd_compare(const Config& c, RunContext& ctx) {
    require_one_dimensional(c, "compare");
    const GridSpec spec = resolve_grid(c);
    const NoisePath path = wiener_path(c.run.dt, step_count(c), 1, c.run.seed);

    const TrajectoryRecord gauss = simulate_trajectory(packet_state(c), path, c.params, {false, 1});
    const GridState init = init_grid(c.packet.q[0], c.packet.p[0], c.packet.sigma_q2, spec, c.params);
    const GridRun grid = run_grid(init, path, c.params, {GridEquation::nonlinear, 1, 0, {}});

    std::ofstream out = ctx.open("compare.csv");
    CsvWriter csv(out, {"t", "qhat_grid", "qhat_gauss", "phat_grid", "phat_gauss", "tau_q2_grid", "tau_q2_gauss",
                        "rel_dev_qhat", "rel_dev_tau_q2"});
    double max_q = 0.0, max_tau = 0.0;
    const std::size_t n = gauss.states.size();
    for (std::size_t k = 0; k < n; ++k) {
        const GaussianPosterior& g = gauss.states[k];
        const Moments& m = grid.samples[k].moments;
        const double tau = dispersions(g.omega, c.params).tau_q2;
        const double dq = std::abs(m.qhat - g.qhat[0]) / std::max(std::abs(g.qhat[0]), std::sqrt(tau));
        const double dtau = std::abs(m.tau_q2 - tau) / tau;
        max_q = std::max(max_q, dq);
        max_tau = std::max(max_tau, dtau);
        if (k % c.run.record_every == 0 || k + 1 == n) {
            csv.number(g.t).number(m.qhat).number(g.qhat[0]).number(m.phat).number(g.phat[0]);
            csv.number(m.tau_q2).number(tau).number(dq).number(dtau);
            csv.end_row();
        }
    }
    const bool ok = max_q <= c.compare_tolerance && max_tau <= c.compare_tolerance;
    ctx.gate(ok);
    ctx.summary("compare: max_rel_dev_qhat=" + format_double(max_q) + " max_rel_dev_tau_q2=" +
                format_double(max_tau) + " tolerance=" + format_double(c.compare_tolerance) +
                " status=" + status(ok));
}

void cmd_ensemble(const Config& c, RunContext& ctx) {
    const InitialState init = packet_state(c);
    const EnsembleStats stats = run_ensemble(init, c.params, c.run.dt, c.run.t_end, c.run.n_traj, c.run.seed,
                                             {c.run.record_every, c.run.workers});
    {
        std::ofstream out = ctx.open("ensemble.csv");
        write_ensemble_csv(out, stats);
    }
    const BallisticCheck check = check_ballistic_law(stats, init, c.params);
    ctx.gate(check.passed);
    ctx.summary("ensemble: final_qhat_deviation_stderr=" + format_double(check.final_q_deviation) +
                " max_phat_deviation_stderr=" + format_double(check.max_p_deviation) +
                " bound=3 status=" + status(check.passed));
}

void cmd_martingale(const Config& c, RunContext& ctx) {
    require_one_dimensional(c, "martingale");
    const MartingaleSetup setup{c.packet.q[0], c.packet.p[0], c.packet.sigma_q2, resolve_grid(c)};
    const MartingaleResult r =
        martingale_check(setup, c.params, c.run.dt, c.run.t_end, c.run.n_traj, c.run.seed, c.run.workers);
    {
        std::ofstream out = ctx.open("martingale.txt");
        out << "likelihood_mean=" << format_double(r.likelihood_mean) << '\n'
            << "likelihood_stderr=" << format_double(r.likelihood_stderr) << '\n';
    }
    ctx.gate(r.within_3_stderr);
    ctx.summary("martingale: likelihood_mean=" + format_double(r.likelihood_mean) + " likelihood_stderr=" +
                format_double(r.likelihood_stderr) + " n_traj=" + std::to_string(r.n_traj) +
                " bound=3 status=" + status(r.within_3_stderr));
}

}  // namespace

int run_subcommand(std::string_view name, const Config& config, const std::filesystem::path& out_dir,
                   std::ostream& log) {
    if (std::find(subcommands.begin(), subcommands.end(), name) == subcommands.end())
        throw InvalidParameter("subcommand", "unknown subcommand '" + std::string(name) + "'");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    const auto start = std::chrono::steady_clock::now();
    RunContext ctx(out_dir, log);
    if (name == "riccati") cmd_riccati(config, ctx);
    else if (name == "trajectory") cmd_trajectory(config, ctx);
    else if (name == "grid") cmd_grid(config, ctx);
    else if (name == "compare") cmd_compare(config, ctx);
    else if (name == "ensemble") cmd_ensemble(config, ctx);
    else cmd_martingale(config, ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ctx.finish(name, config, wall);
    return ctx.passed() ? 0 : 1;
}

}  // namespace qfilter
