#ifndef QFILTER_CONFIG_HPP
#define QFILTER_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qfilter/core_types.hpp"
#include "qfilter/grid_sse.hpp"

namespace qfilter {

// Flat key=value run configuration. One pair per line, '#' starts a comment,
// unknown keys are rejected and missing keys take the defaults below.
//
//   params.mass=1  params.hbar=1  params.lambda=1  params.dim=1
//   packet.q=0  packet.p=0  packet.sigma_q2=1    (q, p: scalar or dim comma-separated values)
//   run.dt=1e-4  run.t_end=5  run.seed=42  run.n_traj=1  run.record_every=100  run.workers=0
//   grid.x_min, grid.x_max (auto)  grid.n_points=2048  grid.snapshot_every=0
//   riccati.t_end=0 (auto: 40 relaxation times)  compare.tolerance=0.01
//   outputs.dir=.  outputs.record_w=false

struct PacketConfig {
    RealVector q{0.0};
    RealVector p{0.0};
    double sigma_q2 = 1.0;
};

struct RunConfig {
    double dt = 1e-4;
    double t_end = 5.0;
    std::uint64_t seed = 42;
    std::size_t n_traj = 1;
    std::size_t record_every = 100;
    std::size_t workers = 0;
};

struct GridConfig {
    std::optional<double> x_min;
    std::optional<double> x_max;
    std::size_t n_points = 2048;
    std::size_t snapshot_every = 0;
};

struct OutputConfig {
    std::string dir = ".";
    bool record_w = false;
};

struct Config {
    PhysParams params;
    PacketConfig packet;
    RunConfig run;
    GridConfig grid;
    double riccati_t_end = 0.0;
    double compare_tolerance = 1e-2;
    OutputConfig outputs;
};

Config parse_config(std::string_view text);
Config load_config(const std::string& path);

/// Replaces run.seed with QFILTER_SEED when that variable is set.
void apply_env_overrides(Config& config);

/// Canonical key=value rendering, re-parseable by parse_config.
std::string render_config(const Config& config);

/// Lattice used by grid-based subcommands: explicit grid.x_min/x_max when
/// given, otherwise centred on the mid-point of the ballistic path with
/// half-width 20 max(sigma_q, tau_q) plus the ballistic and diffusive excursion
/// expected over run.t_end.
GridSpec resolve_grid(const Config& config);

}  // namespace qfilter

#endif  // QFILTER_CONFIG_HPP
