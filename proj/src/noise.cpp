#include "qfilter/noise.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "qfilter/csv.hpp"

namespace qfilter {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return mix64(mix64(base_seed) ^ index);
}

double GaussianSource::uniform_open_closed() {
    // (k + 1) / 2^53 with k in [0, 2^53): never zero, so log() is finite.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSource::operator()() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

NoisePath wiener_path(double dt, std::size_t n_steps, std::size_t dim, std::uint64_t seed) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt", "must be positive");
    if (n_steps < 1) throw InvalidParameter("n_steps", "must be at least 1");
    if (dim != 1 && dim != 3) throw InvalidParameter("dim", "must be 1 or 3");

    NoisePath path{dt, n_steps, dim, std::vector<double>(n_steps * dim), NoiseKind::innovation, seed};
    GaussianSource gauss(seed);
    const double sd = std::sqrt(dt);
    for (double& v : path.increments) v = sd * gauss();
    return path;
}

namespace {

NoisePath shift_by_position(const NoisePath& path, std::span<const double> qhat_series, const PhysParams& params,
                            double sign, NoiseKind result_kind) {
    if (qhat_series.size() != path.increments.size())
        throw ShapeMismatch("qhat series has " + std::to_string(qhat_series.size()) + " entries, path has " +
                            std::to_string(path.increments.size()));
    NoisePath out = path;
    out.kind = result_kind;
    const double gain = std::sqrt(2.0 * params.lambda) * path.dt;
    for (std::size_t i = 0; i < out.increments.size(); ++i) out.increments[i] += sign * gain * qhat_series[i];
    return out;
}

}  // namespace

NoisePath innovation_to_output(const NoisePath& path, std::span<const double> qhat_series, const PhysParams& params) {
    if (path.kind != NoiseKind::innovation) throw InvalidParameter("kind", "expected an innovation path");
    return shift_by_position(path, qhat_series, params, +1.0, NoiseKind::output);
}

NoisePath output_to_innovation(const NoisePath& path, std::span<const double> qhat_series, const PhysParams& params) {
    if (path.kind != NoiseKind::output) throw InvalidParameter("kind", "expected an output path");
    return shift_by_position(path, qhat_series, params, -1.0, NoiseKind::innovation);
}

void write_noise_csv(std::ostream& os, const NoisePath& path) {
    std::vector<std::string> header{"step"};
    for (std::size_t j = 1; j <= path.dim; ++j) header.push_back("dQ_" + std::to_string(j));
    CsvWriter csv(os, header);
    for (std::size_t k = 0; k < path.n_steps; ++k) {
        csv.integer(k);
        for (double v : path.row(k)) csv.number(v);
        csv.end_row();
    }
}

NoisePath read_noise_csv(std::istream& is, double dt, NoiseKind kind, std::uint64_t seed) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError(1, "missing header");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "step") throw ParseError(1, "expected header step,dQ_1..");
    NoisePath path;
    path.dt = dt;
    path.dim = header.size() - 1;
    path.kind = kind;
    path.seed = seed;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw ParseError(line_no, "wrong number of columns");
        for (std::size_t j = 1; j < cells.size(); ++j) {
            try {
                std::size_t used = 0;
                path.increments.push_back(std::stod(cells[j], &used));
                if (used != cells[j].size()) throw std::invalid_argument(cells[j]);
            } catch (const std::exception&) {
                throw ParseError(line_no, "malformed number '" + cells[j] + "'");
            }
        }
        ++path.n_steps;
    }
    return path;
}

}  // namespace qfilter
