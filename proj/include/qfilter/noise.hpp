#ifndef QFILTER_NOISE_HPP
#define QFILTER_NOISE_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "qfilter/core_types.hpp"

namespace qfilter {

enum class NoiseKind { innovation, output };

/// Discretized driving noise, stored row-major as [n_steps x dim].
struct NoisePath {
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::size_t dim = 1;
    std::vector<double> increments;
    NoiseKind kind = NoiseKind::innovation;
    std::uint64_t seed = 0;

    std::span<const double> row(std::size_t k) const { return {increments.data() + k * dim, dim}; }
    std::span<double> row(std::size_t k) { return {increments.data() + k * dim, dim}; }
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of trajectory `index` in an ensemble: mix64(mix64(base) ^ index).
/// Distinct indices give distinct seeds, independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

/// Standard normal sampler with a fixed transform: mt19937_64 words are
/// mapped to 53-bit uniforms on (0, 1] and paired through Box-Muller
/// (cosine branch first, sine branch cached). std::normal_distribution is
/// avoided because its algorithm is implementation-defined.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double operator()();

private:
    double uniform_open_closed();

    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// i.i.d. N(0, dt) increments, dim per step; kind = innovation.
NoisePath wiener_path(double dt, std::size_t n_steps, std::size_t dim, std::uint64_t seed);

/// dQ_k = dQtilde_k + (2 lambda)^{1/2} qhat(t_k) dt. qhat_series is [n_steps x dim] row-major.
NoisePath innovation_to_output(const NoisePath& path, std::span<const double> qhat_series, const PhysParams& params);

/// Inverse of innovation_to_output.
NoisePath output_to_innovation(const NoisePath& path, std::span<const double> qhat_series, const PhysParams& params);

/// CSV dump with columns step, dQ_1..dQ_dim.
void write_noise_csv(std::ostream& os, const NoisePath& path);

/// Restores a path written by write_noise_csv. dt, kind and seed are not part
/// of the CSV and must be supplied.
NoisePath read_noise_csv(std::istream& is, double dt, NoiseKind kind, std::uint64_t seed);

}  // namespace qfilter

#endif  // QFILTER_NOISE_HPP
