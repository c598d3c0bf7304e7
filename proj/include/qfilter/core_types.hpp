#ifndef QFILTER_CORE_TYPES_HPP
#define QFILTER_CORE_TYPES_HPP

#include <array>
#include <cassert>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "qfilter/errors.hpp"

namespace qfilter {

using complex = std::complex<double>;

/// Fixed-capacity vector over the Cartesian components of the particle
/// (one or three). Kept on the stack so trajectory steps never allocate.
template <typename T>
class DimVector {
public:
    static constexpr std::size_t max_dim = 3;

    DimVector() = default;
    explicit DimVector(std::size_t dim, T fill = T{}) : dim_(dim) {
        assert(dim >= 1 && dim <= max_dim);
        for (std::size_t i = 0; i < dim_; ++i) data_[i] = fill;
    }
    DimVector(std::initializer_list<T> values) : dim_(values.size()) {
        assert(dim_ >= 1 && dim_ <= max_dim);
        std::size_t i = 0;
        for (const T& v : values) data_[i++] = v;
    }

    std::size_t size() const noexcept { return dim_; }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> span() noexcept { return {data_.data(), dim_}; }
    std::span<const T> span() const noexcept { return {data_.data(), dim_}; }

    T* begin() noexcept { return data_.data(); }
    T* end() noexcept { return data_.data() + dim_; }
    const T* begin() const noexcept { return data_.data(); }
    const T* end() const noexcept { return data_.data() + dim_; }

    friend bool operator==(const DimVector& a, const DimVector& b) {
        if (a.dim_ != b.dim_) return false;
        for (std::size_t i = 0; i < a.dim_; ++i)
            if (!(a.data_[i] == b.data_[i])) return false;
        return true;
    }

private:
    std::array<T, max_dim> data_{};
    std::size_t dim_ = 1;
};

using RealVector = DimVector<double>;
using ComplexVector = DimVector<complex>;

/// Physical constants of the observed free particle.
struct PhysParams {
    double m = 1.0;       // mass
    double hbar = 1.0;    // action quantum
    double lambda = 1.0;  // measurement accuracy coefficient, length^-2 time^-1
    std::size_t dim = 1;  // 1 or 3
};

/// Validates and builds PhysParams. Throws InvalidParameter naming the field.
PhysParams make_params(double m, double hbar, double lambda, std::size_t dim);

/// Complex Gaussian width of the posterior packet. Re(omega) > 0 always.
class ComplexWidth {
public:
    /// Throws NonNormalizable if Re(value) <= 0 or value is not finite.
    explicit ComplexWidth(complex value);

    const complex& value() const noexcept { return value_; }
    double re() const noexcept { return value_.real(); }
    double im() const noexcept { return value_.imag(); }

    friend bool operator==(const ComplexWidth& a, const ComplexWidth& b) { return a.value_ == b.value_; }

private:
    complex value_;
};

/// Filtered Gaussian state: posterior means and the shared complex width.
struct GaussianPosterior {
    double t = 0.0;
    RealVector qhat;
    RealVector phat;
    ComplexWidth omega{complex{1.0, 0.0}};
};

/// Constant part of the linear complex osmotic velocity,
/// w = (hbar/m) omega qhat + (i/m) phat.
struct WaveCoefficient {
    ComplexVector w;
};

struct Dispersions {
    double tau_q2;
    double tau_p2;
};

/// Posterior position and momentum dispersions of a Gaussian packet with
/// width omega: tau_q2 = 1/(2 Re w), tau_p2 = hbar^2 |w|^2 / (2 Re w).
Dispersions dispersions(const complex& omega, const PhysParams& params);
Dispersions dispersions(const ComplexWidth& omega, const PhysParams& params);

/// Forward coordinate map (qhat, phat, omega) -> w.
WaveCoefficient wave_coefficient(const RealVector& qhat, const RealVector& phat, const ComplexWidth& omega,
                                 const PhysParams& params);

struct MeanPair {
    RealVector qhat;
    RealVector phat;
};

/// Inverse of wave_coefficient: qhat = m Re w / (hbar Re omega),
/// phat = Im(m w - hbar omega qhat).
MeanPair reconstruct_qp(const WaveCoefficient& w, const complex& omega, const PhysParams& params);
MeanPair reconstruct_qp(const WaveCoefficient& w, const ComplexWidth& omega, const PhysParams& params);

/// Complex osmotic velocity W(x) = w - (hbar/m) omega x, componentwise.
ComplexVector osmotic_velocity(const WaveCoefficient& w, const ComplexWidth& omega, const PhysParams& params,
                               const RealVector& x);

}  // namespace qfilter

#endif  // QFILTER_CORE_TYPES_HPP
