#include "qfilter/core_types.hpp"

#include <cmath>
#include <string>

namespace qfilter {

PhysParams make_params(double m, double hbar, double lambda, std::size_t dim) {
    if (!(std::isfinite(m) && m > 0.0)) throw InvalidParameter("m", "mass must be positive, got " + std::to_string(m));
    if (!(std::isfinite(hbar) && hbar > 0.0))
        throw InvalidParameter("hbar", "must be positive, got " + std::to_string(hbar));
    if (!(std::isfinite(lambda) && lambda >= 0.0))
        throw InvalidParameter("lambda", "must be non-negative, got " + std::to_string(lambda));
    if (dim != 1 && dim != 3) throw InvalidParameter("dim", "must be 1 or 3, got " + std::to_string(dim));
    return PhysParams{m, hbar, lambda, dim};
}

ComplexWidth::ComplexWidth(complex value) : value_(value) {
    if (!(std::isfinite(value.real()) && std::isfinite(value.imag())))
        throw NonNormalizable("omega is not finite");
    if (!(value.real() > 0.0))
        throw NonNormalizable("Re(omega) = " + std::to_string(value.real()) + " is not positive");
}

Dispersions dispersions(const complex& omega, const PhysParams& params) {
    if (!(omega.real() > 0.0)) throw NonNormalizable("Re(omega) = " + std::to_string(omega.real()) + " is not positive");
    const double two_re = 2.0 * omega.real();
    return {1.0 / two_re, params.hbar * params.hbar * std::norm(omega) / two_re};
}

Dispersions dispersions(const ComplexWidth& omega, const PhysParams& params) {
    return dispersions(omega.value(), params);
}

WaveCoefficient wave_coefficient(const RealVector& qhat, const RealVector& phat, const ComplexWidth& omega,
                                 const PhysParams& params) {
    if (qhat.size() != phat.size()) throw ShapeMismatch("qhat and phat differ in dimension");
    ComplexVector w(qhat.size());
    const complex scale = (params.hbar / params.m) * omega.value();
    for (std::size_t i = 0; i < qhat.size(); ++i) w[i] = scale * qhat[i] + complex{0.0, phat[i] / params.m};
    return {w};
}

MeanPair reconstruct_qp(const WaveCoefficient& w, const complex& omega, const PhysParams& params) {
    if (!(omega.real() > 0.0)) throw NonNormalizable("Re(omega) = " + std::to_string(omega.real()) + " is not positive");
    const std::size_t n = w.w.size();
    MeanPair out{RealVector(n), RealVector(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double q = params.m * w.w[i].real() / (params.hbar * omega.real());
        out.qhat[i] = q;
        out.phat[i] = (params.m * w.w[i] - params.hbar * omega * q).imag();
    }
    return out;
}

MeanPair reconstruct_qp(const WaveCoefficient& w, const ComplexWidth& omega, const PhysParams& params) {
    return reconstruct_qp(w, omega.value(), params);
}

ComplexVector osmotic_velocity(const WaveCoefficient& w, const ComplexWidth& omega, const PhysParams& params,
                               const RealVector& x) {
    if (x.size() != w.w.size()) throw ShapeMismatch("x and w differ in dimension");
    ComplexVector out(x.size());
    const complex scale = (params.hbar / params.m) * omega.value();
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = w.w[i] - scale * x[i];
    return out;
}

}  // namespace qfilter
