#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "quasiherm/matrixkit.hpp"

namespace quasiherm {

/// The three toy-universe families of distance operators Q(t).
enum class ModelKind {
    Bang,        ///< Q0 + sqrt(1 - t) Q1
    Cyclic,      ///< Q0 + sqrt(1 - t^2) Q1
    CrunchBang,  ///< fixed 8x8 piecewise-linear tridiagonal chain
};

struct ModelSpec {
    ModelKind kind = ModelKind::Bang;
    int dim = 2;
};

inline constexpr int kCrunchBangDim = 8;

/// Validated constructor. Throws InputError for dim < 2 or a CrunchBang
/// spec with dim != 8.
ModelSpec make_model(ModelKind kind, int dim);
void validate(const ModelSpec& spec);

std::string_view kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

CMatrix build_q(const ModelSpec& spec, double t);

/// Entrywise dQ/dt. Throws DomainError at the kinks of the time dependence.
CMatrix build_q_time_derivative(const ModelSpec& spec, double t);

/// Closed-form spectrum, canonically ordered. Throws DomainError for
/// CrunchBang outside (0, 1).
std::vector<Complex> oracle_spectrum(const ModelSpec& spec, double t);

/**
 * Numerical spectrum of the model, canonically ordered. The matrix is built
 * and diagonalized with 100 significant digits: near t = 0 the eigenvalues
 * are so sensitive that rounding the entries of build_q to double already
 * moves them by more than 1e-8 (N = 10, t = 0.04).
 */
std::vector<Complex> model_spectrum(const ModelSpec& spec, double t);

/// build_q evaluated in an arbitrary real scalar type (e.g. a
/// multiprecision float), so that matrix entries carry no double rounding.
template <class Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> build_q_as(const ModelSpec& spec,
                                                                               double t);

// ---------------------------------------------------------------------------

namespace detail {

// Principal square root of a real argument: i*sqrt(|x|) for x < 0.
template <class Real>
std::complex<Real> principal_sqrt(const Real& x) {
    using std::sqrt;
    if (x >= Real(0)) return {sqrt(x), Real(0)};
    return {Real(0), sqrt(-x)};
}

}  // namespace detail

template <class Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> build_q_as(const ModelSpec& spec,
                                                                               double t) {
    using std::abs;
    using std::sqrt;
    using Cx = std::complex<Real>;
    using Mat = Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic>;
    validate(spec);
    if (!std::isfinite(t)) throw InputError("build_q: time must be finite");

    const int n = spec.dim;
    Mat q = Mat::Constant(n, n, Cx(Real(0), Real(0)));
    const Real tt(t);

    if (spec.kind == ModelKind::CrunchBang) {
        const Real at = abs(tt);
        const Real one(1);
        const Real super[7] = {one - tt, one - tt, one - at, one - at, one - at, one - tt, one - tt};
        const Real sub[7] = {tt, tt, at, at, at, tt, tt};
        for (int k = 0; k < 7; ++k) {
            q(k, k + 1) = Cx(super[k], Real(0));
            q(k + 1, k) = Cx(sub[k], Real(0));
        }
        return q;
    }

    const Real arg = spec.kind == ModelKind::Bang ? Real(1) - tt : Real(1) - tt * tt;
    const Cx s = detail::principal_sqrt(arg);
    for (int k = 0; k < n; ++k) q(k, k) = Cx(Real(-n + 1 + 2 * k), Real(0));
    for (int k = 0; k + 1 < n; ++k) {
        const Real w = sqrt(Real((k + 1) * (n - k - 1)));
        const Cx v(w * s.real(), w * s.imag());
        q(k, k + 1) = v;
        q(k + 1, k) = -v;
    }
    return q;
}

}  // namespace quasiherm
