// Multiprecision spectra of the model family.
//
// Near an N-fold exceptional point the eigenvalues move by about
// delta^(1/N) under a perturbation delta of the entries; with double
// entries that is ~0.05 for N = 10 at t = 0, and still ~1e-7 at t = 0.04.
// Both the matrix and the eigensolve therefore use 100 significant digits.

#include <algorithm>
#include <complex>
#include <numeric>
#include <string>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Eigenvalues>

#include "quasiherm/flow.hpp"
#include "quasiherm/metric.hpp"

namespace quasiherm {

using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>,
                                           boost::multiprecision::et_off>;
using Cx = std::complex<Real>;
using XMatrix = Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic>;
using XVector = Eigen::Matrix<Cx, Eigen::Dynamic, 1>;

namespace {

void solve(Eigen::ComplexEigenSolver<XMatrix>& es, const XMatrix& q, bool vectors) {
    // QR iterations converge slowly onto a defective eigenvalue.
    es.setMaxIterations(1000 * q.rows());
    es.compute(q, vectors);
    if (es.info() != Eigen::Success) {
        throw DomainError("extended-precision eigensolver did not converge");
    }
}

XVector extended_eigenvalues(const ModelSpec& spec, double t) {
    validate(spec);
    Eigen::ComplexEigenSolver<XMatrix> es;
    solve(es, build_q_as<Real>(spec, t), false);
    return es.eigenvalues();
}

CMatrix to_double(const XMatrix& m) {
    CMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(i, j) = Complex(static_cast<double>(m(i, j).real()),
                                static_cast<double>(m(i, j).imag()));
    return out;
}

}  // namespace
}  // namespace quasiherm

// Eigen's hypot special-cases inf/NaN through NumTraits members that the
// boost adaptor does not provide; values here are always finite.
template <>
inline quasiherm::Real Eigen::internal::positive_real_hypot<quasiherm::Real>(
    const quasiherm::Real& x, const quasiherm::Real& y) {
    return sqrt(x * x + y * y);
}

namespace quasiherm {

std::vector<Complex> model_spectrum(const ModelSpec& spec, double t) {
    const XVector ev = extended_eigenvalues(spec, t);
    std::vector<Complex> out;
    out.reserve(ev.size());
    double scale = 1.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        out.emplace_back(static_cast<double>(ev(i).real()), static_cast<double>(ev(i).imag()));
        scale = std::max(scale, std::abs(out.back()));
    }
    sort_spectrum(out, kDefaultTol * scale);
    return out;
}

double model_gap_extended(const ModelSpec& spec, double t) {
    const XVector ev = extended_eigenvalues(spec, t);
    if (ev.size() < 2) return 0.0;
    Real gap = std::numeric_limits<Real>::max();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
            const Real d = abs(ev(i) - ev(j));
            if (d < gap) gap = d;
        }
    }
    return static_cast<double>(gap);
}

PhysicalPicture model_physical_picture(const ModelSpec& spec, double t,
                                       std::span<const double> kappa, double tol) {
    validate(spec);
    const auto n = static_cast<Eigen::Index>(spec.dim);
    if (kappa.size() != static_cast<std::size_t>(n)) {
        throw InputError("metric_family: expected " + std::to_string(n) + " kappa weights, got " +
                         std::to_string(kappa.size()));
    }
    for (double k : kappa) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw InputError("metric_family: kappa weights must be positive and finite");
        }
    }

    const XMatrix q = build_q_as<Real>(spec, t);
    Eigen::ComplexEigenSolver<XMatrix> es;
    solve(es, q, true);

    Real scale = 1;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, Real(abs(es.eigenvalues()(i))));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (abs(es.eigenvalues()(i).imag()) > tol * scale) {
            throw DomainError("complex spectrum: no positive metric");
        }
    }

    // Ascending real eigenvalues, unit right eigenvectors.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return es.eigenvalues()(a).real() < es.eigenvalues()(b).real();
    });
    XMatrix r(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const XVector c = es.eigenvectors().col(order[k]);
        r.col(k) = c / Cx(sqrt(c.squaredNorm()));
    }

    Eigen::FullPivLU<XMatrix> lu(r);
    if (!lu.isInvertible()) {
        throw DomainError("defective eigensystem: no positive metric at an exceptional point");
    }
    const XMatrix left = lu.inverse();
    Real max_condition = 1;
    for (Eigen::Index k = 0; k < n; ++k) {
        max_condition = std::max(max_condition, Real(sqrt(left.row(k).squaredNorm())));
    }
    if (max_condition > 1 / Real(tol)) {
        throw DomainError("defective eigensystem (condition " +
                          std::to_string(static_cast<double>(max_condition)) +
                          "): no positive metric at an exceptional point");
    }

    XVector k(n);
    for (Eigen::Index i = 0; i < n; ++i) k(i) = Cx(Real(kappa[i]));
    XMatrix theta = left.adjoint() * k.asDiagonal() * left;
    theta = (theta + theta.adjoint()) / Real(2);

    Eigen::SelfAdjointEigenSolver<XMatrix> se(theta);
    if (se.info() != Eigen::Success) {
        throw DomainError("extended-precision Hermitian eigensolver did not converge");
    }
    const auto& w = se.eigenvalues();
    const Real wmin = w.minCoeff();
    const Real wmax = w.maxCoeff();
    if (!(wmin > 0)) {
        throw DomainError("metric is not positive definite: no physical Dyson map at this time");
    }
    XVector root(n), inv_root(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        root(i) = Cx(sqrt(w(i)));
        inv_root(i) = Cx(1 / sqrt(w(i)));
    }
    const XMatrix& v = se.eigenvectors();
    const XMatrix omega = v * root.asDiagonal() * v.adjoint();
    const XMatrix omega_inv = v * inv_root.asDiagonal() * v.adjoint();

    PhysicalPicture pic;
    MetricResult& mr = pic.metric;
    mr.theta = to_double(theta);
    mr.kappa.assign(kappa.begin(), kappa.end());
    mr.residual = quasi_residual(build_q(spec, t), mr.theta);
    mr.min_eig = static_cast<double>(wmin);
    mr.max_eig = static_cast<double>(wmax);
    mr.positive = wmin > tol * wmax;
    mr.condition = static_cast<double>(max_condition);
    mr.degraded = mr.condition > kDegradedCondition;

    pic.dyson.omega = to_double(omega);
    pic.dyson.omega_inv = to_double(omega_inv);
    pic.dyson.cond = static_cast<double>(sqrt(wmax / wmin));
    pic.hermitian = to_double(omega * q * omega_inv);
    return pic;
}

}  // namespace quasiherm
