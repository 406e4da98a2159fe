#include "quasiherm/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace quasiherm {

double quasi_residual(const CMatrix& q, const CMatrix& theta) {
    require_square(q, "quasi_residual");
    require_same_shape(q, theta, "quasi_residual");
    return (q.adjoint() * theta - theta * q).norm();
}

namespace {

void check_kappa(std::span<const double> kappa, std::size_t n) {
    if (kappa.size() != n) {
        throw InputError("metric_family: expected " + std::to_string(n) + " kappa weights, got " +
                         std::to_string(kappa.size()));
    }
    for (double k : kappa) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw InputError("metric_family: kappa weights must be positive and finite");
        }
    }
}

void fill_spectrum_stats(MetricResult& mr, double tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(mr.theta, Eigen::EigenvaluesOnly);
    mr.min_eig = es.eigenvalues().minCoeff();
    mr.max_eig = es.eigenvalues().maxCoeff();
    mr.positive = mr.max_eig > 0.0 && mr.min_eig > tol * mr.max_eig;
}

MetricResult build_family(const EigSystem& eig, std::span<const double> kappa, double tol) {
    const auto n = eig.dim();
    check_kappa(kappa, n);

    double scale = 1.0;
    for (const auto& v : eig.eigenvalues) scale = std::max(scale, std::abs(v));
    for (const auto& v : eig.eigenvalues) {
        if (std::abs(v.imag()) > tol * scale) {
            throw DomainError("complex spectrum: no positive metric");
        }
    }
    if (eig.defective) {
        throw DomainError("defective eigensystem (condition " + std::to_string(eig.max_condition) +
                          "): no positive metric at an exceptional point");
    }

    MetricResult mr;
    mr.kappa.assign(kappa.begin(), kappa.end());
    Eigen::VectorXd k = Eigen::Map<const Eigen::VectorXd>(kappa.data(), n);
    const CMatrix& left = eig.left_basis;
    CMatrix theta = left.adjoint() * k.cast<Complex>().asDiagonal() * left;
    mr.theta = 0.5 * (theta + theta.adjoint());
    mr.condition = eig.max_condition;
    mr.degraded = eig.max_condition > kDegradedCondition;
    fill_spectrum_stats(mr, tol);
    return mr;
}

}  // namespace

MetricResult metric_family(const EigSystem& eig, std::span<const double> kappa, double tol) {
    MetricResult mr = build_family(eig, kappa, tol);
    mr.residual = quasi_residual(eig.reconstruct(), mr.theta);
    return mr;
}

MetricResult metric_family(const CMatrix& q, std::span<const double> kappa, double tol) {
    MetricResult mr = build_family(eig_full(q, tol), kappa, tol);
    mr.residual = quasi_residual(q, mr.theta);
    return mr;
}

MetricResult metric_family(const CMatrix& q, double tol) {
    require_square(q, "metric_family");
    const std::vector<double> ones(static_cast<std::size_t>(q.rows()), 1.0);
    return metric_family(q, ones, tol);
}

std::optional<MetricResult> diagonal_metric(const CMatrix& q, double tol) {
    require_square(q, "diagonal_metric");
    require_finite(q, "diagonal_metric");
    if (!is_real(q)) throw InputError("diagonal_metric: matrix must be real");
    const auto n = q.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(i - j) > 1 && q(i, j) != 0.0) {
                throw InputError("diagonal_metric: matrix must be tridiagonal");
            }
        }
    }

    Eigen::VectorXd d(n);
    d(0) = 1.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double up = q(i, i + 1).real();
        const double down = q(i + 1, i).real();
        if (up == 0.0 || down == 0.0) {
            throw InputError("diagonal_metric: zero off-diagonal entry at link " +
                             std::to_string(i + 1) + " (degenerate chain)");
        }
        const double ratio = up / down;
        if (!(ratio > 0.0)) return std::nullopt;
        d(i + 1) = d(i) * ratio;
    }

    MetricResult mr;
    mr.theta = d.cast<Complex>().asDiagonal();
    mr.residual = quasi_residual(q, mr.theta);
    fill_spectrum_stats(mr, tol);

    // κ_n = r_n† Θ r_n expresses Θ in the metric_family parameterization.
    try {
        const EigSystem eig = eig_full(q, tol);
        mr.condition = eig.max_condition;
        mr.degraded = eig.max_condition > kDegradedCondition;
        if (!eig.defective) {
            const CMatrix w = eig.right_basis.adjoint() * mr.theta * eig.right_basis;
            for (Eigen::Index i = 0; i < n; ++i) mr.kappa.push_back(w(i, i).real());
        }
    } catch (const DomainError&) {
        mr.degraded = true;
    }
    return mr;
}

DysonMap dyson_from_metric(const MetricResult& mr, double tol) {
    if (!mr.positive) {
        throw DomainError("metric is not positive definite: no physical Dyson map");
    }
    DysonMap dm;
    dm.omega = herm_sqrt(mr.theta, tol);
    dm.omega_inv = dm.omega.fullPivLu().inverse();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(dm.omega, Eigen::EigenvaluesOnly);
    dm.cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    return dm;
}

CMatrix hermitize(const CMatrix& q, const DysonMap& d, double tol, HermitizeDirection direction) {
    require_square(q, "hermitize");
    require_same_shape(q, d.omega, "hermitize");
    if (!(d.cond <= 1.0 / tol)) {
        throw DomainError("hermitize: Dyson map is ill-conditioned (cond " +
                          std::to_string(d.cond) + ")");
    }
    if (direction == HermitizeDirection::ToPhysical) return d.omega * q * d.omega_inv;
    return d.omega_inv * q * d.omega;
}

}  // namespace quasiherm
