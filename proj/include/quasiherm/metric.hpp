#pragma once

#include <optional>
#include <span>
#include <vector>

#include "quasiherm/matrixkit.hpp"
#include "quasiherm/models.hpp"

namespace quasiherm {

/// Eigenvector condition number above which a metric is still returned but
/// flagged as low-confidence.
inline constexpr double kDegradedCondition = 1e8;

/// A candidate physical metric Θ for some observable Q.
struct MetricResult {
    CMatrix theta;
    std::vector<double> kappa;
    double residual = 0.0;  ///< ‖Q†Θ − ΘQ‖_F
    double min_eig = 0.0;
    double max_eig = 0.0;
    bool positive = false;
    double condition = 1.0;  ///< eigenvector condition number of Q
    bool degraded = false;   ///< condition > kDegradedCondition
};

/// Θ = Ω†Ω with Ω the positive square root of Θ.
struct DysonMap {
    CMatrix omega;
    CMatrix omega_inv;
    double cond = 1.0;
};

enum class HermitizeDirection {
    ToPhysical,    ///< 𝔮 = Ω Q Ω⁻¹
    FromPhysical,  ///< A = Ω⁻¹ 𝔞 Ω
};

/// ‖Q†Θ − ΘQ‖_F.
double quasi_residual(const CMatrix& q, const CMatrix& theta);

/**
 * Θ = L† diag(κ) L built from the left eigenvectors of a simple, real
 * spectrum. Rows of L are normalized against unit-norm right eigenvectors
 * (ℓ_m r_n = δ_mn), which makes κ the only freedom.
 *
 * Throws DomainError for a complex eigenvalue (broken phase) or a
 * defective eigensystem; InputError for bad κ.
 */
MetricResult metric_family(const EigSystem& eig, std::span<const double> kappa,
                           double tol = kDefaultTol);

/// Same construction, with the residual measured against q itself.
MetricResult metric_family(const CMatrix& q, std::span<const double> kappa,
                           double tol = kDefaultTol);

/// κ_n = 1 for all n.
MetricResult metric_family(const CMatrix& q, double tol = kDefaultTol);

/**
 * Diagonal metric diag(d) with d_1 = 1, d_{n+1} = d_n Q_{n,n+1}/Q_{n+1,n}
 * for a real tridiagonal q (the real diagonal of q plays no role). Returns
 * nullopt when some link ratio is non-positive. Throws InputError for other
 * shapes or a zero off-diagonal entry.
 */
std::optional<MetricResult> diagonal_metric(const CMatrix& q, double tol = kDefaultTol);

/// Throws DomainError when mr is not positive definite.
DysonMap dyson_from_metric(const MetricResult& mr, double tol = kDefaultTol);

/// Throws DomainError when d.cond exceeds 1/tol.
CMatrix hermitize(const CMatrix& q, const DysonMap& d, double tol = kDefaultTol,
                  HermitizeDirection direction = HermitizeDirection::ToPhysical);

/// Metric, Dyson map and self-adjoint avatar of a model observable.
struct PhysicalPicture {
    MetricResult metric;
    DysonMap dyson;
    CMatrix hermitian;  ///< Ω Q Ω⁻¹
};

/**
 * metric_family -> dyson_from_metric -> hermitize for a model, carried out
 * with 100 significant digits and rounded at the end. Near t = 0 the
 * eigenvector basis is so ill-conditioned that the double pipeline loses
 * positivity of Θ (Bang N = 10 at t = 0.04) and the Hermiticity of 𝔮.
 *
 * metric.residual is measured in double against build_q(spec, t).
 * Same errors as the double pipeline; a metric whose smallest eigenvalue is
 * not positive raises DomainError even though `positive` uses tol.
 */
PhysicalPicture model_physical_picture(const ModelSpec& spec, double t,
                                       std::span<const double> kappa, double tol = kDefaultTol);

}  // namespace quasiherm
