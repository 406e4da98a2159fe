#include "quasiherm/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "quasiherm/assignment.hpp"

namespace quasiherm {

void require_square(const CMatrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw InputError(std::string(what) + ": matrix must be square and non-empty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

void require_finite(const CMatrix& m, const char* what) {
    if (!m.allFinite()) {
        throw InputError(std::string(what) + ": matrix has non-finite entries");
    }
}

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
    }
}

bool is_real(const CMatrix& m) { return (m.imag().array() == 0.0).all(); }

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).norm(); }

double spectral_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

namespace {

std::vector<int> canonical_order(const std::vector<Complex>& values, double tie_tol) {
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return values[a].real() < values[b].real();
    });
    // Re-sort runs of (nearly) equal real part by imaginary part.
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() &&
               values[order[end]].real() - values[order[end - 1]].real() <= tie_tol) {
            ++end;
        }
        std::stable_sort(order.begin() + start, order.begin() + end, [&](int a, int b) {
            return values[a].imag() < values[b].imag();
        });
        start = end;
    }
    return order;
}

double tie_tolerance(const std::vector<Complex>& values, double tol) {
    double scale = 1.0;
    for (const auto& v : values) scale = std::max(scale, std::abs(v));
    return tol * scale;
}

}  // namespace

void sort_spectrum(std::vector<Complex>& values, double tie_tol) {
    const auto order = canonical_order(values, tie_tol);
    std::vector<Complex> sorted;
    sorted.reserve(values.size());
    for (int i : order) sorted.push_back(values[i]);
    values = std::move(sorted);
}

namespace {

struct RawEigen {
    std::vector<Complex> values;
    CMatrix vectors;
};

RawEigen raw_eigen(const CMatrix& m, bool with_vectors) {
    RawEigen out;
    const auto n = m.rows();
    out.values.resize(n);
    if (is_real(m)) {
        // Real Schur keeps isolated real eigenvalues exactly real.
        Eigen::EigenSolver<Eigen::MatrixXd> es(m.real(), with_vectors);
        if (es.info() != Eigen::Success) throw DomainError("eigensolver did not converge");
        for (Eigen::Index i = 0; i < n; ++i) out.values[i] = es.eigenvalues()(i);
        if (with_vectors) out.vectors = es.eigenvectors();
    } else {
        Eigen::ComplexEigenSolver<CMatrix> es(m, with_vectors);
        if (es.info() != Eigen::Success) throw DomainError("eigensolver did not converge");
        for (Eigen::Index i = 0; i < n; ++i) out.values[i] = es.eigenvalues()(i);
        if (with_vectors) out.vectors = es.eigenvectors();
    }
    return out;
}

}  // namespace

std::vector<Complex> eigenvalues(const CMatrix& m) {
    require_square(m, "eigenvalues");
    require_finite(m, "eigenvalues");
    auto values = raw_eigen(m, false).values;
    sort_spectrum(values, tie_tolerance(values, kDefaultTol));
    return values;
}

CMatrix EigSystem::reconstruct() const {
    CVector lambda(eigenvalues.size());
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) lambda(i) = eigenvalues[i];
    return right_basis * lambda.asDiagonal() * left_basis;
}

EigSystem eig_full(const CMatrix& m, double tol) {
    require_square(m, "eig_full");
    require_finite(m, "eig_full");
    if (!(tol > 0.0)) throw InputError("eig_full: tol must be positive");

    const auto n = m.rows();
    RawEigen raw = raw_eigen(m, true);
    const auto order = canonical_order(raw.values, tie_tolerance(raw.values, tol));

    EigSystem sys;
    sys.eigenvalues.resize(n);
    sys.right_basis.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        sys.eigenvalues[k] = raw.values[order[k]];
        CVector r = raw.vectors.col(order[k]);
        const double nr = r.norm();
        if (nr > 0.0) r /= nr;
        sys.right_basis.col(k) = r;
    }

    Eigen::BDCSVD<CMatrix> svd(sys.right_basis);
    const auto& sv = svd.singularValues();
    const double basis_cond =
        sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();

    if (basis_cond <= 1.0 / tol) {
        sys.left_basis = sys.right_basis.fullPivLu().inverse();
    } else {
        // Independent solve on the adjoint: m† w = conj(λ) w gives left rows w†.
        RawEigen adj = raw_eigen(m.adjoint(), true);
        Eigen::MatrixXd cost(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                cost(i, j) = std::abs(sys.eigenvalues[i] - std::conj(adj.values[j]));
        const auto match = min_cost_assignment(cost);
        sys.left_basis.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::RowVectorXcd ell = adj.vectors.col(match[i]).adjoint();
            const Complex overlap = ell * sys.right_basis.col(i);
            const double nl = ell.norm();
            if (std::abs(overlap) > tol * nl) {
                ell /= overlap;
            } else if (nl > 0.0) {
                ell /= nl;
            }
            sys.left_basis.row(i) = ell;
        }
    }

    sys.max_condition = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex overlap = sys.left_basis.row(i) * sys.right_basis.col(i);
        const double cond = std::abs(overlap) > 0.0
                                ? sys.left_basis.row(i).norm() * sys.right_basis.col(i).norm() /
                                      std::abs(overlap)
                                : std::numeric_limits<double>::infinity();
        sys.max_condition = std::max(sys.max_condition, cond);
    }
    sys.defective = !(sys.max_condition <= 1.0 / tol);
    sys.biorth_residual =
        (sys.left_basis * sys.right_basis - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    return sys;
}

int numerical_rank(const CMatrix& m, double tol) {
    require_finite(m, "numerical_rank");
    if (!(tol > 0.0)) throw InputError("numerical_rank: tol must be positive");
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0) return 0;
    return static_cast<int>((sv.array() > tol * sv(0)).count());
}

int rank_above(const CMatrix& m, double threshold) {
    require_finite(m, "rank_above");
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<CMatrix> svd(m);
    return static_cast<int>((svd.singularValues().array() > threshold).count());
}

CMatrix herm_sqrt(const CMatrix& theta, double tol) {
    require_square(theta, "herm_sqrt");
    require_finite(theta, "herm_sqrt");
    const double scale = std::max(theta.norm(), std::numeric_limits<double>::min());
    if (hermiticity_defect(theta) > tol * scale) {
        throw InputError("herm_sqrt: matrix is not Hermitian");
    }
    const CMatrix h = 0.5 * (theta + theta.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw DomainError("herm_sqrt: eigensolver did not converge");
    const auto& w = es.eigenvalues();
    const double wmax = w.maxCoeff();
    if (!(wmax > 0.0) || !(w.minCoeff() > tol * wmax)) {
        throw DomainError("metric is not positive definite: no physical Dyson map at this time");
    }
    const CMatrix& v = es.eigenvectors();
    const CMatrix root = v * w.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
    return 0.5 * (root + root.adjoint());
}

std::vector<CMatrix> intertwiner_nullspace(const CMatrix& q, double tol) {
    require_square(q, "intertwiner_nullspace");
    require_finite(q, "intertwiner_nullspace");
    const auto n = q.rows();
    const auto nn = n * n;

    // Column-major vec: vec(Q†X) = (I ⊗ Q†) vec X, vec(XQ) = (Qᵀ ⊗ I) vec X.
    CMatrix k = CMatrix::Zero(nn, nn);
    const CMatrix qa = q.adjoint();
    for (Eigen::Index b = 0; b < n; ++b) {
        k.block(b * n, b * n, n, n) += qa;
        for (Eigen::Index a = 0; a < n; ++a) {
            k.block(b * n, a * n, n, n) -= q(a, b) * CMatrix::Identity(n, n);
        }
    }

    Eigen::BDCSVD<CMatrix> svd(k, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double threshold = tol * q.norm();

    std::vector<CMatrix> basis;
    for (Eigen::Index i = 0; i < nn; ++i) {
        if (sv(i) > threshold) continue;
        CVector v = svd.matrixV().col(i);
        CMatrix x = Eigen::Map<CMatrix>(v.data(), n, n);
        x /= x.norm();
        basis.push_back(std::move(x));
    }
    return basis;
}

}  // namespace quasiherm
