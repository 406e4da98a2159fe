#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quasiherm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Relative tolerance used when a caller does not supply one.
inline constexpr double kDefaultTol = 1e-10;

/// Malformed input: wrong shape, non-finite entries, bad parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Well-formed input for which the requested object does not exist
/// (complex spectrum, indefinite metric, no exceptional point, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require_square(const CMatrix& m, const char* what);
void require_finite(const CMatrix& m, const char* what);
void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what);

/// True when every entry has an exactly zero imaginary part.
bool is_real(const CMatrix& m);

/// ‖m − m†‖_F.
double hermiticity_defect(const CMatrix& m);

/// Largest singular value.
double spectral_norm(const CMatrix& m);

/// Sorts ascending by real part; values whose real parts agree to
/// within `tie_tol` are ordered by imaginary part.
void sort_spectrum(std::vector<Complex>& values, double tie_tol = 0.0);

/// Eigenvalues only, in the canonical order.
std::vector<Complex> eigenvalues(const CMatrix& m);

/**
 * Eigenvalues with paired right (columns) and left (rows) eigenvectors.
 *
 * Right eigenvectors have unit 2-norm. When the spectrum is simple the
 * left basis satisfies left_basis * right_basis = I up to biorth_residual.
 */
struct EigSystem {
    std::vector<Complex> eigenvalues;
    CMatrix right_basis;
    CMatrix left_basis;
    double biorth_residual = 0.0;
    bool defective = false;
    /// max_n ‖ℓ_n‖‖r_n‖ / |ℓ_n r_n|; infinite at an exceptional point.
    double max_condition = 1.0;

    std::size_t dim() const { return eigenvalues.size(); }
    CMatrix reconstruct() const;
};

EigSystem eig_full(const CMatrix& m, double tol = kDefaultTol);

/// Number of singular values above tol * (largest singular value).
int numerical_rank(const CMatrix& m, double tol = kDefaultTol);

/// Number of singular values above an absolute threshold.
int rank_above(const CMatrix& m, double threshold);

/// Positive-definite Hermitian square root of a Hermitian positive-definite
/// matrix. Throws DomainError when theta is not positive definite.
CMatrix herm_sqrt(const CMatrix& theta, double tol = kDefaultTol);

/// Basis of the solution space of Q†X = XQ, each element with unit
/// Frobenius norm.
std::vector<CMatrix> intertwiner_nullspace(const CMatrix& q, double tol = kDefaultTol);

}  // namespace quasiherm
