#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// det(T − λI) for a tridiagonal T via the three-term recurrence.
inline Complex tridiagonal_charpoly(const CMatrix& t, Complex lambda) {
    const auto n = t.rows();
    Complex p_prev = 1.0;
    Complex p = t(0, 0) - lambda;
    for (Eigen::Index k = 1; k < n; ++k) {
        const Complex next = (t(k, k) - lambda) * p - t(k, k - 1) * t(k - 1, k) * p_prev;
        p_prev = p;
        p = next;
    }
    return p;
}

/// Dimension of {X : Q†X = XQ} from an entrywise-assembled Kronecker
/// operator and a full-pivoting LU rank.
inline int intertwiner_dimension(const CMatrix& q, double threshold = 1e-9) {
    const auto n = q.rows();
    CMatrix k = CMatrix::Zero(n * n, n * n);
    // Unknown X(a, b) has index a + n*b; equation (i, j) has index i + n*j.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index m = 0; m < n; ++m) {
                // (Q†X)_{ij} = Σ_m conj(Q_{mi}) X_{mj}
                k(i + n * j, m + n * j) += std::conj(q(m, i));
                // (XQ)_{ij} = Σ_m X_{im} Q_{mj}
                k(i + n * j, i + n * m) -= q(m, j);
            }
    Eigen::FullPivLU<CMatrix> lu(k);
    lu.setThreshold(threshold);
    return static_cast<int>(n * n - lu.rank());
}

/// Multiset distance: max |a_i − b_π(i)| over the best pairing (brute force
/// over sorted-by-real greedy is not enough near clusters, so we use a
/// permutation search for small n and a greedy fallback otherwise).
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return INFINITY;
    const std::size_t n = a.size();
    if (n <= 8) {
        std::vector<int> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
        double best = INFINITY;
        do {
            double worst = 0.0;
            for (std::size_t i = 0; i < n && worst < best; ++i)
                worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
            best = std::min(best, worst);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    double worst = 0.0;
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = 0;
        double d = INFINITY;
        for (std::size_t j = 0; j < n; ++j)
            if (!used[j] && std::abs(a[i] - b[j]) < d) {
                d = std::abs(a[i] - b[j]);
                arg = j;
            }
        used[arg] = true;
        worst = std::max(worst, d);
    }
    return worst;
}

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n, bool complex_entries = true) {
    std::normal_distribution<double> nd;
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {nd(rng), complex_entries ? nd(rng) : 0.0};
    return m;
}

inline CMatrix shift_matrix(Eigen::Index n) {
    CMatrix s = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) s(i, i + 1) = 1.0;
    return s;
}

/// Closed-form diagonal Dyson map of the crunchbang chain on (0, 1):
/// diag(((1 − t)/t)^((n − 1)/2)), n = 1..8.
inline CMatrix crunchbang_omega(double t) {
    CMatrix om = CMatrix::Zero(8, 8);
    for (int n = 0; n < 8; ++n) om(n, n) = std::pow((1.0 - t) / t, 0.5 * n);
    return om;
}

inline CMatrix crunchbang_omega_dot(double t) {
    // d/dt r^(n/2) with r = (1 − t)/t, dr/dt = −1/t².
    CMatrix d = CMatrix::Zero(8, 8);
    const double r = (1.0 - t) / t;
    for (int n = 0; n < 8; ++n) d(n, n) = 0.5 * n * std::pow(r, 0.5 * n - 1.0) * (-1.0 / (t * t));
    return d;
}

/// Analytic Σ = iΩ⁻¹Ω' = −i diag((n − 1) / (2 t (1 − t))).
inline CMatrix crunchbang_sigma(double t) {
    CMatrix s = CMatrix::Zero(8, 8);
    for (int n = 0; n < 8; ++n) s(n, n) = Complex(0.0, -n / (2.0 * t * (1.0 - t)));
    return s;
}

}  // namespace oracle
