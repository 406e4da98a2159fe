#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quasiherm/dynamics.hpp"
#include "quasiherm/matrixkit.hpp"
#include "quasiherm/models.hpp"

namespace quasiherm {

enum class MarkerKind {
    Cluster,        ///< eigenvalues closer than the degeneracy threshold
    Discontinuity,  ///< a branch moved faster than the continuity bound allows
    SolverFailure,  ///< grid point skipped
};

struct DegeneracyMarker {
    double time = 0.0;
    int multiplicity = 0;
    MarkerKind kind = MarkerKind::Cluster;
};

/// Eigenvalue branches on a time grid.
struct FlowTrace {
    std::vector<double> times;
    /// curves[branch][step]
    std::vector<std::vector<Complex>> curves;
    /// reality[branch][step]
    std::vector<std::vector<bool>> reality;
    std::vector<DegeneracyMarker> markers;
    std::vector<double> skipped_times;

    std::size_t branches() const { return curves.size(); }
    std::size_t steps() const { return times.size(); }
};

struct SweepOptions {
    double eig_tol = kDefaultTol;
    double reality_tol = kDefaultTol;
    /// Eigenvalues closer than degeneracy_tol * max(1, spectral radius)
    /// are reported as a cluster.
    double degeneracy_tol = 1e-3;
    /// Allowed branch displacement per step, in units of the previous
    /// step's largest displacement.
    double continuity_factor = 5.0;
};

struct JordanProfile {
    Complex eigenvalue;
    std::vector<int> block_sizes;    ///< descending
    std::vector<int> rank_sequence;  ///< r_k = rank((q − λI)^k), k = 0..N

    int algebraic_multiplicity() const;
};

/// Default relative rank threshold for Jordan profiling.
inline constexpr double kJordanTol = 1e-7;

/// True iff |Im λ| <= tol * max(scale, 1).
bool classify_reality(Complex lambda, double scale, double tol = kDefaultTol);

/// Uniform grid; symmetric brackets give exactly mirrored times.
std::vector<double> uniform_grid(double t_min, double t_max, int steps);

/// Model sweep; each grid point uses model_spectrum.
FlowTrace sweep_spectrum(const ModelSpec& spec, double t_min, double t_max, int steps,
                         const SweepOptions& opts = {});

/// Same tracking for an arbitrary family (e.g. interpolated user samples).
FlowTrace sweep_family(const MatrixProvider& family, double t_min, double t_max, int steps,
                       const SweepOptions& opts = {});

/// Smallest pairwise eigenvalue distance (0 for a 1x1 matrix).
double min_pairwise_gap(const std::vector<Complex>& values);

/// Minimum pairwise gap of the model spectrum, computed from a
/// multiprecision eigensolve of an exactly rounded model matrix.
double model_gap_extended(const ModelSpec& spec, double t);

/**
 * Time in [t_lo, t_hi] where the eigenvalue gap is smallest, refined by
 * golden-section search to a bracket of width <= tol. Returns nullopt when
 * the gap there exceeds sqrt(tol) times the spectral scale of the bracket.
 */
std::optional<double> locate_ep(const ModelSpec& spec, double t_lo, double t_hi,
                                double tol = 1e-8);

/// Double-precision variant for user-supplied families.
std::optional<double> locate_ep(const MatrixProvider& family, double t_lo, double t_hi,
                                double tol = 1e-8);

/// Jordan block sizes of λ from the rank staircase of (q − λI)^k. The rank
/// of the k-th power counts singular values above tol * ‖q − λI‖₂^k.
JordanProfile jordan_profile(const CMatrix& q, Complex lambda, double tol = kJordanTol);

}  // namespace quasiherm
