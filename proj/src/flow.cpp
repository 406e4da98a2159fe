#include "quasiherm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "quasiherm/assignment.hpp"

namespace quasiherm {

bool classify_reality(Complex lambda, double scale, double tol) {
    return std::abs(lambda.imag()) <= tol * std::max(scale, 1.0);
}

std::vector<double> uniform_grid(double t_min, double t_max, int steps) {
    if (!(t_min < t_max)) throw InputError("grid: t_min must be smaller than t_max");
    if (steps < 2) throw InputError("grid: steps must be at least 2");
    std::vector<double> grid(steps);
    const int last = steps - 1;
    for (int k = 0; k <= last; ++k) {
        // Written as a weighted sum so that t_{last-k} == -t_k for t_min == -t_max.
        grid[k] = ((last - k) * t_min + k * t_max) / last;
    }
    return grid;
}

double min_pairwise_gap(const std::vector<Complex>& values) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            gap = std::min(gap, std::abs(values[i] - values[j]));
    return values.size() < 2 ? 0.0 : gap;
}

namespace {

double spectral_radius(const std::vector<Complex>& values) {
    double r = 0.0;
    for (const auto& v : values) r = std::max(r, std::abs(v));
    return r;
}

// Size of the largest group of eigenvalues linked by distances <= radius.
int largest_cluster(const std::vector<Complex>& values, double radius) {
    const std::size_t n = values.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(values[i] - values[j]) <= radius) parent[find(i)] = find(j);
    std::vector<int> count(n, 0);
    int best = 0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, ++count[find(i)]);
    return best;
}

using SpectrumFn = std::function<std::vector<Complex>(double)>;

FlowTrace sweep_values(const SpectrumFn& spectrum, double t_min, double t_max, int steps,
                       const SweepOptions& opts) {
    const auto grid = uniform_grid(t_min, t_max, steps);

    FlowTrace trace;
    std::vector<Complex> prev;     // branch values at the previous kept point
    std::vector<Complex> prev_dx;  // displacement into the previous kept point
    double prev_t = 0.0;
    std::size_t n = 0;

    for (double t : grid) {
        std::vector<Complex> values;
        try {
            values = spectrum(t);
        } catch (const std::exception&) {
            trace.skipped_times.push_back(t);
            trace.markers.push_back({t, 0, MarkerKind::SolverFailure});
            continue;
        }
        if (trace.times.empty()) {
            n = values.size();
            trace.curves.assign(n, {});
            trace.reality.assign(n, {});
        } else if (values.size() != n) {
            throw InputError("sweep: matrix dimension changed along the family");
        }

        const double radius = spectral_radius(values);
        std::vector<Complex> branch(n);
        if (trace.times.empty()) {
            branch = values;
        } else {
            // Match against a linear prediction so that branches pass straight
            // through crossings instead of bouncing off them.
            const double dt_ratio =
                prev_dx.empty() ? 0.0
                                : (t - prev_t) / (prev_t - trace.times[trace.times.size() - 2]);
            std::vector<Complex> predicted = prev;
            for (std::size_t i = 0; i < prev_dx.size(); ++i) predicted[i] += dt_ratio * prev_dx[i];
            Eigen::MatrixXd cost(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) cost(i, j) = std::abs(predicted[i] - values[j]);
            const auto match = min_cost_assignment(cost);
            for (std::size_t i = 0; i < n; ++i) branch[i] = values[match[i]];

            std::vector<Complex> dx(n);
            for (std::size_t i = 0; i < n; ++i) dx[i] = branch[i] - prev[i];
            if (!prev_dx.empty()) {
                double v_prev = 0.0;
                for (const auto& d : prev_dx) v_prev = std::max(v_prev, std::abs(d));
                const double floor = std::sqrt(std::numeric_limits<double>::epsilon()) *
                                     std::max(1.0, radius);
                const double bound = opts.continuity_factor * v_prev * dt_ratio + floor;
                int violations = 0;
                for (const auto& d : dx) violations += std::abs(d) > bound ? 1 : 0;
                if (violations > 0) {
                    trace.markers.push_back({t, violations, MarkerKind::Discontinuity});
                }
            }
            prev_dx = std::move(dx);
        }

        const int cluster = largest_cluster(values, opts.degeneracy_tol * std::max(1.0, radius));
        if (cluster >= 2) trace.markers.push_back({t, cluster, MarkerKind::Cluster});

        for (std::size_t i = 0; i < n; ++i) {
            trace.curves[i].push_back(branch[i]);
            trace.reality[i].push_back(classify_reality(branch[i], radius, opts.reality_tol));
        }
        trace.times.push_back(t);
        prev = std::move(branch);
        prev_t = t;
    }
    if (trace.times.empty()) throw DomainError("sweep: eigensolver failed at every grid point");
    return trace;
}

}  // namespace

FlowTrace sweep_family(const MatrixProvider& family, double t_min, double t_max, int steps,
                       const SweepOptions& opts) {
    return sweep_values([&family](double t) { return eigenvalues(family(t)); }, t_min, t_max,
                        steps, opts);
}

FlowTrace sweep_spectrum(const ModelSpec& spec, double t_min, double t_max, int steps,
                         const SweepOptions& opts) {
    validate(spec);
    return sweep_values([&spec](double t) { return model_spectrum(spec, t); }, t_min, t_max, steps,
                        opts);
}

namespace {

constexpr int kCoarseIntervals = 64;

// Coarse scan selects the basin of the global minimum; golden-section
// search then refines inside it using `fine_gap`.
template <class Coarse, class Fine, class Radius>
std::optional<double> minimize_gap(Coarse&& coarse_gap, Fine&& fine_gap, Radius&& radius,
                                   double t_lo, double t_hi, double tol) {
    if (!(t_lo < t_hi)) throw InputError("locate_ep: t_lo must be smaller than t_hi");
    if (!(tol > 0.0)) throw InputError("locate_ep: tol must be positive");

    const auto grid = uniform_grid(t_lo, t_hi, kCoarseIntervals + 1);
    std::size_t best_i = 0;
    double best_g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double g = std::numeric_limits<double>::infinity();
        try {
            g = coarse_gap(grid[i]);
        } catch (const std::exception&) {
        }
        if (g < best_g) {
            best_g = g;
            best_i = i;
        }
    }
    double a = grid[best_i == 0 ? 0 : best_i - 1];
    double b = grid[std::min(best_i + 1, grid.size() - 1)];

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double best_t = grid[best_i];
    double best_fine = fine_gap(best_t);
    auto probe = [&](double t) {
        const double g = fine_gap(t);
        if (g < best_fine) {
            best_fine = g;
            best_t = t;
        }
        return g;
    };
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = probe(c);
    double gd = probe(d);
    while (b - a > tol) {
        if (gc <= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = probe(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = probe(d);
        }
    }
    // The reported point must lie in the final bracket.
    if (best_t < a || best_t > b) {
        best_t = 0.5 * (a + b);
        best_fine = fine_gap(best_t);
    }

    double scale = 0.0;
    for (double t : {t_lo, t_hi}) {
        try {
            scale = std::max(scale, radius(t));
        } catch (const std::exception&) {
        }
    }
    if (best_fine > std::sqrt(tol) * scale) return std::nullopt;
    return best_t;
}

}  // namespace

std::optional<double> locate_ep(const ModelSpec& spec, double t_lo, double t_hi, double tol) {
    validate(spec);
    // Double-precision gaps near t = 0 are dominated by roundoff, so the
    // coarse scan uses the extended gap as well.
    auto gap = [&](double t) { return model_gap_extended(spec, t); };
    auto radius = [&](double t) { return spectral_radius(model_spectrum(spec, t)); };
    return minimize_gap(gap, gap, radius, t_lo, t_hi, tol);
}

std::optional<double> locate_ep(const MatrixProvider& family, double t_lo, double t_hi,
                                double tol) {
    auto gap = [&](double t) { return min_pairwise_gap(eigenvalues(family(t))); };
    auto radius = [&](double t) { return spectral_radius(eigenvalues(family(t))); };
    return minimize_gap(gap, gap, radius, t_lo, t_hi, tol);
}

int JordanProfile::algebraic_multiplicity() const {
    return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

JordanProfile jordan_profile(const CMatrix& q, Complex lambda, double tol) {
    require_square(q, "jordan_profile");
    require_finite(q, "jordan_profile");
    if (!(tol > 0.0)) throw InputError("jordan_profile: tol must be positive");
    const auto n = q.rows();
    const CMatrix shifted = q - lambda * CMatrix::Identity(n, n);

    JordanProfile profile;
    profile.eigenvalue = lambda;
    profile.rank_sequence.push_back(static_cast<int>(n));

    const double norm = spectral_norm(shifted);
    if (norm == 0.0) {
        profile.rank_sequence.resize(n + 1, 0);
        profile.block_sizes.assign(n, 1);
        return profile;
    }

    Eigen::BDCSVD<CMatrix> svd(shifted);
    const double sigma_min = svd.singularValues()(n - 1);
    if (sigma_min > tol * std::max(norm, spectral_norm(q))) {
        throw InputError("jordan_profile: lambda is not an eigenvalue (smallest singular value " +
                         std::to_string(sigma_min) + ")");
    }

    CMatrix power = CMatrix::Identity(n, n);
    double scale = 1.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        power = power * shifted;
        scale *= norm;
        int r = rank_above(power, tol * scale);
        r = std::min(r, profile.rank_sequence.back());
        profile.rank_sequence.push_back(r);
    }

    // Blocks of size >= k: r_{k-1} - r_k.
    const auto& r = profile.rank_sequence;
    for (Eigen::Index k = static_cast<Eigen::Index>(n); k >= 1; --k) {
        const int at_least_k = r[k - 1] - r[k];
        const int at_least_next = k + 1 <= n ? r[k] - r[k + 1] : 0;
        for (int c = 0; c < at_least_k - at_least_next; ++c) {
            profile.block_sizes.push_back(static_cast<int>(k));
        }
    }
    return profile;
}

}  // namespace quasiherm
