// Acceptance run: one PASS/FAIL line per headline property of the library.
// Exit status is the number of failed checks.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "quasiherm/dynamics.hpp"
#include "quasiherm/flow.hpp"
#include "quasiherm/metric.hpp"
#include "quasiherm/models.hpp"

using namespace quasiherm;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Runs a check; an escaping exception is a failure with its message.
void check(const char* name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        report(name, ok, detail);
    } catch (const std::exception& e) {
        report(name, false, std::string("exception: ") + e.what());
    }
}

std::vector<double> grid(double a, double b, int n) {
    std::vector<double> g;
    for (int k = 0; k <= n; ++k) g.push_back(a + (b - a) * k / n);
    return g;
}

CMatrix hermitian_observable(unsigned seed, Eigen::Index n) {
    std::mt19937_64 rng(seed);
    const CMatrix x = oracle::random_matrix(rng, n);
    return 0.5 * (x + x.adjoint());
}

CMatrix pullback(const CMatrix& a, double t) {
    const CMatrix om = oracle::crunchbang_omega(t);
    return om.inverse() * a * om;
}

// Largest |values[i] - expected[i]| after both are sorted by real part.
double sorted_distance(std::vector<Complex> values, std::vector<double> expected) {
    std::sort(values.begin(), values.end(),
              [](Complex a, Complex b) { return a.real() < b.real(); });
    std::sort(expected.begin(), expected.end());
    if (values.size() != expected.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        worst = std::max(worst, std::abs(values[i] - expected[i]));
    return worst;
}

const MatrixProvider kOmega = [](double t) { return oracle::crunchbang_omega(t); };
const MatrixProvider kOmegaDot = [](double t) { return oracle::crunchbang_omega_dot(t); };
const MatrixProvider kSigma = [](double t) { return oracle::crunchbang_sigma(t); };

}  // namespace

int main() {
    const auto bang10 = make_model(ModelKind::Bang, 10);
    const auto cyclic8 = make_model(ModelKind::Cyclic, 8);
    const auto crunch = make_model(ModelKind::CrunchBang, 8);
    const double pi = std::numbers::pi;

    check("bang-spectrum", [&] {
        double rel = 0.0, gap = 0.0, min_im = INFINITY;
        for (double t : {0.04, 0.25, 0.64, 1.0}) {
            const double r = std::sqrt(t);
            std::vector<double> expect;
            for (int n = 0; n < 10; ++n) expect.push_back((2 * n - 9) * r);
            const auto spec = model_spectrum(bang10, t);
            rel = std::max(rel, sorted_distance(spec, expect) / (9 * r));
            for (std::size_t i = 1; i < spec.size(); ++i)
                gap = std::max(gap, std::abs((spec[i].real() - spec[i - 1].real()) / (2 * r) - 1.0));
        }
        for (const auto& v : model_spectrum(bang10, -0.5)) min_im = std::min(min_im, std::abs(v.imag()));
        return std::pair{rel <= 1e-8 && gap <= 1e-8 && min_im > 0.1,
                         fmt("rel err %.2e, gap spread %.2e, min |Im| at t=-0.5 %.3f", rel, gap,
                             min_im)};
    });

    check("cyclic-spectrum", [&] {
        bool symmetric = true;
        double err = 0.0;
        for (double t : grid(-1.0, 1.0, 128)) {
            const auto s = model_spectrum(cyclic8, t);
            symmetric = symmetric && s == model_spectrum(cyclic8, -t);
            std::vector<double> expect;
            for (int n = 0; n < 8; ++n) expect.push_back((2 * n - 7) * std::abs(t));
            err = std::max(err, sorted_distance(s, expect));
        }
        return std::pair{symmetric && err <= 1e-8,
                         std::string(symmetric ? "even in t exactly" : "NOT even in t") +
                             fmt(", max err %.2e on 129 points", err)};
    });

    check("crunchbang-spectrum", [&] {
        std::vector<double> half;
        for (int k = 1; k <= 8; ++k) half.push_back(std::cos(k * pi / 9));
        const double at_half = sorted_distance(model_spectrum(crunch, 0.5), half);
        double err = 0.0;
        for (double t : grid(0.0, 1.0, 64)) {
            if (t <= 0.0 || t >= 1.0) continue;
            std::vector<double> expect;
            for (double c : half) expect.push_back(2 * std::sqrt(t * (1 - t)) * c);
            err = std::max(err, sorted_distance(model_spectrum(crunch, t), expect));
        }
        int lo = 8, hi = 0;
        for (double t : grid(-0.6, -0.01, 59)) {
            const auto s = model_spectrum(crunch, t);
            double scale = 0.0;
            for (const auto& v : s) scale = std::max(scale, std::abs(v));
            int real = 0;
            for (const auto& v : s) real += classify_reality(v, scale) ? 1 : 0;
            lo = std::min(lo, real);
            hi = std::max(hi, real);
        }
        return std::pair{at_half <= 1e-10 && err <= 1e-8 && lo > 0 && hi < 8,
                         fmt("t=0.5 err %.2e, (0,1) err %.2e", at_half, err) +
                             fmt(", real count on [-0.6,0) in [%g, %g]", lo, hi)};
    });

    check("jordan-completeness", [&] {
        std::string bad;
        for (auto kind : {ModelKind::Bang, ModelKind::Cyclic}) {
            for (int n = 2; n <= 12; ++n) {
                const auto jp = jordan_profile(build_q(make_model(kind, n), 0.0), 0.0);
                if (jp.block_sizes != std::vector<int>{n})
                    bad += std::string(kind_name(kind)) + " " + std::to_string(n) + "; ";
            }
        }
        if (jordan_profile(build_q(crunch, 0.0), 0.0).block_sizes != std::vector<int>{8})
            bad += "crunchbang; ";
        return std::pair{bad.empty(), bad.empty() ? std::string("single block of size N in 23 cases")
                                                  : "wrong blocks: " + bad};
    });

    check("ep-localization", [&] {
        double worst = 0.0;
        bool all_found = true;
        for (const auto* spec : {&bang10, &cyclic8, &crunch}) {
            const auto t = locate_ep(*spec, -0.5, 0.5);
            all_found = all_found && t.has_value();
            if (t) worst = std::max(worst, std::abs(*t));
        }
        return std::pair{all_found && worst <= 1e-6,
                         fmt("max |t_EP| %.2e over bang 10, cyclic 8, crunchbang", worst)};
    });

    check("metric-certification", [&] {
        struct Case {
            const ModelSpec* spec;
            std::vector<double> times;
        };
        const Case cases[] = {
            {&bang10, {0.04, 0.25, 0.64, 1.0, 2.0}},
            {&cyclic8, {-0.9, -0.5, -0.25, -0.125, 0.125, 0.25, 0.5, 0.9, 1.5}},
            {&crunch, {0.05, 0.2, 1.0 / 3.0, 0.5, 0.8, 0.95}},
        };
        double residual = 0.0, defect = 0.0, min_eig = INFINITY;
        int points = 0;
        for (const auto& c : cases) {
            const std::vector<double> kappa(c.spec->dim, 1.0);
            for (double t : c.times) {
                const auto q = build_q(*c.spec, t);
                const auto pic = model_physical_picture(*c.spec, t, kappa);
                residual = std::max(residual,
                                    pic.metric.residual / (q.norm() * pic.metric.theta.norm()));
                min_eig = std::min(min_eig, pic.metric.min_eig);
                defect = std::max(defect, hermiticity_defect(pic.hermitian));
                ++points;
            }
        }
        bool diag_ok = true;
        double ratio_err = 0.0;
        for (double t : grid(0.0, 1.0, 32)) {
            if (t <= 0.0 || t >= 1.0) continue;
            const auto mr = diagonal_metric(build_q(crunch, t));
            if (!mr || !(mr->min_eig > 0.0)) {
                diag_ok = false;
                continue;
            }
            for (int n = 0; n + 1 < 8; ++n) {
                const double r = mr->theta(n + 1, n + 1).real() / mr->theta(n, n).real();
                ratio_err = std::max(ratio_err, std::abs(r / ((1 - t) / t) - 1.0));
            }
            diag_ok = diag_ok && !diagonal_metric(build_q(bang10, t)).has_value();
        }
        const bool ok = residual <= 1e-10 && min_eig > 0.0 && defect <= 1e-8 && diag_ok &&
                        ratio_err <= 1e-12;
        return std::pair{ok, fmt("%g points: rel residual %.2e, min eig %.2e", points, residual,
                                 min_eig) +
                                 fmt(", defect %.2e; diagonal ratio err %.1e", defect, ratio_err) +
                                 (diag_ok ? "" : ", diagonal metric check failed")};
    });

    check("intertwiner-dimension", [&] {
        std::string bad;
        int cases = 0;
        auto one = [&](const ModelSpec& spec, double t) {
            const auto q = build_q(spec, t);
            const int lib = static_cast<int>(intertwiner_nullspace(q).size());
            const int brute = oracle::intertwiner_dimension(q);
            ++cases;
            if (lib != spec.dim || brute != spec.dim)
                bad += std::string(kind_name(spec.kind)) + " " + std::to_string(spec.dim) + " t=" +
                       std::to_string(t) + "; ";
        };
        for (int n = 2; n <= 8; ++n)
            for (auto kind : {ModelKind::Bang, ModelKind::Cyclic})
                for (double t : {0.3, 0.7}) one(make_model(kind, n), t);
        for (double t : {0.3, 0.7}) one(crunch, t);
        return std::pair{bad.empty(), bad.empty() ? fmt("dimension N in %g cases", cases)
                                                  : "mismatch: " + bad};
    });

    check("heisenberg-oracle", [&] {
        const double t0 = 1.0 / 3.0, t1 = 0.5;
        const CMatrix a = hermitian_observable(7, 8);
        const auto gen = EvolutionGenerator::heisenberg(coriolis_provider(kOmega, kOmegaDot));
        const CMatrix a0 = pullback(a, t0);
        const CMatrix exact = pullback(a, t1);
        const auto start = eigenvalues(a0);
        double drift = 0.0;
        const CMatrix a1 = heisenberg_evolve(a0, gen, t0, t1, 1000, [&](double, const CMatrix& m) {
            drift = std::max(drift, oracle::multiset_distance(eigenvalues(m), start));
        });
        const double e1 = (a1 - exact).norm();
        const double e2 = (heisenberg_evolve(a0, gen, t0, t1, 2000) - exact).norm();
        const double ratio = e1 / e2;
        return std::pair{e1 <= 1e-8 && std::abs(ratio - 16.0) <= 4.0 && drift <= 1e-8,
                         fmt("err %.2e at 1000 steps, halving ratio %.2f, spectral drift %.2e", e1,
                             ratio, drift)};
    });

    check("cauchy-consistency", [&] {
        const double t0 = 1.0 / 3.0, t1 = 0.5;
        double worst = 0.0;
        omega_cauchy_evolve(kOmega(t0), kSigma, t0, t1, 1000, [&](double t, const CMatrix& m) {
            worst = std::max(worst, (m - kOmega(t)).norm());
        });
        return std::pair{worst <= 1e-8, fmt("max |Omega - closed form| %.2e on [1/3, 1/2]", worst)};
    });

    check("state-pair", [&] {
        const double t0 = 0.3, t1 = 0.6;
        const CMatrix phys = hermitian_observable(31, 8);
        const MatrixProvider h = [phys](double t) { return pullback(phys, t); };
        const auto gen = EvolutionGenerator::schrodinger(h, coriolis_provider(kOmega, kOmegaDot));
        std::mt19937_64 rng(32);
        const CVector ket = oracle::random_matrix(rng, 8).col(0);
        const CMatrix om0 = kOmega(t0);
        const StatePair s{ket, om0.adjoint() * om0 * ket};
        const Complex ov0 = s.overlap();
        const CMatrix obs = hermitian_observable(33, 8);
        double drift = 0.0, imag = 0.0;
        state_pair_evolve(s, gen, t0, t1, 2000, [&](double t, const StatePair& p) {
            drift = std::max(drift, std::abs(p.overlap() - ov0) / std::abs(ov0));
            // A = Ω⁻¹ 𝔞 Ω is Θ(t)-quasi-Hermitian.
            const Complex e = expectation(p, pullback(obs, t));
            imag = std::max(imag, std::abs(e.imag()) / std::abs(e));
        });
        const double per_unit = drift / (t1 - t0);
        return std::pair{per_unit <= 1e-10 && imag <= 1e-10,
                         fmt("overlap drift %.2e per unit time, max rel |Im <A>| %.2e", per_unit,
                             imag)};
    });

    std::printf("%d of 10 checks failed\n", failures);
    return failures;
}
