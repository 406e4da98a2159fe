#include "quasiherm/dynamics.hpp"

#include <cmath>
#include <string>

namespace quasiherm {

namespace {

constexpr Complex kI{0.0, 1.0};

CMatrix call_provider(const MatrixProvider& p, double t, Eigen::Index dim, const char* what) {
    CMatrix m;
    try {
        m = p(t);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw DomainError(std::string(what) + " provider failed at t = " + std::to_string(t) +
                          ": " + e.what());
    }
    if (m.rows() != dim || m.cols() != dim) {
        throw InputError(std::string(what) + " provider returned a " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + " matrix, expected " +
                         std::to_string(dim) + "x" + std::to_string(dim));
    }
    if (!m.allFinite()) {
        throw DomainError(std::string(what) + " provider returned non-finite entries at t = " +
                          std::to_string(t));
    }
    return m;
}

void check_interval(double t0, double t1, int steps, const char* what) {
    if (steps < 1) throw InputError(std::string(what) + ": steps must be at least 1");
    if (!std::isfinite(t0) || !std::isfinite(t1)) {
        throw InputError(std::string(what) + ": interval end points must be finite");
    }
}

// Classical fixed-step RK4; `rhs(t, y)` returns dy/dt.
template <class State, class Rhs, class Observe>
State rk4(State y, Rhs&& rhs, double t0, double t1, int steps, Observe&& observe) {
    const double h = (t1 - t0) / steps;
    observe(t0, y);
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + k * h;
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
        const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
        const State k4 = rhs(t + h, State(y + h * k3));
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // Land exactly on t1 regardless of accumulated rounding in k * h.
        observe(k + 1 == steps ? t1 : t0 + (k + 1) * h, y);
    }
    return y;
}

}  // namespace

EvolutionGenerator EvolutionGenerator::heisenberg(MatrixProvider sigma, MatrixProvider source) {
    if (!sigma) throw InputError("heisenberg generator requires a Sigma provider");
    EvolutionGenerator gen;
    gen.mode_ = PictureMode::Heisenberg;
    gen.h_ = std::move(sigma);
    gen.b_ = std::move(source);
    return gen;
}

EvolutionGenerator EvolutionGenerator::schrodinger(MatrixProvider hamiltonian,
                                                   MatrixProvider sigma) {
    if (!hamiltonian || !sigma) {
        throw InputError("schrodinger generator requires H and Sigma providers");
    }
    EvolutionGenerator gen;
    gen.mode_ = PictureMode::SchrodingerF;
    gen.h_ = hamiltonian;
    gen.g_ = [hamiltonian, sigma](double t) -> CMatrix { return hamiltonian(t) - sigma(t); };
    return gen;
}

EvolutionGenerator EvolutionGenerator::from_state_generator(MatrixProvider g) {
    if (!g) throw InputError("state generator provider is empty");
    EvolutionGenerator gen;
    gen.mode_ = PictureMode::SchrodingerF;
    gen.g_ = std::move(g);
    return gen;
}

CMatrix EvolutionGenerator::h(double t) const {
    if (!h_) throw InputError("evolution generator has no H provider");
    return h_(t);
}

CMatrix EvolutionGenerator::b(double t) const {
    if (!b_) throw InputError("evolution generator has no source provider");
    return b_(t);
}

CMatrix EvolutionGenerator::g(double t) const {
    if (!g_) throw InputError("state generator G is absent (Heisenberg mode sets G = 0)");
    return g_(t);
}

Complex StatePair::overlap() const { return ketket.dot(ket); }

double default_fd_step(double t) { return 1e-5 * std::max(1.0, std::abs(t)); }

namespace {

CMatrix sigma_from(const CMatrix& omega, const CMatrix& omega_dot, double t) {
    Eigen::FullPivLU<CMatrix> lu(omega);
    if (!lu.isInvertible()) {
        throw DomainError("coriolis: Dyson map is singular at t = " + std::to_string(t));
    }
    return kI * lu.solve(omega_dot);
}

}  // namespace

CMatrix coriolis(const MatrixProvider& omega, double t, double h_step) {
    const double h = h_step > 0.0 ? h_step : default_fd_step(t);
    const CMatrix om = omega(t);
    require_square(om, "coriolis");
    const auto n = om.rows();
    const CMatrix plus = call_provider(omega, t + h, n, "Omega");
    const CMatrix minus = call_provider(omega, t - h, n, "Omega");
    return sigma_from(om, (plus - minus) / (2.0 * h), t);
}

CMatrix coriolis(const MatrixProvider& omega, const MatrixProvider& omega_dot, double t) {
    const CMatrix om = omega(t);
    require_square(om, "coriolis");
    return sigma_from(om, call_provider(omega_dot, t, om.rows(), "dOmega/dt"), t);
}

MatrixProvider coriolis_provider(MatrixProvider omega, MatrixProvider omega_dot) {
    if (omega_dot) {
        return [omega, omega_dot](double t) { return coriolis(omega, omega_dot, t); };
    }
    return [omega](double t) { return coriolis(omega, t); };
}

double metric_drift(const MatrixProvider& omega, double t, double h_step) {
    const double h = h_step > 0.0 ? h_step : default_fd_step(t);
    const CMatrix plus = omega(t + h);
    const CMatrix minus = omega(t - h);
    require_same_shape(plus, minus, "metric_drift");
    const CMatrix dtheta =
        (plus.adjoint() * plus - minus.adjoint() * minus) / (2.0 * h);
    return dtheta.norm();
}

CMatrix heisenberg_evolve(const CMatrix& a0, const EvolutionGenerator& gen, double t0, double t1,
                          int steps, const MatrixObserver& observe) {
    require_square(a0, "heisenberg_evolve");
    require_finite(a0, "heisenberg_evolve");
    check_interval(t0, t1, steps, "heisenberg_evolve");
    const auto n = a0.rows();
    const bool with_source = gen.has_source();

    auto rhs = [&](double t, const CMatrix& a) -> CMatrix {
        const CMatrix h = call_provider([&](double s) { return gen.h(s); }, t, n, "H");
        CMatrix da = -kI * (a * h - h * a);
        if (with_source) da += call_provider([&](double s) { return gen.b(s); }, t, n, "B");
        return da;
    };
    return rk4(CMatrix(a0), rhs, t0, t1, steps, [&](double t, const CMatrix& a) {
        if (observe) observe(t, a);
    });
}

CMatrix omega_cauchy_evolve(const CMatrix& omega0, const MatrixProvider& sigma, double t0,
                            double t1, int steps, const MatrixObserver& observe) {
    require_square(omega0, "omega_cauchy_evolve");
    require_finite(omega0, "omega_cauchy_evolve");
    check_interval(t0, t1, steps, "omega_cauchy_evolve");
    if (!sigma) throw InputError("omega_cauchy_evolve: Sigma provider is empty");
    const auto n = omega0.rows();

    auto rhs = [&](double t, const CMatrix& om) -> CMatrix {
        return -kI * (om * call_provider(sigma, t, n, "Sigma"));
    };
    return rk4(CMatrix(omega0), rhs, t0, t1, steps, [&](double t, const CMatrix& om) {
        if (observe) observe(t, om);
    });
}

StatePair state_pair_evolve(const StatePair& s0, const EvolutionGenerator& gen, double t0,
                            double t1, int steps,
                            const std::function<void(double, const StatePair&)>& observe) {
    if (!gen.has_state_generator()) {
        throw InputError("state_pair_evolve: generator has no G (Heisenberg mode freezes states)");
    }
    if (s0.ket.size() == 0 || s0.ket.size() != s0.ketket.size()) {
        throw InputError("state_pair_evolve: ket and ketket must have equal non-zero length");
    }
    if (!s0.ket.allFinite() || !s0.ketket.allFinite()) {
        throw InputError("state_pair_evolve: non-finite state entries");
    }
    if (s0.overlap() == Complex(0.0)) {
        throw InputError("state_pair_evolve: biorthogonal overlap must be non-zero");
    }
    check_interval(t0, t1, steps, "state_pair_evolve");
    const auto n = s0.ket.size();

    // Stack (ket, ketket) into one vector so RK4 stages share each G evaluation.
    CVector y(2 * n);
    y << s0.ket, s0.ketket;
    auto rhs = [&](double t, const CVector& v) -> CVector {
        const CMatrix g = call_provider([&](double s) { return gen.g(s); }, t, n, "G");
        CVector dv(2 * n);
        dv.head(n) = -kI * (g * v.head(n));
        dv.tail(n) = -kI * (g.adjoint() * v.tail(n));
        return dv;
    };
    const CVector out = rk4(y, rhs, t0, t1, steps, [&](double t, const CVector& v) {
        if (observe) observe(t, StatePair{v.head(n), v.tail(n)});
    });
    return StatePair{out.head(n), out.tail(n)};
}

Complex expectation(const StatePair& s, const CMatrix& a) {
    if (a.rows() != a.cols() || a.rows() != s.ket.size() || s.ket.size() != s.ketket.size()) {
        throw InputError("expectation: dimension mismatch");
    }
    return s.ketket.dot(a * s.ket);
}

}  // namespace quasiherm
