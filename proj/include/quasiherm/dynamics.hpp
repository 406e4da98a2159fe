#pragma once

#include <functional>
#include <optional>

#include "quasiherm/matrixkit.hpp"

namespace quasiherm {

/// Time-indexed matrix (Ω(t), Σ(t), H(t), ...).
using MatrixProvider = std::function<CMatrix(double)>;

/// Called after every accepted step (and once at t0) with the current state.
using MatrixObserver = std::function<void(double, const CMatrix&)>;

enum class PictureMode {
    Heisenberg,    ///< G = 0, H = Σ: states frozen, observables carry the dynamics
    SchrodingerF,  ///< G = H − Σ drives the ket / ketket pair
};

/**
 * Bundles the generators of the evolution equations.
 *
 * Construct through the named factories; the mode is fixed at construction
 * and decides which generators exist.
 */
class EvolutionGenerator {
public:
    /// H = Σ, G absent. `source` is the anomalous B(t); empty means B = 0.
    static EvolutionGenerator heisenberg(MatrixProvider sigma, MatrixProvider source = {});

    /// G = H − Σ.
    static EvolutionGenerator schrodinger(MatrixProvider hamiltonian, MatrixProvider sigma);

    /// G supplied directly (no H/Σ split known).
    static EvolutionGenerator from_state_generator(MatrixProvider g);

    PictureMode mode() const { return mode_; }
    bool has_source() const { return static_cast<bool>(b_); }
    bool has_state_generator() const { return static_cast<bool>(g_); }

    CMatrix h(double t) const;
    CMatrix b(double t) const;  // requires has_source()
    CMatrix g(double t) const;  // requires has_state_generator()

private:
    EvolutionGenerator() = default;

    PictureMode mode_ = PictureMode::Heisenberg;
    MatrixProvider h_;
    MatrixProvider b_;
    MatrixProvider g_;
};

struct StatePair {
    CVector ket;
    CVector ketket;

    /// ⟨⟨Ψ|Ψ⟩ = ketket† ket.
    Complex overlap() const;
};

/// Default central-difference step for coriolis: 1e-5 * max(1, |t|).
double default_fd_step(double t);

/// Σ(t) = i Ω⁻¹(t) ∂tΩ(t) with a central difference of step h_step
/// (h_step <= 0 selects default_fd_step).
CMatrix coriolis(const MatrixProvider& omega, double t, double h_step = 0.0);

/// Σ(t) from an analytic derivative provider.
CMatrix coriolis(const MatrixProvider& omega, const MatrixProvider& omega_dot, double t);

/// Σ as a provider; analytic when omega_dot is non-empty.
MatrixProvider coriolis_provider(MatrixProvider omega, MatrixProvider omega_dot = {});

/// ‖∂tΘ(t)‖_F for Θ = Ω†Ω, by central difference. Small values mean the
/// frozen-metric (adiabatic) Heisenberg picture is a fair approximation.
double metric_drift(const MatrixProvider& omega, double t, double h_step = 0.0);

/// A(t1) for ∂tA = −i(AH − HA) + B, classical RK4 with `steps` fixed steps.
CMatrix heisenberg_evolve(const CMatrix& a0, const EvolutionGenerator& gen, double t0, double t1,
                          int steps, const MatrixObserver& observe = {});

/// Ω(t1) for i∂tΩ = ΩΣ.
CMatrix omega_cauchy_evolve(const CMatrix& omega0, const MatrixProvider& sigma, double t0,
                            double t1, int steps, const MatrixObserver& observe = {});

/// i∂t|Ψ⟩ = G|Ψ⟩ and i∂t|Ψ⟩⟩ = G†|Ψ⟩⟩ integrated together.
StatePair state_pair_evolve(const StatePair& s0, const EvolutionGenerator& gen, double t0,
                            double t1, int steps,
                            const std::function<void(double, const StatePair&)>& observe = {});

/// ⟨⟨Ψ|A|Ψ⟩ = ketket† A ket.
Complex expectation(const StatePair& s, const CMatrix& a);

}  // namespace quasiherm
