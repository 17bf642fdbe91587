#pragma once

#include <optional>

#include "qbs/hilbert.hpp"

namespace qbs {

// Couplings and detunings in rad/ns; times in ns throughout.
struct HardwareParams {
    double omega_test = 2.0 * kPi * 0.0175;     // 2pi x 17.5 MHz
    double omega_ancilla = 2.0 * kPi * 0.0177;  // 2pi x 17.7 MHz
    double detuning_test = 0.0;
    double detuning_ancilla = 0.0;

    double omega(Qubit q) const {
        return q == Qubit::test ? omega_test : omega_ancilla;
    }
    void validate() const {
        require(omega_test > 0 && omega_ancilla > 0, ErrorCode::validation,
                "coupling rates must be positive");
    }
};

struct RotationSpec {
    double theta = 0.0;        // drive phase
    double angle = kPi / 2.0;  // rotation angle; pi/2 is the Ramsey pulse

    void validate() const {
        require(angle > 0 && angle <= 2.0 * kPi, ErrorCode::validation,
                "rotation angle must lie in (0, 2pi]");
    }
};

// Pulse durations used by the protocol.
inline double r1_time(double alpha, const HardwareParams& p) {
    require(alpha > 0, ErrorCode::validation, "alpha must be positive");
    return kPi / (4.0 * alpha * p.omega_test);
}
inline double readout_time(double alpha, const HardwareParams& p) {
    require(alpha > 0, ErrorCode::validation, "alpha must be positive");
    return kPi / (2.0 * alpha * p.omega_ancilla);
}
inline double iswap_time(const HardwareParams& p) {
    return kPi / (2.0 * p.omega_ancilla);
}

// Resonant Jaynes-Cummings propagator for the named qubit, assembled from
// the invariant two-level blocks {|g,n+1>, |e,n>}: amplitudes rotate as
// cos(sqrt(n+1) W t) with transfer amplitude -i sin(sqrt(n+1) W t). The
// other qubit is untouched.
inline LinearOperator jc_propagator(const HardwareParams& params, Qubit qubit, double t,
                                    const SpaceLayout& layout) {
    params.validate();
    require(t >= 0, ErrorCode::validation, "negative evolution time");
    require(layout.has_resonator(), ErrorCode::validation, "layout has no resonator");
    int slot = layout.slot_of(qubit);
    double omega = params.omega(qubit);

    int f = layout.fock_dim(), nq = 1 << layout.qubits().size();
    int bit = layout.n_qubits() - 1 - slot;
    CMatrix U = CMatrix::Identity(layout.dim(), layout.dim());
    for (int q = 0; q < nq; ++q) {
        if ((q >> bit) & 1) continue;  // enumerate ground-level configurations once
        int qe = q | (1 << bit);
        for (int n = 0; n + 1 < f; ++n) {
            double th = std::sqrt(double(n + 1)) * omega * t;
            int ig = q * f + (n + 1), ie = qe * f + n;
            Complex c = std::cos(th), s = Complex(0, -1) * std::sin(th);
            U(ig, ig) = c;
            U(ie, ie) = c;
            U(ig, ie) = s;
            U(ie, ig) = s;
        }
    }
    return LinearOperator(layout, std::move(U), true);
}

// Single-qubit rotation about an equatorial axis set by `theta`:
//   [[cos(a/2), -i e^{i theta} sin(a/2)], [-i e^{-i theta} sin(a/2), cos(a/2)]]
// on (|g>, |e>) of the named qubit; identity elsewhere. At a = pi/2 this is
// the Ramsey pulse R2(theta).
inline LinearOperator rotation_operator(const SpaceLayout& layout, Qubit qubit,
                                        double angle, double theta) {
    int slot = layout.slot_of(qubit);
    int f = layout.fock_dim(), nq = 1 << layout.qubits().size();
    int bit = layout.n_qubits() - 1 - slot;
    Complex c = std::cos(angle / 2.0);
    Complex s_ge = Complex(0, -1) * std::exp(Complex(0, theta)) * std::sin(angle / 2.0);
    Complex s_eg = Complex(0, -1) * std::exp(Complex(0, -theta)) * std::sin(angle / 2.0);
    CMatrix U = CMatrix::Zero(layout.dim(), layout.dim());
    for (int q = 0; q < nq; ++q) {
        int qg = q & ~(1 << bit), qe = q | (1 << bit);
        if (q != qg) continue;
        for (int n = 0; n < f; ++n) {
            U(qg * f + n, qg * f + n) = c;
            U(qe * f + n, qe * f + n) = c;
            U(qg * f + n, qe * f + n) = s_ge;
            U(qe * f + n, qg * f + n) = s_eg;
        }
    }
    return LinearOperator(layout, std::move(U), true);
}

// Matrix exponential e^{-iHt} of a Hermitian generator; the test-side oracle
// for the analytic propagators.
inline LinearOperator expm_oracle(const LinearOperator& hamiltonian, double t) {
    const CMatrix& H = hamiltonian.matrix();
    require((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-10, ErrorCode::validation,
            "expm oracle requires a Hermitian generator");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    CVector phases(H.rows());
    for (int k = 0; k < H.rows(); ++k)
        phases[k] = std::exp(Complex(0, -es.eigenvalues()[k] * t));
    return LinearOperator(hamiltonian.layout(),
                          es.eigenvectors() * phases.asDiagonal() *
                              es.eigenvectors().adjoint(),
                          true);
}

// Interaction-picture JC Hamiltonian W(s+ a + s- a^dag) for one qubit.
inline LinearOperator jc_hamiltonian(const HardwareParams& params, Qubit qubit,
                                     const SpaceLayout& layout) {
    int slot = layout.slot_of(qubit);
    double omega = params.omega(qubit);
    int f = layout.fock_dim(), nq = 1 << layout.qubits().size();
    int bit = layout.n_qubits() - 1 - slot;
    CMatrix H = CMatrix::Zero(layout.dim(), layout.dim());
    for (int q = 0; q < nq; ++q) {
        if ((q >> bit) & 1) continue;
        int qe = q | (1 << bit);
        for (int n = 0; n + 1 < f; ++n) {
            double g = omega * std::sqrt(double(n + 1));
            H(qe * f + n, q * f + (n + 1)) = g;  // s+ a
            H(q * f + (n + 1), qe * f + n) = g;  // s- a^dag
        }
    }
    return LinearOperator(layout, std::move(H), false);
}

// Detuned JC evolution. The time-dependent interaction-picture Hamiltonian
// W(e^{i D t} s+ a + h.c.) is equivalent to the static rotating-frame
// generator H~ = (D/2) s_z + W(s+ a + s- a^dag) wrapped by the frame phase
// exp(i D t s_z / 2); generalized Rabi frequency sqrt(D^2/4 + (n+1) W^2) on
// each excitation subspace. Computed through the expm oracle.
inline LinearOperator jc_propagator_detuned(const HardwareParams& params, Qubit qubit,
                                            double delta, double t,
                                            const SpaceLayout& layout) {
    params.validate();
    require(t >= 0, ErrorCode::validation, "negative evolution time");
    int slot = layout.slot_of(qubit);
    int f = layout.fock_dim(), nq = 1 << layout.qubits().size();
    int bit = layout.n_qubits() - 1 - slot;

    CMatrix Ht = jc_hamiltonian(params, qubit, layout).matrix();
    CMatrix frame = CMatrix::Zero(layout.dim(), layout.dim());
    for (int q = 0; q < nq; ++q) {
        double sz = ((q >> bit) & 1) ? 1.0 : -1.0;
        for (int n = 0; n < f; ++n) {
            Ht(q * f + n, q * f + n) += 0.5 * delta * sz;
            frame(q * f + n, q * f + n) = std::exp(Complex(0, 0.5 * delta * t * sz));
        }
    }
    LinearOperator U = expm_oracle(LinearOperator(layout, std::move(Ht), false), t);
    return LinearOperator(layout, frame * U.matrix(), true);
}

// ---------------------------------------------------------------------------
// Protocol steps (accept pure states and density operators alike)
// ---------------------------------------------------------------------------

inline const SpaceLayout& state_layout_of(const PureState& s) { return s.layout(); }
inline const SpaceLayout& state_layout_of(const DensityOperator& s) { return s.layout(); }
inline const SpaceLayout& state_layout_of(const QuantumState& s) {
    return state_layout(s);
}

// R1: resonant test-qubit/resonator coupling for t_alpha = pi/(4 alpha W).
template <class State>
State r1_beamsplitter(const State& state, double alpha, const HardwareParams& params) {
    const SpaceLayout& L = state_layout_of(state);
    return apply(jc_propagator(params, Qubit::test, r1_time(alpha, params), L), state);
}

// R2(theta): instantaneous drive rotation on the named qubit.
template <class State>
State r2_rotation(const State& state, const RotationSpec& spec, Qubit qubit) {
    spec.validate();
    const SpaceLayout& L = state_layout_of(state);
    return apply(rotation_operator(L, qubit, spec.angle, spec.theta), state);
}

// Ancilla readout interaction: resonant coupling for pi/(2 alpha W').
template <class State>
State readout_coupling(const State& state, double alpha, const HardwareParams& params) {
    const SpaceLayout& L = state_layout_of(state);
    return apply(jc_propagator(params, Qubit::ancilla, readout_time(alpha, params), L),
                 state);
}

// Full single-excitation transfer, duration pi/(2 W').
template <class State>
State iswap_vacuum(const State& state, const HardwareParams& params, Qubit qubit) {
    const SpaceLayout& L = state_layout_of(state);
    return apply(jc_propagator(params, qubit, kPi / (2.0 * params.omega(qubit)), L),
                 state);
}

// ---------------------------------------------------------------------------
// Projective qubit measurement with post-selection
// ---------------------------------------------------------------------------

enum class Outcome { ground, excited };

template <class State>
struct Measurement {
    double probability = 0.0;
    std::optional<State> state;  // absent for an impossible branch
};

namespace detail {

constexpr double kBranchTol = 1e-12;

inline void projector_diag(const SpaceLayout& L, Qubit q, Outcome o, CVector& diag) {
    int slot = L.slot_of(q);
    int bit = L.n_qubits() - 1 - slot, f = L.fock_dim();
    int want = o == Outcome::excited ? 1 : 0;
    diag = CVector::Zero(L.dim());
    int nq = 1 << L.qubits().size();
    for (int qc = 0; qc < nq; ++qc)
        if (((qc >> bit) & 1) == want)
            for (int n = 0; n < f; ++n) diag[qc * f + n] = 1.0;
}

}  // namespace detail

inline Measurement<PureState> measure_qubit(const PureState& psi, Qubit q, Outcome o) {
    CVector diag;
    detail::projector_diag(psi.layout(), q, o, diag);
    CVector proj = diag.array() * psi.amplitudes().array();
    double p = proj.squaredNorm();
    if (p < detail::kBranchTol) return {p, std::nullopt};
    return {p, PureState(psi.layout(), proj / std::sqrt(p))};
}

inline Measurement<DensityOperator> measure_qubit(const DensityOperator& rho, Qubit q,
                                                  Outcome o) {
    CVector diag;
    detail::projector_diag(rho.layout(), q, o, diag);
    CMatrix proj = diag.asDiagonal() * rho.matrix() * diag.asDiagonal();
    double p = proj.trace().real();
    if (p < detail::kBranchTol) return {p, std::nullopt};
    return {p, DensityOperator(rho.layout(), proj / p)};
}

inline Measurement<QuantumState> measure_qubit(const QuantumState& s, Qubit q, Outcome o) {
    return std::visit(
        [&](const auto& x) -> Measurement<QuantumState> {
            auto m = measure_qubit(x, q, o);
            if (!m.state) return {m.probability, std::nullopt};
            return {m.probability, QuantumState(std::move(*m.state))};
        },
        s);
}

// Excited-state probability of one qubit (no collapse).
inline double excited_probability(const QuantumState& s, Qubit q) {
    return std::visit(
        [&](const auto& x) {
            CVector diag;
            detail::projector_diag(x.layout(), q, Outcome::excited, diag);
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, PureState>) {
                return (diag.array() * x.amplitudes().array()).matrix().squaredNorm();
            } else {
                return (diag.asDiagonal() * x.matrix()).trace().real();
            }
        },
        s);
}

}  // namespace qbs
