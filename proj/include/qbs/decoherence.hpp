#pragma once

#include <vector>

#include "qbs/stateprep.hpp"

namespace qbs {

// Open-system rates in 1/ns. Defaults from the hardware: resonator T1 = 3.0 us
// without measurable dephasing, qubit T1 = 520/560 ns, Ramsey T2 ~ 150 ns with
// gamma_phi = 1/T2 - 1/(2 T1).
struct DecoherenceRates {
    double gamma_res = 0.0;
    double gamma1_test = 0.0;
    double gamma1_anc = 0.0;
    double gamma_phi_test = 0.0;
    double gamma_phi_anc = 0.0;

    static DecoherenceRates hardware_defaults() {
        DecoherenceRates r;
        r.gamma_res = 1.0 / 3000.0;
        r.gamma1_test = 1.0 / 520.0;
        r.gamma1_anc = 1.0 / 560.0;
        r.gamma_phi_test = std::max(0.0, 1.0 / 150.0 - 1.0 / (2.0 * 520.0));
        r.gamma_phi_anc = std::max(0.0, 1.0 / 150.0 - 1.0 / (2.0 * 560.0));
        return r;
    }
    static DecoherenceRates resonator_only(double gamma) {
        DecoherenceRates r;
        r.gamma_res = gamma;
        return r;
    }
    void validate() const {
        require(gamma_res >= 0 && gamma1_test >= 0 && gamma1_anc >= 0 &&
                    gamma_phi_test >= 0 && gamma_phi_anc >= 0,
                ErrorCode::validation, "decoherence rates must be non-negative");
    }
};

// Idle interval between preparation and the qubit-resonator interaction.
struct DelaySpec {
    double T = 0.0;  // ns

    void validate() const {
        require(T >= 0.0, ErrorCode::validation, "delay must be non-negative");
    }
    // alpha' = alpha e^{-gamma T / 2}, always derived, never stored.
    double alpha_prime(double alpha, double gamma) const {
        return alpha * std::exp(-gamma * T / 2.0);
    }
};

namespace detail {

// Jump operators for the layout: sqrt(g) a, sqrt(g1) s- per qubit,
// sqrt(g_phi/2) s_z per qubit.
inline std::vector<std::pair<double, CMatrix>> jump_operators(
    const SpaceLayout& L, const DecoherenceRates& rates) {
    std::vector<std::pair<double, CMatrix>> out;
    int f = L.fock_dim(), nq = 1 << L.qubits().size();
    if (rates.gamma_res > 0 && L.has_resonator()) {
        CMatrix a = CMatrix::Zero(f, f);
        for (int n = 1; n < f; ++n) a(n - 1, n) = std::sqrt(double(n));
        out.emplace_back(rates.gamma_res, embed_resonator_op(L, a));
    }
    for (Qubit q : L.qubits()) {
        double g1 = q == Qubit::test ? rates.gamma1_test : rates.gamma1_anc;
        double gphi = q == Qubit::test ? rates.gamma_phi_test : rates.gamma_phi_anc;
        int bit = L.n_qubits() - 1 - L.slot_of(q);
        if (g1 > 0) {
            CMatrix sm = CMatrix::Zero(L.dim(), L.dim());
            for (int qc = 0; qc < nq; ++qc)
                if ((qc >> bit) & 1)
                    for (int n = 0; n < f; ++n)
                        sm((qc & ~(1 << bit)) * f + n, qc * f + n) = 1.0;
            out.emplace_back(g1, std::move(sm));
        }
        if (gphi > 0) {
            CMatrix sz = CMatrix::Zero(L.dim(), L.dim());
            for (int qc = 0; qc < nq; ++qc) {
                double v = ((qc >> bit) & 1) ? 1.0 : -1.0;
                for (int n = 0; n < f; ++n) sz(qc * f + n, qc * f + n) = v;
            }
            out.emplace_back(gphi / 2.0, std::move(sz));
        }
    }
    return out;
}

}  // namespace detail

// Fixed-step RK4 integration of the Lindblad master equation
//   drho/dt = -i[H, rho] + sum_k g_k (L rho L^dag - 1/2 {L^dag L, rho}).
// The generator is exactly trace-free, so the trace is conserved to roundoff.
inline DensityOperator lindblad_evolve(const DensityOperator& rho,
                                       const DecoherenceRates& rates,
                                       const LinearOperator* hamiltonian, double t,
                                       double dt = 0.1) {
    rates.validate();
    require(dt > 0, ErrorCode::validation, "dt must be positive");
    require(t >= 0, ErrorCode::validation, "t must be non-negative");
    const SpaceLayout& L = rho.layout();
    if (hamiltonian) require_same_layout(L, hamiltonian->layout());

    auto jumps = detail::jump_operators(L, rates);
    std::vector<std::pair<CMatrix, CMatrix>> terms;  // (sqrt-rate-scaled L, L^dag L)
    for (auto& [g, Lk] : jumps)
        terms.emplace_back(std::sqrt(g) * Lk, g * (Lk.adjoint() * Lk));

    auto rhs = [&](const CMatrix& r) {
        CMatrix d = CMatrix::Zero(r.rows(), r.cols());
        if (hamiltonian) {
            const CMatrix& H = hamiltonian->matrix();
            d += Complex(0, -1) * (H * r - r * H);
        }
        for (auto& [Lk, LdL] : terms)
            d += Lk * r * Lk.adjoint() - 0.5 * (LdL * r + r * LdL);
        return d;
    };

    CMatrix r = rho.matrix();
    long steps = std::lround(t / dt);
    double h = steps > 0 ? t / double(steps) : 0.0;
    for (long i = 0; i < steps; ++i) {
        CMatrix k1 = rhs(r);
        CMatrix k2 = rhs(r + (h / 2) * k1);
        CMatrix k3 = rhs(r + (h / 2) * k2);
        CMatrix k4 = rhs(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    r = 0.5 * (r + r.adjoint().eval());  // scrub roundoff asymmetry
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() > -1e-6, ErrorCode::numeric,
            "Lindblad step size too large: minimum eigenvalue " +
                std::to_string(es.eigenvalues().minCoeff()) +
                "; decrease dt");
    require(std::abs(r.trace().real() - rho.matrix().trace().real()) < 1e-9,
            ErrorCode::numeric, "Lindblad evolution drifted the trace");
    return DensityOperator(L, std::move(r));
}

// Field density operator of the delayed cat: the damped-superposition result
//   N^2 [cos^2 phi |a'><a'| + sin^2 phi |0><0|
//        - 1/2 e^{-|a|^2 (1 - e^{-gT})/2} sin(2 phi) (|a'><0| + |0><a'|)],
// a' = a e^{-gT/2}. The cross-term exponent uses the undecayed alpha; tests
// arbitrate this choice against the master equation.
inline DensityOperator analytic_decohered_cat(const CatSpec& spec, const DelaySpec& delay,
                                              double gamma, const SpaceLayout& layout) {
    spec.validate();
    delay.validate();
    require(gamma >= 0, ErrorCode::validation, "gamma must be non-negative");
    require(layout.qubits().empty(), ErrorCode::validation,
            "analytic decohered cat is a resonator-only state");
    double gT = gamma * delay.T;
    double ap = delay.alpha_prime(spec.alpha, gamma);
    double n2 = spec.norm_constant() * spec.norm_constant();
    double cross = std::exp(-spec.alpha * spec.alpha * (1.0 - std::exp(-gT)) / 2.0);

    int fd = layout.fock_dim();
    CVector ca = coherent_amplitudes_raw(ap, fd);
    ca /= ca.norm();
    CVector c0 = coherent_amplitudes_raw(0.0, fd);
    c0 /= c0.norm();
    double cphi = std::cos(spec.phi), sphi = std::sin(spec.phi);
    CMatrix m = n2 * (cphi * cphi * (ca * ca.adjoint()) + sphi * sphi * (c0 * c0.adjoint()) -
                      0.5 * cross * std::sin(2.0 * spec.phi) *
                          (ca * c0.adjoint() + c0 * ca.adjoint()));
    // Truncation leaves a ~1e-9 trace deficit at working cutoffs; rescale it
    // away so the constructor's trace gate reflects genuine errors only.
    m /= m.trace().real();
    return DensityOperator(layout, std::move(m));
}

// Quantum-coherence measure of the cat: isolate the |a'><0| + h.c. sector by
// removing the |a'><a'| and |0><0| components (weights fitted exactly so the
// remainder has no <a'|.|a'> or <0|.|0> element), then sum the magnitudes of
// the photon-number off-diagonal elements of the remainder.
inline double coherence_sum(const DensityOperator& rho, const CatSpec& spec,
                            const DelaySpec& delay, double gamma) {
    require(rho.layout().qubits().empty(), ErrorCode::validation,
            "coherence_sum expects a resonator-only state");
    double ap = delay.alpha_prime(spec.alpha, gamma);
    int fd = rho.layout().fock_dim();
    CVector ca = coherent_amplitudes_raw(ap, fd);
    ca /= ca.norm();
    CVector c0 = coherent_amplitudes_raw(0.0, fd);
    c0 /= c0.norm();

    double ov2 = std::norm(ca.dot(c0));
    double ra = ca.dot(rho.matrix() * ca).real();
    double r0 = c0.dot(rho.matrix() * c0).real();
    double det = 1.0 - ov2 * ov2;
    double la = (ra - ov2 * r0) / det;
    double l0 = (r0 - ov2 * ra) / det;

    CMatrix rem =
        rho.matrix() - la * (ca * ca.adjoint()) - l0 * (c0 * c0.adjoint());
    double s = 0.0;
    for (int n = 0; n < fd; ++n)
        for (int m = 0; m < fd; ++m)
            if (n != m) s += std::abs(rem(n, m));
    return s;
}

}  // namespace qbs
