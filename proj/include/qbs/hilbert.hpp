#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <variant>

#include "qbs/layout.hpp"

namespace qbs {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

constexpr double kPi = std::numbers::pi;

// Tolerances from the data-type contracts.
constexpr double kNormTol = 1e-9;
constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-9;
constexpr double kEigTol = 1e-8;
constexpr double kUnitaryTol = 1e-9;
constexpr double kTruncationTol = 1e-6;

class PureState {
public:
    PureState(SpaceLayout layout, CVector amplitudes)
        : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
        require(amps_.size() == layout_.dim(), ErrorCode::validation,
                "amplitude vector size does not match layout dimension");
        require(std::abs(amps_.norm() - 1.0) < kNormTol, ErrorCode::numeric,
                "pure state is not normalized");
    }

    static PureState normalized(SpaceLayout layout, CVector amplitudes) {
        double n = amplitudes.norm();
        require(n > 0, ErrorCode::validation, "cannot normalize a zero vector");
        return PureState(std::move(layout), amplitudes / n);
    }

    const SpaceLayout& layout() const { return layout_; }
    const CVector& amplitudes() const { return amps_; }
    int dim() const { return static_cast<int>(amps_.size()); }

private:
    SpaceLayout layout_;
    CVector amps_;
};

class DensityOperator {
public:
    DensityOperator(SpaceLayout layout, CMatrix matrix)
        : layout_(std::move(layout)), m_(std::move(matrix)) {
        require(m_.rows() == layout_.dim() && m_.cols() == layout_.dim(),
                ErrorCode::validation, "density matrix size does not match layout");
        require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() < kHermTol, ErrorCode::numeric,
                "density operator is not Hermitian");
        require(std::abs(m_.trace().real() - 1.0) < kTraceTol &&
                    std::abs(m_.trace().imag()) < kTraceTol,
                ErrorCode::numeric,
                "density operator trace " + std::to_string(m_.trace().real()) + " != 1");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
        require(es.eigenvalues().minCoeff() > -kEigTol, ErrorCode::numeric,
                "density operator has negative eigenvalue " +
                    std::to_string(es.eigenvalues().minCoeff()));
    }

    static DensityOperator from_pure(const PureState& psi) {
        return DensityOperator(psi.layout(),
                               psi.amplitudes() * psi.amplitudes().adjoint());
    }

    const SpaceLayout& layout() const { return layout_; }
    const CMatrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    SpaceLayout layout_;
    CMatrix m_;
};

class LinearOperator {
public:
    LinearOperator(SpaceLayout layout, CMatrix matrix, bool unitary_flag)
        : layout_(std::move(layout)), m_(std::move(matrix)), unitary_(unitary_flag) {
        require(m_.rows() == layout_.dim() && m_.cols() == layout_.dim(),
                ErrorCode::validation, "operator size does not match layout");
        if (unitary_) {
            double dev = (m_.adjoint() * m_ - CMatrix::Identity(m_.rows(), m_.cols()))
                             .cwiseAbs()
                             .maxCoeff();
            require(dev < kUnitaryTol, ErrorCode::numeric,
                    "operator flagged unitary deviates from unitarity by " +
                        std::to_string(dev));
        }
    }

    const SpaceLayout& layout() const { return layout_; }
    const CMatrix& matrix() const { return m_; }
    bool unitary() const { return unitary_; }

private:
    SpaceLayout layout_;
    CMatrix m_;
    bool unitary_ = false;
};

// Either representation of a system state; dynamics operations accept both.
using QuantumState = std::variant<PureState, DensityOperator>;

inline const SpaceLayout& state_layout(const QuantumState& s) {
    return std::visit([](const auto& x) -> const SpaceLayout& { return x.layout(); }, s);
}

inline PureState apply(const LinearOperator& U, const PureState& psi) {
    require_same_layout(U.layout(), psi.layout());
    return PureState(psi.layout(), U.matrix() * psi.amplitudes());
}

inline DensityOperator apply(const LinearOperator& U, const DensityOperator& rho) {
    require_same_layout(U.layout(), rho.layout());
    return DensityOperator(rho.layout(), U.matrix() * rho.matrix() * U.matrix().adjoint());
}

inline QuantumState apply(const LinearOperator& U, const QuantumState& s) {
    return std::visit([&](const auto& x) -> QuantumState { return apply(U, x); }, s);
}

// ---------------------------------------------------------------------------
// Elementary constructions
// ---------------------------------------------------------------------------

inline PureState fock_state(const SpaceLayout& layout, int ancilla_level, int test_level,
                            int n) {
    require(n >= 0 && n <= layout.n_cutoff(), ErrorCode::truncation,
            "Fock index " + std::to_string(n) + " exceeds cutoff " +
                std::to_string(layout.n_cutoff()));
    std::vector<int> levels;
    for (Qubit q : layout.qubits())
        levels.push_back(q == Qubit::ancilla ? ancilla_level : test_level);
    CVector v = CVector::Zero(layout.dim());
    v[layout.index(levels, n)] = 1.0;
    return PureState(layout, std::move(v));
}

// Poisson amplitudes C_n = e^{-|a|^2/2} a^n / sqrt(n!) of the truncated
// coherent state, before renormalization.
inline CVector coherent_amplitudes_raw(Complex alpha, int fock_dim) {
    CVector c(fock_dim);
    c[0] = std::exp(-std::norm(alpha) / 2.0);
    for (int n = 1; n < fock_dim; ++n) c[n] = c[n - 1] * alpha / std::sqrt(double(n));
    return c;
}

// Weight of the coherent state captured below the cutoff (Poisson CDF).
inline double coherent_captured_weight(Complex alpha, int n_cutoff) {
    double lambda = std::norm(alpha), term = std::exp(-lambda), sum = term;
    for (int n = 1; n <= n_cutoff; ++n) {
        term *= lambda / n;
        sum += term;
    }
    return sum;
}

inline PureState coherent_state(const SpaceLayout& layout, Complex alpha) {
    double captured = coherent_captured_weight(alpha, layout.n_cutoff());
    require(captured >= 1.0 - kTruncationTol, ErrorCode::truncation,
            "coherent state |alpha|=" + std::to_string(std::abs(alpha)) +
                " not captured by cutoff " + std::to_string(layout.n_cutoff()) +
                " (captured weight " + std::to_string(captured) + ")");
    CVector res = coherent_amplitudes_raw(alpha, layout.fock_dim());
    res /= res.norm();
    std::vector<int> ground(layout.qubits().size(), 0);
    CVector v = CVector::Zero(layout.dim());
    int base = layout.index(ground, 0);
    v.segment(base, layout.fock_dim()) = res;
    return PureState(layout, std::move(v));
}

namespace detail {

// exp(chi a^dag - chi* a) on a bare `dim`-level Fock ladder, via Hermitian
// eigendecomposition of i(chi a^dag - chi* a).
inline CMatrix displacement_matrix(Complex chi, int dim) {
    CMatrix H = CMatrix::Zero(dim, dim);
    for (int n = 0; n < dim - 1; ++n) {
        // i * (chi |n+1><n| sqrt(n+1) - chi* |n><n+1| sqrt(n+1))
        double r = std::sqrt(double(n + 1));
        H(n + 1, n) = Complex(0, 1) * chi * r;
        H(n, n + 1) = Complex(0, -1) * std::conj(chi) * r;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    CVector phases(dim);
    for (int k = 0; k < dim; ++k) phases[k] = std::exp(Complex(0, -es.eigenvalues()[k]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Embed a resonator-factor matrix as (identity on qubits) tensor M.
inline CMatrix embed_resonator_op(const SpaceLayout& layout, const CMatrix& M) {
    int f = layout.fock_dim(), nq = 1 << layout.qubits().size();
    CMatrix out = CMatrix::Zero(layout.dim(), layout.dim());
    for (int q = 0; q < nq; ++q) out.block(q * f, q * f, f, f) = M;
    return out;
}

}  // namespace detail

// D(chi) = exp(chi a^dag - chi* a), identity on the qubit factors. If
// `captured_weight` is given it receives the Poisson weight of D(chi)|0>
// below the cutoff; values under 1-1e-6 indicate the result is truncation
// limited (callers that need large |chi| evaluate on a padded space).
inline LinearOperator displacement_operator(const SpaceLayout& layout, Complex chi,
                                            double* captured_weight = nullptr) {
    require(layout.has_resonator(), ErrorCode::validation,
            "displacement requires a resonator factor");
    if (captured_weight)
        *captured_weight = coherent_captured_weight(chi, layout.n_cutoff());
    CMatrix D = detail::displacement_matrix(chi, layout.fock_dim());
    return LinearOperator(layout, detail::embed_resonator_op(layout, D), true);
}

// Photon-number parity exp(i pi a^dag a): diagonal (-1)^n on the resonator.
inline LinearOperator parity_operator(const SpaceLayout& layout) {
    require(layout.has_resonator(), ErrorCode::validation,
            "parity requires a resonator factor");
    CMatrix P = CMatrix::Zero(layout.fock_dim(), layout.fock_dim());
    for (int n = 0; n < layout.fock_dim(); ++n) P(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return LinearOperator(layout, detail::embed_resonator_op(layout, P), true);
}

// ---------------------------------------------------------------------------
// Reductions and overlaps
// ---------------------------------------------------------------------------

enum class Subsystem { ancilla, test, resonator };

inline Subsystem subsystem_from_name(const std::string& s) {
    if (s == "ancilla") return Subsystem::ancilla;
    if (s == "test") return Subsystem::test;
    if (s == "resonator") return Subsystem::resonator;
    throw Error(ErrorCode::validation, "unknown subsystem label '" + s + "'");
}

// Reduced density operator on the kept factor, tracing out everything else.
inline DensityOperator partial_trace(const DensityOperator& rho, Subsystem keep) {
    const SpaceLayout& L = rho.layout();
    SpaceLayout out_layout;
    if (keep == Subsystem::resonator) {
        require(L.has_resonator(), ErrorCode::validation, "layout has no resonator");
        out_layout = SpaceLayout::resonator_only(L.n_cutoff());
    } else {
        Qubit q = keep == Subsystem::ancilla ? Qubit::ancilla : Qubit::test;
        require(L.has_qubit(q), ErrorCode::validation,
                std::string("layout has no '") + qubit_name(q) + "' qubit");
        out_layout = SpaceLayout::qubit_only(q);
    }

    int f = L.fock_dim(), nq = 1 << L.qubits().size();
    CMatrix out = CMatrix::Zero(out_layout.dim(), out_layout.dim());
    if (keep == Subsystem::resonator) {
        for (int q = 0; q < nq; ++q)
            out += rho.matrix().block(q * f, q * f, f, f);
    } else {
        int slot = L.slot_of(keep == Subsystem::ancilla ? Qubit::ancilla : Qubit::test);
        int shift = L.n_qubits() - 1 - slot;
        for (int qa = 0; qa < nq; ++qa) {
            for (int qb = 0; qb < nq; ++qb) {
                int la = (qa >> shift) & 1, lb = (qb >> shift) & 1;
                // off-slot qubit levels and photon number must match
                if ((qa & ~(1 << shift)) != (qb & ~(1 << shift))) continue;
                out(la, lb) += rho.matrix().block(qa * f, qb * f, f, f).trace();
            }
        }
    }
    return DensityOperator(std::move(out_layout), std::move(out));
}

inline Complex overlap(const PureState& a, const PureState& b) {
    require_same_layout(a.layout(), b.layout());
    return a.amplitudes().dot(b.amplitudes());  // Eigen dot conjugates the left side
}

inline double fidelity(const DensityOperator& rho, const PureState& psi) {
    require_same_layout(rho.layout(), psi.layout());
    Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
    require(std::abs(f.imag()) < 1e-10, ErrorCode::numeric,
            "fidelity has non-real value");
    return f.real();
}

inline double fidelity(const QuantumState& s, const PureState& psi) {
    if (std::holds_alternative<PureState>(s))
        return std::norm(overlap(std::get<PureState>(s), psi));
    return fidelity(std::get<DensityOperator>(s), psi);
}

inline DensityOperator to_density(const QuantumState& s) {
    if (std::holds_alternative<PureState>(s))
        return DensityOperator::from_pure(std::get<PureState>(s));
    return std::get<DensityOperator>(s);
}

// Embed a resonator-only state into a larger layout with all qubits ground.
inline DensityOperator embed_resonator_state(const DensityOperator& rho_res,
                                             const SpaceLayout& layout) {
    require(rho_res.layout().qubits().empty(), ErrorCode::validation,
            "expected a resonator-only state");
    require(rho_res.layout().fock_dim() == layout.fock_dim(), ErrorCode::layout_mismatch,
            "resonator cutoffs differ");
    CMatrix out = CMatrix::Zero(layout.dim(), layout.dim());
    std::vector<int> ground(layout.qubits().size(), 0);
    int base = layout.index(ground, 0);
    out.block(base, base, layout.fock_dim(), layout.fock_dim()) = rho_res.matrix();
    return DensityOperator(layout, std::move(out));
}

inline PureState embed_resonator_state(const PureState& psi_res,
                                       const SpaceLayout& layout) {
    require(psi_res.layout().qubits().empty(), ErrorCode::validation,
            "expected a resonator-only state");
    require(psi_res.layout().fock_dim() == layout.fock_dim(), ErrorCode::layout_mismatch,
            "resonator cutoffs differ");
    CVector out = CVector::Zero(layout.dim());
    std::vector<int> ground(layout.qubits().size(), 0);
    int base = layout.index(ground, 0);
    out.segment(base, layout.fock_dim()) = psi_res.amplitudes();
    return PureState(layout, std::move(out));
}

// 1/2 * trace norm of (a - b); the standard distinguishability metric.
inline double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    require_same_layout(a.layout(), b.layout());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix() - b.matrix(),
                                              Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qbs
