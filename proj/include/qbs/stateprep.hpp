#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qbs/dynamics.hpp"

namespace qbs {

// Parameters of the quantum-beam-splitter cat N(cos(phi)|alpha> - sin(phi)|0>).
struct CatSpec {
    double phi = kPi / 4.0;
    double alpha = 2.0;
    int cutoff = 4;  // Fock support of the pre-displacement synthesis target

    void validate() const {
        require(phi >= 0.0 && phi <= kPi / 2.0, ErrorCode::validation,
                "phi must lie in [0, pi/2]");
        require(alpha > 0.0, ErrorCode::validation, "alpha must be positive");
        require(cutoff >= 1, ErrorCode::validation, "synthesis cutoff must be >= 1");
    }
    // N = [1 - e^{-|a|^2/2} sin(2 phi)]^{-1/2}, recomputed on demand.
    double norm_constant() const {
        return 1.0 / std::sqrt(1.0 - std::exp(-alpha * alpha / 2.0) * std::sin(2.0 * phi));
    }
};

// One timed step of an experimental sequence.
struct Step {
    enum class Kind { drive, swap, displace, delay, measure };
    Kind kind = Kind::delay;
    Qubit qubit = Qubit::ancilla;  // drive/swap/measure
    double angle = 0.0;            // drive, radians
    double phase = 0.0;            // drive, radians
    double duration = 0.0;         // swap/delay, ns
    Complex amplitude = 0.0;       // displace

    static Step drive(Qubit q, double angle, double phase) {
        Step s;
        s.kind = Kind::drive;
        s.qubit = q;
        s.angle = angle;
        s.phase = phase;
        return s;
    }
    static Step swap(Qubit q, double duration) {
        Step s;
        s.kind = Kind::swap;
        s.qubit = q;
        s.duration = duration;
        return s;
    }
    static Step displace(Complex amplitude) {
        Step s;
        s.kind = Kind::displace;
        s.amplitude = amplitude;
        return s;
    }
    static Step delay(double duration) {
        Step s;
        s.kind = Kind::delay;
        s.duration = duration;
        return s;
    }
    static Step measure(Qubit q) {
        Step s;
        s.kind = Kind::measure;
        s.qubit = q;
        return s;
    }
};

inline const char* step_kind_name(Step::Kind k) {
    switch (k) {
        case Step::Kind::drive: return "drive";
        case Step::Kind::swap: return "swap";
        case Step::Kind::displace: return "displace";
        case Step::Kind::delay: return "delay";
        case Step::Kind::measure: return "measure";
    }
    return "?";
}

struct PulseProgram {
    SpaceLayout layout;
    std::vector<Step> steps;

    void validate() const {
        int swaps = 0;
        for (size_t i = 0; i < steps.size(); ++i) {
            const Step& s = steps[i];
            if (s.kind == Step::Kind::swap || s.kind == Step::Kind::delay)
                require(s.duration >= 0.0, ErrorCode::validation,
                        "step " + std::to_string(i) + ": negative duration");
            if (s.kind == Step::Kind::swap || s.kind == Step::Kind::drive ||
                s.kind == Step::Kind::measure)
                require(layout.has_qubit(s.qubit), ErrorCode::validation,
                        "step " + std::to_string(i) + ": qubit '" +
                            qubit_name(s.qubit) + "' not in program layout");
            if (s.kind == Step::Kind::swap) ++swaps;
        }
        // Worst-case photon growth is one excitation per swap; a program with
        // more swaps than cutoff levels can push population past truncation.
        require(swaps <= layout.n_cutoff(), ErrorCode::validation,
                "program has " + std::to_string(swaps) +
                    " swap steps but the layout cutoff is " +
                    std::to_string(layout.n_cutoff()));
    }
};

// ---------------------------------------------------------------------------
// Ideal cat construction
// ---------------------------------------------------------------------------

inline PureState ideal_cat(const CatSpec& spec, const SpaceLayout& layout) {
    spec.validate();
    int f = layout.fock_dim();
    double captured = coherent_captured_weight(spec.alpha, layout.n_cutoff());
    require(captured >= 1.0 - kTruncationTol, ErrorCode::truncation,
            "cutoff " + std::to_string(layout.n_cutoff()) +
                " cannot hold the |alpha| = " + std::to_string(spec.alpha) +
                " component");
    CVector res = std::cos(spec.phi) * coherent_amplitudes_raw(spec.alpha, f) -
                  std::sin(spec.phi) * coherent_amplitudes_raw(0.0, f);
    res /= res.norm();
    return embed_resonator_state(
        PureState(SpaceLayout::resonator_only(layout.n_cutoff()), std::move(res)),
        layout);
}

// ---------------------------------------------------------------------------
// Law-Eberly sequential synthesis
// ---------------------------------------------------------------------------

// Build the alternating Drive/Swap sequence on the ancilla that pumps
// |g', 0> into the target Fock superposition, by backward deflation: the
// inverse of the last swap empties the top occupied level |g',k> into
// |e',k-1>, the inverse of the last drive returns |e',k-1> to |g',k-1>,
// and so on down to the vacuum. Because every recorded step is an inverse,
// the parameters are directly those of the forward program.
//
// Targets must have real amplitudes up to one global phase: swap steps carry
// no phase of their own, so a forward program of drive/swap pairs can only
// reach states whose relative Fock phases are 0 or pi.
inline PulseProgram law_eberly_program(const CVector& target,
                                       const HardwareParams& params,
                                       const SpaceLayout& layout) {
    params.validate();
    require(layout.has_qubit(Qubit::ancilla), ErrorCode::validation,
            "synthesis needs the ancilla qubit in the layout");
    require(target.size() >= 1 && target.size() <= layout.fock_dim(),
            ErrorCode::validation, "target support exceeds layout cutoff");
    require(std::abs(target.norm() - 1.0) < 1e-9, ErrorCode::validation,
            "synthesis target is not normalized");

    // Strip the global phase of the largest component, then demand realness.
    Eigen::Index imax;
    target.cwiseAbs().maxCoeff(&imax);
    Complex g = target[imax] / std::abs(target[imax]);
    CVector t = target / g;
    require(t.imag().cwiseAbs().maxCoeff() < 1e-9, ErrorCode::validation,
            "synthesis target must be real up to a global phase (relative Fock "
            "phases other than 0/pi are not reachable with drive/swap pairs)");

    int top = static_cast<int>(t.size()) - 1;
    while (top > 0 && std::abs(t[top]) < 1e-12) --top;

    double omega = params.omega_ancilla;
    std::vector<double> a(static_cast<size_t>(top) + 1);
    for (int n = 0; n <= top; ++n) a[static_cast<size_t>(n)] = t[n].real();
    std::vector<double> r(a.size(), 0.0);  // |e'> row amplitudes are -i * r

    std::vector<std::pair<double, double>> pairs;  // (drive angle, swap duration)
    for (int k = top; k >= 1; --k) {
        // Inverse swap: (a_n, r_{n-1}) rotate by sqrt(n) W tau; zero a_k.
        double nu = std::sqrt(double(k)) * omega;
        double ang = (std::abs(a[k]) < 1e-15 && std::abs(r[k - 1]) < 1e-15)
                         ? 0.0
                         : std::atan2(-a[k], r[k - 1]);
        if (ang < 0) ang += kPi;
        double tau = ang / nu;
        for (int n = top; n >= 1; --n) {
            double th = std::sqrt(double(n)) * omega * tau;
            double c = std::cos(th), s = std::sin(th);
            double an = a[n] * c + r[n - 1] * s;
            double rn = -a[n] * s + r[n - 1] * c;
            a[n] = an;
            r[n - 1] = rn;
        }
        // Inverse drive: every (a_m, r_m) rotates by angle/2; zero r_{k-1}.
        double half = (std::abs(r[k - 1]) < 1e-15 && std::abs(a[k - 1]) < 1e-15)
                          ? 0.0
                          : std::atan2(r[k - 1], a[k - 1]);
        double c = std::cos(half), s = std::sin(half);
        for (int m = 0; m <= top; ++m) {
            double am = a[m] * c + r[m] * s;
            double rm = -a[m] * s + r[m] * c;
            a[m] = am;
            r[m] = rm;
        }
        double angle = 2.0 * half;
        if (angle < 0) angle += 4.0 * kPi;            // SU(2) period
        angle = std::fmod(angle, 4.0 * kPi);
        if (angle >= 2.0 * kPi) angle -= 2.0 * kPi;   // emit in [0, 2pi); only a
        pairs.emplace_back(angle, tau);               // global sign is dropped
    }
    require(std::abs(std::abs(a[0]) - 1.0) < 1e-9, ErrorCode::numeric,
            "deflation did not reach the vacuum");

    PulseProgram prog;
    prog.layout = layout;
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
        prog.steps.push_back(Step::drive(Qubit::ancilla, it->first, 0.0));
        prog.steps.push_back(Step::swap(Qubit::ancilla, it->second));
    }
    prog.validate();
    return prog;
}

// ---------------------------------------------------------------------------
// Program execution
// ---------------------------------------------------------------------------

struct ProgramResult {
    QuantumState state;
    std::vector<Qubit> measured;  // qubits named by measure steps, in order
};

// Forward to decoherence.hpp when delays should decohere; here delays are
// identity (couplings off, interaction picture).
inline ProgramResult execute_program(const PulseProgram& program,
                                     const HardwareParams& params,
                                     QuantumState state) {
    program.validate();
    require_same_layout(program.layout, state_layout(state));
    ProgramResult out{std::move(state), {}};
    for (const Step& s : program.steps) {
        switch (s.kind) {
            case Step::Kind::drive:
                out.state = apply(
                    rotation_operator(program.layout, s.qubit, s.angle, s.phase),
                    out.state);
                break;
            case Step::Kind::swap:
                out.state = apply(
                    jc_propagator(params, s.qubit, s.duration, program.layout),
                    out.state);
                break;
            case Step::Kind::displace:
                out.state =
                    apply(displacement_operator(program.layout, s.amplitude), out.state);
                break;
            case Step::Kind::delay:
                break;
            case Step::Kind::measure:
                out.measured.push_back(s.qubit);
                break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cat synthesis: Law-Eberly pumping of N(cos phi |a/2> - sin phi |-a/2>)
// truncated at spec.cutoff, then displacement by a/2. The endpoints phi = 0
// and phi = pi/2 degenerate to single coherent states and use the direct
// displacement path D(alpha)|0>, resp. the vacuum itself.
// ---------------------------------------------------------------------------

inline PulseProgram synthesis_program(const CatSpec& spec, const HardwareParams& params,
                                      const SpaceLayout& layout) {
    spec.validate();
    constexpr double kEdge = 1e-12;
    PulseProgram prog;
    prog.layout = layout;
    if (spec.phi < kEdge) {
        prog.steps.push_back(Step::displace(spec.alpha));
        return prog;
    }
    if (spec.phi > kPi / 2.0 - kEdge) {
        prog.steps.push_back(Step::displace(0.0));
        return prog;
    }
    double half = spec.alpha / 2.0;
    int f = spec.cutoff + 1;
    require(spec.cutoff <= layout.n_cutoff(), ErrorCode::validation,
            "synthesis cutoff exceeds layout cutoff");
    CVector t = std::cos(spec.phi) * coherent_amplitudes_raw(half, f) -
                std::sin(spec.phi) * coherent_amplitudes_raw(-half, f);
    t /= t.norm();
    prog = law_eberly_program(t, params, layout);
    prog.steps.push_back(Step::displace(half));
    return prog;
}

inline PureState synthesize_cat(const CatSpec& spec, const HardwareParams& params,
                                const SpaceLayout& layout) {
    PulseProgram prog = synthesis_program(spec, params, layout);
    std::vector<int> ground(layout.qubits().size(), 0);
    CVector v0 = CVector::Zero(layout.dim());
    v0[layout.index(ground, 0)] = 1.0;
    ProgramResult res =
        execute_program(prog, params, QuantumState(PureState(layout, std::move(v0))));
    return std::get<PureState>(res.state);
}

}  // namespace qbs
