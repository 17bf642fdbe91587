#pragma once

#include <cstdint>
#include <random>

#include "qbs/decoherence.hpp"
#include "qbs/wigner.hpp"

namespace qbs {

enum class PrepKind { ideal, synthesized, file };
enum class ReadoutModel {
    coupled,    // JC readout coupling for pi/(2 alpha W'), as run in hardware
    projective  // ideal which-path readout: resonator vacuum / non-vacuum
};

struct RunOptions {
    PrepKind prep = PrepKind::ideal;
    ReadoutModel readout = ReadoutModel::coupled;
    int cutoff = 0;  // 0 = auto from alpha
    bool decoherence = false;
    DelaySpec delay;  // idle interval before R1 (resonator decay acts if > 0)
    double gamma_res = 1.0 / 3000.0;
    std::optional<DensityOperator> initial_resonator;  // for PrepKind::file
    HardwareParams hardware;
};

inline int auto_cutoff(double alpha, int requested) {
    if (requested > 0) return requested;
    return std::max(20, static_cast<int>(std::ceil(alpha * alpha + 7.0 * alpha)));
}

// Closed-form probability of |e>: N_t^2 [ 1/2 sin^2 phi + cos^2 phi cos^2(theta/2) ],
// N_t = [1 - e^{-|a|^2/2} sin(2 phi)/sqrt(2)]^{-1/2}.
inline double norm_nt(const CatSpec& spec) {
    return 1.0 / std::sqrt(1.0 - std::exp(-spec.alpha * spec.alpha / 2.0) *
                                     std::sin(2.0 * spec.phi) / std::sqrt(2.0));
}

inline double pe_analytic(const CatSpec& spec, double theta) {
    spec.validate();
    double nt2 = norm_nt(spec) * norm_nt(spec);
    double c = std::cos(theta / 2.0);
    double s = std::sin(spec.phi);
    return nt2 * (0.5 * s * s + std::cos(spec.phi) * std::cos(spec.phi) * c * c);
}

// Ideal entangled output N_t (cos phi |psi_w>|alpha> - sin phi |psi_p>|0>),
// with psi_w = -i[sin(t/2)e^{i t/2}|g> + cos(t/2)e^{-i t/2}|e>] and
// psi_p = (|g> - i e^{-i theta}|e>)/sqrt(2); ancilla in |g'>.
inline PureState eq4_state(const CatSpec& spec, double theta, const SpaceLayout& layout) {
    CVector ca = coherent_amplitudes_raw(spec.alpha, layout.fock_dim());
    ca /= ca.norm();
    CVector c0 = coherent_amplitudes_raw(0.0, layout.fock_dim());
    c0 /= c0.norm();
    Complex wg = Complex(0, -1) * std::sin(theta / 2.0) * std::exp(Complex(0, theta / 2));
    Complex we = Complex(0, -1) * std::cos(theta / 2.0) * std::exp(Complex(0, -theta / 2));
    Complex pg = 1.0 / std::sqrt(2.0);
    Complex pe = Complex(0, -1) * std::exp(Complex(0, -theta)) / std::sqrt(2.0);
    CVector v = CVector::Zero(layout.dim());
    double cphi = std::cos(spec.phi), sphi = std::sin(spec.phi);
    std::vector<int> lv(layout.qubits().size(), 0);
    for (int n = 0; n < layout.fock_dim(); ++n) {
        auto set = [&](int test_level, Complex amp) {
            for (size_t k = 0; k < lv.size(); ++k)
                lv[k] = layout.qubits()[k] == Qubit::test ? test_level : 0;
            v[layout.index(lv, n)] += amp;
        };
        set(0, cphi * wg * ca[n] - sphi * pg * c0[n]);
        set(1, cphi * we * ca[n] - sphi * pe * c0[n]);
    }
    return PureState::normalized(layout, std::move(v));
}

// Result of one protocol run at a fixed theta.
struct RunPoint {
    double theta = 0.0;
    double pe = 0.0;            // unconditional P_e of the test qubit
    double pe_given_e = 0.0;    // P_{e;e'}
    double pe_given_g = 0.0;    // P_{e;g'}
    double p_branch_e = 0.0;    // ancilla branch probabilities
    double p_branch_g = 0.0;
    double overlap_eq4 = 0.0;   // |<eq4|psi>| (pure runs; fidelity^(1/2) otherwise)
    QuantumState state;         // post-readout joint state

    RunPoint() : state(PureState(SpaceLayout::qubit_only(Qubit::test),
                                 CVector::Ones(2) / std::sqrt(2.0))) {}
};

namespace detail {

inline QuantumState prepare_initial(const CatSpec& spec, const RunOptions& opt,
                                    const SpaceLayout& layout) {
    switch (opt.prep) {
        case PrepKind::ideal:
            return ideal_cat(spec, layout);
        case PrepKind::synthesized:
            return synthesize_cat(spec, opt.hardware, layout);
        case PrepKind::file: {
            require(opt.initial_resonator.has_value(), ErrorCode::validation,
                    "file preparation requested without a loaded state");
            return embed_resonator_state(*opt.initial_resonator, layout);
        }
    }
    throw Error(ErrorCode::validation, "unknown preparation kind");
}

// Branch probabilities and conditional P_e for the two readout models.
struct Conditionals {
    double p_e = 0, p_g = 0, pe_e = 0, pe_g = 0;
};

inline Conditionals conditionals_coupled(const QuantumState& post_r2, double alpha,
                                         const HardwareParams& hw) {
    QuantumState s = readout_coupling(post_r2, alpha, hw);
    Conditionals c;
    auto me = measure_qubit(s, Qubit::ancilla, Outcome::excited);
    auto mg = measure_qubit(s, Qubit::ancilla, Outcome::ground);
    c.p_e = me.probability;
    c.p_g = mg.probability;
    require(me.state || mg.state, ErrorCode::impossible_branch,
            "both readout branches are empty");
    c.pe_e = me.state ? excited_probability(*me.state, Qubit::test) : 0.0;
    c.pe_g = mg.state ? excited_probability(*mg.state, Qubit::test) : 0.0;
    return c;
}

inline Conditionals conditionals_projective(const QuantumState& post_r2) {
    // Which-path limit: branch g' <-> resonator found in |0>, e' <-> photons.
    const SpaceLayout& L = state_layout(post_r2);
    DensityOperator rho = to_density(post_r2);
    int f = L.fock_dim(), nq = 1 << L.qubits().size();
    int bit_test = L.n_qubits() - 1 - L.slot_of(Qubit::test);
    Conditionals c;
    double pe_g_joint = 0, pe_e_joint = 0;
    for (int q = 0; q < nq; ++q) {
        bool test_excited = (q >> bit_test) & 1;
        for (int n = 0; n < f; ++n) {
            double w = rho.matrix()(q * f + n, q * f + n).real();
            if (n == 0) {
                c.p_g += w;
                if (test_excited) pe_g_joint += w;
            } else {
                c.p_e += w;
                if (test_excited) pe_e_joint += w;
            }
        }
    }
    c.pe_e = c.p_e > detail::kBranchTol ? pe_e_joint / c.p_e : 0.0;
    c.pe_g = c.p_g > detail::kBranchTol ? pe_g_joint / c.p_g : 0.0;
    return c;
}

}  // namespace detail

// One full delayed-choice run: preparation, optional decohering delay, R1 at
// t_alpha' (re-tuned to the decayed amplitude), R2(theta), ancilla readout.
inline RunPoint delayed_choice_run(const CatSpec& spec, double theta,
                                   const RunOptions& opt) {
    spec.validate();
    int nc = auto_cutoff(spec.alpha, opt.cutoff);
    SpaceLayout layout = SpaceLayout::full(nc);

    QuantumState state = detail::prepare_initial(spec, opt, layout);
    double alpha_eff = spec.alpha;
    if (opt.decoherence && opt.delay.T > 0.0) {
        DensityOperator rho = to_density(state);
        rho = lindblad_evolve(rho, DecoherenceRates::resonator_only(opt.gamma_res),
                              nullptr, opt.delay.T);
        state = rho;
        alpha_eff = opt.delay.alpha_prime(spec.alpha, opt.gamma_res);
    }

    state = r1_beamsplitter(state, alpha_eff, opt.hardware);
    state = r2_rotation(state, RotationSpec{theta, kPi / 2.0}, Qubit::test);

    RunPoint pt;
    pt.theta = theta;
    pt.pe = excited_probability(state, Qubit::test);
    pt.overlap_eq4 = std::sqrt(fidelity(state, eq4_state(spec, theta, layout)));

    detail::Conditionals c =
        opt.readout == ReadoutModel::coupled
            ? detail::conditionals_coupled(state, spec.alpha, opt.hardware)
            : detail::conditionals_projective(state);
    pt.p_branch_e = c.p_e;
    pt.p_branch_g = c.p_g;
    pt.pe_given_e = c.pe_e;
    pt.pe_given_g = c.pe_g;
    pt.state = opt.readout == ReadoutModel::coupled
                   ? readout_coupling(state, spec.alpha, opt.hardware)
                   : state;
    return pt;
}

struct ExperimentRecord {
    std::vector<double> theta_axis;
    std::vector<double> pe;
    std::vector<double> pe_given_ancilla_e;
    std::vector<double> pe_given_ancilla_g;
    std::vector<double> p_branch_e;
    std::vector<double> p_branch_g;
    double contrast_wave = 0.0;      // of P_{e;e'}
    double contrast_particle = 0.0;  // of P_{e;g'}
    double contrast_pe = 0.0;        // of the unconditional fringe
    double norm_nt = 0.0;
};

inline double fringe_contrast(const std::vector<double>& v) {
    require(!v.empty(), ErrorCode::validation, "empty fringe");
    double lo = v[0], hi = v[0];
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return (hi + lo) > 0 ? (hi - lo) / (hi + lo) : 0.0;
}

// Sweep theta over [0, 2pi); the Fig. 2a surface is this scan per phi.
inline ExperimentRecord fringe_scan(const CatSpec& spec, int theta_resolution,
                                    const RunOptions& opt) {
    require(theta_resolution >= 8, ErrorCode::validation,
            "theta resolution must be at least 8");
    ExperimentRecord rec;
    rec.norm_nt = norm_nt(spec);
    for (int i = 0; i < theta_resolution; ++i) {
        double theta = 2.0 * kPi * i / theta_resolution;
        RunPoint pt = delayed_choice_run(spec, theta, opt);
        rec.theta_axis.push_back(theta);
        rec.pe.push_back(pt.pe);
        rec.pe_given_ancilla_e.push_back(pt.pe_given_e);
        rec.pe_given_ancilla_g.push_back(pt.pe_given_g);
        rec.p_branch_e.push_back(pt.p_branch_e);
        rec.p_branch_g.push_back(pt.p_branch_g);
    }
    rec.contrast_pe = fringe_contrast(rec.pe);
    rec.contrast_wave = fringe_contrast(rec.pe_given_ancilla_e);
    rec.contrast_particle = fringe_contrast(rec.pe_given_ancilla_g);
    return rec;
}

// Fig. 2b: same sweep viewed through the ancilla readout branches.
inline ExperimentRecord conditional_fringe_scan(const CatSpec& spec, int theta_resolution,
                                                const RunOptions& opt) {
    return fringe_scan(spec, theta_resolution, opt);
}

enum class WignerCondition { none, test_g, test_e };

// Fig. 3 / S3 pipeline: run the protocol, post-select (or trace out) the test
// qubit, reduce to the resonator and map W over the grid.
inline WignerGrid conditioned_wigner(const CatSpec& spec, double theta,
                                     WignerCondition condition, const RunOptions& opt,
                                     const GridBounds& bounds = {},
                                     const GridResolution& res = {}, int threads = 1) {
    RunOptions o = opt;
    o.readout = ReadoutModel::projective;  // keep the ancilla untouched
    RunPoint pt = delayed_choice_run(spec, theta, o);
    QuantumState sel = pt.state;
    if (condition != WignerCondition::none) {
        auto m = measure_qubit(pt.state, Qubit::test,
                               condition == WignerCondition::test_g ? Outcome::ground
                                                                    : Outcome::excited);
        require(m.state.has_value(), ErrorCode::impossible_branch,
                "post-selected branch has probability below 1e-12");
        sel = *m.state;
    }
    DensityOperator rho_res = partial_trace(to_density(sel), Subsystem::resonator);
    return wigner_grid(rho_res, bounds, res, threads);
}

// Fig. S4: decohere the cat for each delay, re-tune t_alpha', run the
// protocol, and record fringe contrasts plus the unread-case Wigner minimum
// and the coherence-sum ratio to T = 0.
struct DelayScanPoint {
    double T = 0.0;
    double gamma_t = 0.0;
    double contrast_wave = 0.0;
    double contrast_particle = 0.0;
    double contrast_pe = 0.0;
    double min_w = 0.0;
    Complex min_w_chi;
    double coherence_ratio = 1.0;
};

inline std::vector<DelayScanPoint> quantum_to_classical_scan(
    const CatSpec& spec, const std::vector<DelaySpec>& delays, const RunOptions& opt,
    int theta_resolution = 32, int threads = 1) {
    spec.validate();
    int nc = auto_cutoff(spec.alpha, opt.cutoff);
    SpaceLayout res_layout = SpaceLayout::resonator_only(nc);

    // T = 0 coherence reference uses the same preparation as the scan.
    RunOptions o0 = opt;
    o0.decoherence = false;
    o0.delay = DelaySpec{0.0};
    QuantumState prep0 = detail::prepare_initial(spec, o0, SpaceLayout::full(nc));
    DensityOperator rho0 = partial_trace(to_density(prep0), Subsystem::resonator);
    double c_ref = coherence_sum(rho0, spec, DelaySpec{0.0}, opt.gamma_res);

    std::vector<DelayScanPoint> out;
    for (const DelaySpec& d : delays) {
        RunOptions o = opt;
        o.decoherence = d.T > 0.0;
        o.delay = d;

        DelayScanPoint p;
        p.T = d.T;
        p.gamma_t = opt.gamma_res * d.T;

        ExperimentRecord rec = fringe_scan(spec, theta_resolution, o);
        p.contrast_wave = rec.contrast_wave;
        p.contrast_particle = rec.contrast_particle;
        p.contrast_pe = rec.contrast_pe;

        RunOptions oW = o;
        oW.readout = ReadoutModel::projective;
        RunPoint pt = delayed_choice_run(spec, kPi / 2.0, oW);
        DensityOperator rr = partial_trace(to_density(pt.state), Subsystem::resonator);
        WignerGrid g = wigner_grid(rr, {}, {}, threads);
        WignerMinimum mn = wigner_min(g, rr, true);
        p.min_w = mn.w_star;
        p.min_w_chi = mn.chi_star.chi;

        // coherence of the decayed field just before R1
        DensityOperator rho_T =
            d.T > 0.0 ? lindblad_evolve(rho0, DecoherenceRates::resonator_only(
                                                  opt.gamma_res),
                                        nullptr, d.T)
                      : rho0;
        p.coherence_ratio = coherence_sum(rho_T, spec, d, opt.gamma_res) / c_ref;
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite statistics
// ---------------------------------------------------------------------------

struct ShotSample {
    // counts[ancilla][test]
    std::uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

// Multinomial draw over the four joint (ancilla, test) outcomes, by inverse
// CDF over mt19937_64 uniforms: deterministic for a fixed seed.
inline ShotSample sample_shots(const RunPoint& point, std::uint64_t shots,
                               std::uint64_t seed) {
    require(shots > 0, ErrorCode::validation, "shots must be positive");
    double p[4] = {point.p_branch_g * (1.0 - point.pe_given_g),
                   point.p_branch_g * point.pe_given_g,
                   point.p_branch_e * (1.0 - point.pe_given_e),
                   point.p_branch_e * point.pe_given_e};
    double total = p[0] + p[1] + p[2] + p[3];
    require(std::abs(total - 1.0) < 1e-9, ErrorCode::numeric,
            "joint outcome probabilities do not sum to 1");
    ShotSample s;
    s.shots = shots;
    s.seed = seed;
    std::mt19937_64 rng(seed);
    constexpr double kInv = 1.0 / 18446744073709551616.0;  // 2^-64
    for (std::uint64_t k = 0; k < shots; ++k) {
        double u = (static_cast<double>(rng()) + 0.5) * kInv * total;
        int cell = 3;
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            acc += p[j];
            if (u <= acc) {
                cell = j;
                break;
            }
        }
        ++s.counts[cell / 2][cell % 2];
    }
    return s;
}

}  // namespace qbs
