// qbs-sim: command-line front end for the quantum-beam-splitter simulator.
// Subcommands map to the experiment pipelines; every output file gets a
// .meta.json sidecar holding the full resolved configuration.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "qbs/cli_config.hpp"

namespace {

using namespace qbs;

int env_threads() {
    const char* v = std::getenv("QBS_SIM_THREADS");
    if (!v) return 0;  // auto
    try {
        return std::max(0, std::stoi(v));
    } catch (...) {
        return 0;
    }
}

void write_sidecar(const RunConfig& cfg) {
    if (cfg.out.empty()) return;
    Json j = config_to_json(cfg);
    write_text_file(cfg.out + ".meta.json", j.dump(2) + "\n");
}

void write_output(const RunConfig& cfg, const std::string& csv, const Json& json) {
    std::string text = cfg.format == "csv" ? csv : json.dump(2) + "\n";
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(cfg.out, text);
        write_sidecar(cfg);
    }
}

void emit_shots(const RunConfig& cfg, const CatSpec& spec, const RunOptions& opt) {
    if (cfg.shots == 0 || cfg.out.empty()) return;
    std::string s = "theta,count_g_g,count_g_e,count_e_g,count_e_e\n";
    for (int i = 0; i < cfg.theta_steps; ++i) {
        double theta = 2.0 * kPi * i / cfg.theta_steps;
        RunPoint pt = delayed_choice_run(spec, theta, opt);
        ShotSample sh = sample_shots(pt, cfg.shots, cfg.seed + std::uint64_t(i));
        s += format_g9(theta);
        for (int a = 0; a < 2; ++a)
            for (int t = 0; t < 2; ++t) s += "," + std::to_string(sh.counts[a][t]);
        s += '\n';
    }
    write_text_file(cfg.out + ".shots.csv", s);
}

int run_fringe(const RunConfig& cfg) {
    CatSpec spec = cfg.cat_spec();
    RunOptions opt = cfg.run_options();
    ExperimentRecord rec = fringe_scan(spec, cfg.theta_steps, opt);
    write_output(cfg, record_to_csv(rec), record_to_json(rec));
    emit_shots(cfg, spec, opt);
    return 0;
}

int run_wigner(const RunConfig& cfg) {
    CatSpec spec = cfg.cat_spec();
    RunOptions opt = cfg.run_options();
    WignerCondition cond = cfg.condition == "none"     ? WignerCondition::none
                           : cfg.condition == "test_g" ? WignerCondition::test_g
                                                       : WignerCondition::test_e;
    WignerGrid g = conditioned_wigner(spec, cfg.theta, cond, opt, cfg.grid_bounds,
                                      cfg.grid_res, env_threads());
    WignerMinimum mn = wigner_min(g);
    Json j = grid_to_json(g);
    j["min_w"] = round_g9(mn.w_star);
    j["min_w_chi"] = Json::array(
        {round_g9(mn.chi_star.chi.real()), round_g9(mn.chi_star.chi.imag())});
    write_output(cfg, grid_to_csv(g), j);
    return 0;
}

int run_decay(const RunConfig& cfg) {
    CatSpec spec = cfg.cat_spec();
    RunOptions opt = cfg.run_options();
    std::vector<DelaySpec> ds;
    for (double t : cfg.delays) ds.push_back(DelaySpec{t});
    require(!ds.empty(), ErrorCode::validation, "decay needs --delays");
    auto pts = quantum_to_classical_scan(spec, ds, opt, cfg.theta_steps, env_threads());
    write_output(cfg, delay_scan_to_csv(pts), delay_scan_to_json(pts));
    return 0;
}

int run_prep(const RunConfig& cfg) {
    CatSpec spec = cfg.cat_spec();
    RunOptions opt = cfg.run_options();
    SpaceLayout layout = SpaceLayout::full(auto_cutoff(cfg.alpha, cfg.cutoff));
    PulseProgram prog = synthesis_program(spec, opt.hardware, layout);
    PureState out = synthesize_cat(spec, opt.hardware, layout);
    double fid = fidelity(DensityOperator::from_pure(out), ideal_cat(spec, layout));

    Json j = program_to_json(prog);
    j["fidelity_to_ideal"] = round_g9(fid);
    if (cfg.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_text_file(cfg.out, j.dump(2) + "\n");
        write_sidecar(cfg);
    }
    std::cerr << "prep: " << prog.steps.size() << " steps, fidelity to ideal cat = "
              << format_g9(fid) << "\n";
    return 0;
}

int run_program_cmd(const RunConfig& cfg) {
    PulseProgram prog = parse_program(cfg.program);
    HardwareParams hw;
    std::vector<int> ground(prog.layout.qubits().size(), 0);
    CVector v0 = CVector::Zero(prog.layout.dim());
    v0[prog.layout.index(ground, 0)] = 1.0;
    ProgramResult res =
        execute_program(prog, hw, QuantumState(PureState(prog.layout, std::move(v0))));

    Json j;
    Json measured = Json::array();
    for (Qubit q : res.measured) measured.push_back(qubit_name(q));
    j["measured"] = std::move(measured);

    // Joint outcome distribution over the measured qubits, with conditional
    // excited-state probabilities for every unmeasured qubit.
    Json branches = Json::array();
    size_t nmeas = res.measured.size();
    for (size_t mask = 0; mask < (size_t(1) << nmeas); ++mask) {
        QuantumState s = res.state;
        double prob = 1.0;
        bool dead = false;
        Json outcomes;
        for (size_t k = 0; k < nmeas; ++k) {
            Outcome o = (mask >> k) & 1 ? Outcome::excited : Outcome::ground;
            auto m = measure_qubit(s, res.measured[k], o);
            outcomes[qubit_name(res.measured[k])] =
                o == Outcome::excited ? "excited" : "ground";
            prob *= m.probability;
            if (!m.state) {
                dead = true;
                break;
            }
            s = *m.state;
        }
        Json b;
        b["outcomes"] = std::move(outcomes);
        b["probability"] = round_g9(dead ? 0.0 : prob);
        Json cond;
        if (!dead) {
            for (Qubit q : state_layout(s).qubits()) {
                bool was_measured = false;
                for (Qubit mq : res.measured) was_measured |= (mq == q);
                if (!was_measured)
                    cond[qubit_name(q)] = round_g9(excited_probability(s, q));
            }
        }
        b["conditional_excited"] = std::move(cond);
        branches.push_back(std::move(b));
    }
    j["branches"] = std::move(branches);
    if (cfg.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_text_file(cfg.out, j.dump(2) + "\n");
        write_sidecar(cfg);
    }
    return 0;
}

int run_tomography(const RunConfig& cfg) {
    CatSpec spec = cfg.cat_spec();
    RunOptions opt = cfg.run_options();
    WignerCondition cond = cfg.condition == "none"     ? WignerCondition::none
                           : cfg.condition == "test_g" ? WignerCondition::test_g
                                                       : WignerCondition::test_e;
    RunOptions o = opt;
    o.readout = ReadoutModel::projective;
    RunPoint pt = delayed_choice_run(spec, cfg.theta, o);
    QuantumState sel = pt.state;
    if (cond != WignerCondition::none) {
        auto m = measure_qubit(pt.state, Qubit::test,
                               cond == WignerCondition::test_g ? Outcome::ground
                                                               : Outcome::excited);
        require(m.state.has_value(), ErrorCode::impossible_branch,
                "post-selected branch has probability below 1e-12");
        sel = *m.state;
    }
    DensityOperator rho = partial_trace(to_density(sel), Subsystem::resonator);

    PhasePoint chi{Complex(cfg.chi_re, cfg.chi_im)};
    std::vector<double> taus;
    for (double t = 0.0; t < cfg.tau_max; t += cfg.tau_step) taus.push_back(t);
    RabiSignal sig = rabi_tomography_signal(rho, chi, opt.hardware, taus);
    if (cfg.noise_sigma > 0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (double& v : sig.pe_values) v += noise(rng);
    }
    std::vector<double> pops = populations_from_rabi(sig, opt.hardware, cfg.n_max);
    double w_tomo = wigner_from_populations(pops);
    double w_direct = wigner_point(rho, chi);

    std::string csv = "tau,pe\n";
    for (size_t i = 0; i < sig.tau_axis.size(); ++i)
        csv += format_g9(sig.tau_axis[i]) + "," + format_g9(sig.pe_values[i]) + "\n";

    Json j;
    j["chi"] = Json::array({round_g9(cfg.chi_re), round_g9(cfg.chi_im)});
    j["w_tomography"] = round_g9(w_tomo);
    j["w_direct"] = round_g9(w_direct);
    Json parr = Json::array();
    for (double p : pops) parr.push_back(round_g9(p));
    j["populations"] = std::move(parr);
    write_output(cfg, csv, j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-beam-splitter delayed-choice simulator"};
    app.require_subcommand(1);

    qbs::RunConfig cfg;
    std::string config_path;
    std::string delays_arg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "load parameters from a metadata sidecar JSON");
        sub->add_option("--alpha", cfg.alpha, "coherent amplitude alpha");
        sub->add_option("--phi", cfg.phi, "cat mixing angle (radians)");
        sub->add_option("--theta", cfg.theta, "Ramsey phase (radians)");
        sub->add_option("--theta-steps", cfg.theta_steps, "points on the theta grid");
        sub->add_option("--cutoff", cfg.cutoff, "Fock cutoff (0 = auto)");
        sub->add_option("--synthesis-cutoff", cfg.synthesis_cutoff,
                        "pre-displacement synthesis cutoff");
        sub->add_flag("--decoherence", cfg.decoherence,
                      "apply resonator decay during the delay");
        sub->add_option("--delay-ns", cfg.delay_ns, "idle delay before R1 (ns)");
        sub->add_option("--gamma-res", cfg.gamma_res, "resonator decay rate (1/ns)");
        sub->add_option("--prep", cfg.prep, "ideal|synthesized|file");
        sub->add_option("--readout", cfg.readout, "coupled|projective");
        sub->add_option("--condition", cfg.condition, "none|test_g|test_e");
        sub->add_option("--initial-state", cfg.initial_state,
                        "density-matrix JSON for --prep file");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--shots", cfg.shots, "finite-statistics shots per point");
        sub->add_option("--out", cfg.out, "output path (stdout when empty)");
        sub->add_option("--format", cfg.format, "csv|json");
        sub->add_option("--re-min", cfg.grid_bounds.re_min, "grid bound");
        sub->add_option("--re-max", cfg.grid_bounds.re_max, "grid bound");
        sub->add_option("--im-min", cfg.grid_bounds.im_min, "grid bound");
        sub->add_option("--im-max", cfg.grid_bounds.im_max, "grid bound");
        sub->add_option("--re-samples", cfg.grid_res.re_samples, "grid samples");
        sub->add_option("--im-samples", cfg.grid_res.im_samples, "grid samples");
        sub->add_option("--chi-re", cfg.chi_re, "tomography point, real part");
        sub->add_option("--chi-im", cfg.chi_im, "tomography point, imaginary part");
        sub->add_option("--n-max", cfg.n_max, "tomography inversion levels");
        sub->add_option("--tau-max", cfg.tau_max, "Rabi trace length (ns)");
        sub->add_option("--tau-step", cfg.tau_step, "Rabi trace step (ns)");
        sub->add_option("--noise-sigma", cfg.noise_sigma, "additive signal noise");
    };

    CLI::App* fringe = app.add_subcommand("fringe", "Ramsey fringe scan (Fig. 2a row)");
    CLI::App* conditional =
        app.add_subcommand("conditional", "conditional fringes (Fig. 2b)");
    CLI::App* wigner =
        app.add_subcommand("wigner", "conditioned Wigner grid (Fig. 3 / S3)");
    CLI::App* decay =
        app.add_subcommand("decay", "quantum-to-classical delay scan (Fig. S4)");
    CLI::App* prep = app.add_subcommand("prep", "emit/verify a synthesis pulse program");
    CLI::App* runp = app.add_subcommand("run", "execute a pulse-program JSON file");
    CLI::App* tomo =
        app.add_subcommand("tomography", "simulated ancilla-Rabi W(chi) at one point");
    for (CLI::App* sub : {fringe, conditional, wigner, decay, prep, runp, tomo})
        add_common(sub);
    decay->add_option("--delays", delays_arg, "comma-separated delays in ns");
    runp->add_option("program", cfg.program, "pulse-program JSON path");

    try {
        app.parse(argc, argv);
        CLI::App* sub = app.get_subcommands().front();

        if (!config_path.empty()) {
            qbs::RunConfig loaded =
                qbs::config_from_json(qbs::read_json_file(config_path));
            // --config replaces all parameters; --out may still override
            std::string keep_out = cfg.out;
            bool out_given = sub->count("--out") > 0;
            loaded.subcommand = cfg.subcommand;
            std::swap(cfg, loaded);
            if (out_given) cfg.out = keep_out;
        }
        cfg.subcommand = sub->get_name();
        if (!delays_arg.empty()) {
            cfg.delays.clear();
            std::stringstream ss(delays_arg);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) cfg.delays.push_back(std::stod(tok));
        }
        cfg.validate();

        if (cfg.subcommand == "fringe" || cfg.subcommand == "conditional")
            return run_fringe(cfg);
        if (cfg.subcommand == "wigner") return run_wigner(cfg);
        if (cfg.subcommand == "decay") return run_decay(cfg);
        if (cfg.subcommand == "prep") return run_prep(cfg);
        if (cfg.subcommand == "run") return run_program_cmd(cfg);
        if (cfg.subcommand == "tomography") return run_tomography(cfg);
        throw qbs::Error(qbs::ErrorCode::validation,
                         "unknown subcommand '" + cfg.subcommand + "'");
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const qbs::Error& e) {
        std::cerr << "qbs-sim: error [" << e.code_name() << "] " << e.what() << "\n";
        return e.code() == qbs::ErrorCode::numeric ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "qbs-sim: error [internal] " << e.what() << "\n";
        return 1;
    }
}
