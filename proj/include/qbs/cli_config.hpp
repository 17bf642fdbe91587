#pragma once

#include <set>

#include "qbs/emit.hpp"

namespace qbs {

// Resolved parameters of one CLI invocation. Serialized verbatim into the
// metadata sidecar, and loadable back with --config so any output can be
// reproduced from its sidecar alone.
struct RunConfig {
    std::string subcommand;
    double alpha = 2.0;
    double phi = kPi / 4.0;
    double theta = kPi / 2.0;
    int theta_steps = 64;
    int cutoff = 0;  // 0 = auto
    int synthesis_cutoff = 4;
    bool decoherence = false;
    double delay_ns = 0.0;
    double gamma_res = 1.0 / 3000.0;
    std::string prep = "ideal";        // ideal | synthesized | file
    std::string readout = "coupled";   // coupled | projective
    std::string condition = "none";    // none | test_g | test_e
    std::string initial_state;         // density-matrix file for prep = file
    std::vector<double> delays;        // decay subcommand
    double chi_re = 0.84, chi_im = -0.03;
    int n_max = 45;
    double tau_max = 400.0, tau_step = 0.5;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    GridBounds grid_bounds;
    GridResolution grid_res;
    std::string format = "csv";  // csv | json
    std::string out;
    std::string program;  // run subcommand input

    void validate() const {
        require(alpha > 0, ErrorCode::validation, "--alpha must be positive");
        require(phi >= 0 && phi <= kPi / 2, ErrorCode::validation,
                "--phi must lie in [0, pi/2]");
        require(theta_steps >= 8, ErrorCode::validation, "--theta-steps must be >= 8");
        require(cutoff == 0 || cutoff >= 1, ErrorCode::validation, "--cutoff must be >= 1");
        require(delay_ns >= 0, ErrorCode::validation, "--delay-ns must be >= 0");
        require(gamma_res >= 0, ErrorCode::validation, "--gamma-res must be >= 0");
        require(prep == "ideal" || prep == "synthesized" || prep == "file",
                ErrorCode::validation, "--prep must be ideal|synthesized|file");
        require(readout == "coupled" || readout == "projective", ErrorCode::validation,
                "--readout must be coupled|projective");
        require(condition == "none" || condition == "test_g" || condition == "test_e",
                ErrorCode::validation, "--condition must be none|test_g|test_e");
        require(format == "csv" || format == "json", ErrorCode::validation,
                "--format must be csv|json");
        require(prep != "file" || !initial_state.empty(), ErrorCode::validation,
                "--prep file requires --initial-state");
        for (double d : delays)
            require(d >= 0, ErrorCode::validation, "--delays entries must be >= 0");
        require(tau_step > 0 && tau_max > tau_step, ErrorCode::validation,
                "bad tomography tau axis");
        require(n_max >= 1, ErrorCode::validation, "--n-max must be >= 1");
        require(noise_sigma >= 0, ErrorCode::validation, "--noise-sigma must be >= 0");
    }

    CatSpec cat_spec() const { return CatSpec{phi, alpha, synthesis_cutoff}; }

    RunOptions run_options() const {
        RunOptions o;
        o.prep = prep == "ideal" ? PrepKind::ideal
                 : prep == "synthesized" ? PrepKind::synthesized
                                         : PrepKind::file;
        o.readout = readout == "coupled" ? ReadoutModel::coupled : ReadoutModel::projective;
        o.cutoff = auto_cutoff(alpha, cutoff);
        o.decoherence = decoherence;
        o.delay = DelaySpec{delay_ns};
        o.gamma_res = gamma_res;
        if (o.prep == PrepKind::file)
            o.initial_resonator = load_initial_state(initial_state);
        return o;
    }
};

inline Json config_to_json(const RunConfig& c) {
    Json j;
    j["subcommand"] = c.subcommand;
    j["alpha"] = c.alpha;
    j["phi"] = c.phi;
    j["theta"] = c.theta;
    j["theta_steps"] = c.theta_steps;
    j["cutoff"] = c.cutoff;
    j["synthesis_cutoff"] = c.synthesis_cutoff;
    j["decoherence"] = c.decoherence;
    j["delay_ns"] = c.delay_ns;
    j["gamma_res"] = c.gamma_res;
    j["prep"] = c.prep;
    j["readout"] = c.readout;
    j["condition"] = c.condition;
    j["initial_state"] = c.initial_state;
    j["delays"] = c.delays;
    j["chi"] = Json::array({c.chi_re, c.chi_im});
    j["n_max"] = c.n_max;
    j["tau_max"] = c.tau_max;
    j["tau_step"] = c.tau_step;
    j["noise_sigma"] = c.noise_sigma;
    j["seed"] = c.seed;
    j["shots"] = c.shots;
    j["grid"] = Json{{"re_min", c.grid_bounds.re_min},
                     {"re_max", c.grid_bounds.re_max},
                     {"im_min", c.grid_bounds.im_min},
                     {"im_max", c.grid_bounds.im_max},
                     {"re_samples", c.grid_res.re_samples},
                     {"im_samples", c.grid_res.im_samples}};
    j["format"] = c.format;
    j["program"] = c.program;
    return j;
}

inline RunConfig config_from_json(const Json& j) {
    static const std::set<std::string> known = {
        "subcommand", "alpha", "phi", "theta", "theta_steps", "cutoff",
        "synthesis_cutoff", "decoherence", "delay_ns", "gamma_res", "prep",
        "readout", "condition", "initial_state", "delays", "chi", "n_max",
        "tau_max", "tau_step", "noise_sigma", "seed", "shots", "grid", "format",
        "program", "out"};
    require(j.is_object(), ErrorCode::validation, "config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        require(known.count(it.key()) > 0, ErrorCode::validation,
                "unknown config key '" + it.key() + "'");
    RunConfig c;
    c.subcommand = j.value("subcommand", c.subcommand);
    c.alpha = j.value("alpha", c.alpha);
    c.phi = j.value("phi", c.phi);
    c.theta = j.value("theta", c.theta);
    c.theta_steps = j.value("theta_steps", c.theta_steps);
    c.cutoff = j.value("cutoff", c.cutoff);
    c.synthesis_cutoff = j.value("synthesis_cutoff", c.synthesis_cutoff);
    c.decoherence = j.value("decoherence", c.decoherence);
    c.delay_ns = j.value("delay_ns", c.delay_ns);
    c.gamma_res = j.value("gamma_res", c.gamma_res);
    c.prep = j.value("prep", c.prep);
    c.readout = j.value("readout", c.readout);
    c.condition = j.value("condition", c.condition);
    c.initial_state = j.value("initial_state", c.initial_state);
    if (j.contains("delays")) c.delays = j.at("delays").get<std::vector<double>>();
    if (j.contains("chi")) {
        Complex z = complex_from_json(j.at("chi"));
        c.chi_re = z.real();
        c.chi_im = z.imag();
    }
    c.n_max = j.value("n_max", c.n_max);
    c.tau_max = j.value("tau_max", c.tau_max);
    c.tau_step = j.value("tau_step", c.tau_step);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.seed = j.value("seed", c.seed);
    c.shots = j.value("shots", c.shots);
    if (j.contains("grid")) {
        const Json& g = j.at("grid");
        static const std::set<std::string> gkeys = {"re_min", "re_max", "im_min",
                                                    "im_max", "re_samples", "im_samples"};
        for (auto it = g.begin(); it != g.end(); ++it)
            require(gkeys.count(it.key()) > 0, ErrorCode::validation,
                    "unknown grid key '" + it.key() + "'");
        c.grid_bounds.re_min = g.value("re_min", c.grid_bounds.re_min);
        c.grid_bounds.re_max = g.value("re_max", c.grid_bounds.re_max);
        c.grid_bounds.im_min = g.value("im_min", c.grid_bounds.im_min);
        c.grid_bounds.im_max = g.value("im_max", c.grid_bounds.im_max);
        c.grid_res.re_samples = g.value("re_samples", c.grid_res.re_samples);
        c.grid_res.im_samples = g.value("im_samples", c.grid_res.im_samples);
    }
    c.format = j.value("format", c.format);
    c.program = j.value("program", c.program);
    c.validate();
    return c;
}

}  // namespace qbs
