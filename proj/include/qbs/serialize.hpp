#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qbs/experiments.hpp"

namespace qbs {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Layouts and states.
//
// Layout descriptor:   {"n_cutoff": 20, "qubits": ["ancilla","test"]}
//                      (n_cutoff null when the layout has no resonator factor)
// Complex numbers:     [re, im]
// Pure state file:     {"kind":"pure",    "layout":…, "amplitudes":[[re,im],…]}
// Density file:        {"kind":"density", "layout":…, "matrix":[[re,im],…]}
//                      matrix entries in row-major order, optional "metadata".
// ---------------------------------------------------------------------------

inline Json layout_to_json(const SpaceLayout& L) {
    Json j;
    j["n_cutoff"] = L.has_resonator() ? Json(L.n_cutoff()) : Json(nullptr);
    Json qs = Json::array();
    for (Qubit q : L.qubits()) qs.push_back(qubit_name(q));
    j["qubits"] = qs;
    return j;
}

inline SpaceLayout layout_from_json(const Json& j) {
    require(j.is_object() && j.contains("qubits") && j.contains("n_cutoff"),
            ErrorCode::validation, "layout descriptor needs 'n_cutoff' and 'qubits'");
    std::vector<Qubit> qs;
    for (const auto& q : j.at("qubits"))
        qs.push_back(qubit_from_name(q.get<std::string>()));
    if (j.at("n_cutoff").is_null()) {
        require(qs.size() == 1, ErrorCode::validation,
                "a layout without a resonator must hold exactly one qubit");
        return SpaceLayout::qubit_only(qs[0]);
    }
    return SpaceLayout::of(std::move(qs), j.at("n_cutoff").get<int>());
}

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
            ErrorCode::validation, "complex values are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json density_to_json(const DensityOperator& rho, Json metadata = Json::object()) {
    Json j;
    j["kind"] = "density";
    j["layout"] = layout_to_json(rho.layout());
    Json m = Json::array();
    for (int r = 0; r < rho.dim(); ++r)
        for (int c = 0; c < rho.dim(); ++c) m.push_back(complex_to_json(rho.matrix()(r, c)));
    j["matrix"] = std::move(m);
    if (!metadata.empty()) j["metadata"] = std::move(metadata);
    return j;
}

inline DensityOperator density_from_json(const Json& j) {
    require(j.is_object() && j.value("kind", "") == "density", ErrorCode::validation,
            "expected a density-operator file (kind = 'density')");
    SpaceLayout L = layout_from_json(j.at("layout"));
    require(j.contains("matrix") && j.at("matrix").is_array(), ErrorCode::validation,
            "density file needs a 'matrix' array");
    const Json& m = j.at("matrix");
    int d = L.dim();
    require(static_cast<int>(m.size()) == d * d, ErrorCode::validation,
            "matrix has " + std::to_string(m.size()) + " entries, expected " +
                std::to_string(d * d));
    CMatrix mat(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) mat(r, c) = complex_from_json(m[size_t(r) * d + c]);
    // constructor re-checks Hermiticity / trace / positivity, but report the
    // trace violation in file terms first (the spec's 1e-6 acceptance gate)
    require(std::abs(mat.trace().real() - 1.0) < 1e-6 && std::abs(mat.trace().imag()) < 1e-6,
            ErrorCode::validation,
            "density file rejected: trace = " + std::to_string(mat.trace().real()));
    return DensityOperator(std::move(L), std::move(mat));
}

inline Json pure_to_json(const PureState& psi) {
    Json j;
    j["kind"] = "pure";
    j["layout"] = layout_to_json(psi.layout());
    Json a = Json::array();
    for (int i = 0; i < psi.dim(); ++i) a.push_back(complex_to_json(psi.amplitudes()[i]));
    j["amplitudes"] = std::move(a);
    return j;
}

// ---------------------------------------------------------------------------
// Pulse programs: {"layout":…, "steps":[{"kind":"drive","qubit":"ancilla",
// "angle":…, "phase":…} | {"kind":"swap","qubit":…, "duration":…} |
// {"kind":"displace","amplitude":[re,im]} | {"kind":"delay","duration":…} |
// {"kind":"measure","qubit":…}]}
// ---------------------------------------------------------------------------

inline Json program_to_json(const PulseProgram& prog) {
    Json j;
    j["layout"] = layout_to_json(prog.layout);
    Json steps = Json::array();
    for (const Step& s : prog.steps) {
        Json st;
        st["kind"] = step_kind_name(s.kind);
        switch (s.kind) {
            case Step::Kind::drive:
                st["qubit"] = qubit_name(s.qubit);
                st["angle"] = s.angle;
                st["phase"] = s.phase;
                break;
            case Step::Kind::swap:
                st["qubit"] = qubit_name(s.qubit);
                st["duration"] = s.duration;
                break;
            case Step::Kind::displace:
                st["amplitude"] = complex_to_json(s.amplitude);
                break;
            case Step::Kind::delay:
                st["duration"] = s.duration;
                break;
            case Step::Kind::measure:
                st["qubit"] = qubit_name(s.qubit);
                break;
        }
        steps.push_back(std::move(st));
    }
    j["steps"] = std::move(steps);
    return j;
}

inline PulseProgram program_from_json(const Json& j) {
    require(j.is_object() && j.contains("layout") && j.contains("steps"),
            ErrorCode::validation, "program needs 'layout' and 'steps'");
    PulseProgram prog;
    prog.layout = layout_from_json(j.at("layout"));
    const Json& steps = j.at("steps");
    require(steps.is_array(), ErrorCode::validation, "'steps' must be an array");
    for (size_t i = 0; i < steps.size(); ++i) {
        const Json& st = steps[i];
        auto fail = [&](const std::string& msg) -> Error {
            return Error(ErrorCode::validation, "step " + std::to_string(i) + ": " + msg);
        };
        if (!st.is_object() || !st.contains("kind")) throw fail("missing 'kind'");
        std::string kind = st.at("kind").get<std::string>();
        auto need = [&](const char* field) -> const Json& {
            if (!st.contains(field)) throw fail(std::string("missing '") + field + "'");
            return st.at(field);
        };
        try {
            if (kind == "drive") {
                prog.steps.push_back(Step::drive(
                    qubit_from_name(need("qubit").get<std::string>()),
                    need("angle").get<double>(), need("phase").get<double>()));
            } else if (kind == "swap") {
                prog.steps.push_back(
                    Step::swap(qubit_from_name(need("qubit").get<std::string>()),
                               need("duration").get<double>()));
            } else if (kind == "displace") {
                prog.steps.push_back(Step::displace(complex_from_json(need("amplitude"))));
            } else if (kind == "delay") {
                prog.steps.push_back(Step::delay(need("duration").get<double>()));
            } else if (kind == "measure") {
                prog.steps.push_back(
                    Step::measure(qubit_from_name(need("qubit").get<std::string>())));
            } else {
                throw fail("unknown step kind '" + kind + "'");
            }
            const Step& s = prog.steps.back();
            if ((s.kind == Step::Kind::swap || s.kind == Step::Kind::delay) &&
                s.duration < 0)
                throw fail("negative duration");
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw fail(e.what());
        }
    }
    prog.validate();
    return prog;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), ErrorCode::io, "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::validation, "malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    require(bool(out), ErrorCode::io, "cannot write '" + path + "'");
    out << text;
    require(bool(out), ErrorCode::io, "write failed for '" + path + "'");
}

inline PulseProgram parse_program(const std::string& path) {
    return program_from_json(read_json_file(path));
}

// Load an experimentally-reconstructed resonator state for imperfection-aware
// runs; validation (Hermiticity, trace within 1e-6, positivity) is strict.
inline DensityOperator load_initial_state(const std::string& path) {
    return density_from_json(read_json_file(path));
}

}  // namespace qbs
