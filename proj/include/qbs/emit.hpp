#pragma once

#include <cstdio>

#include "qbs/serialize.hpp"

namespace qbs {

// All tabular output is printed with 9 significant digits, fixed column
// order and LF line endings, so equal runs produce byte-identical files.
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Round-trip a double through its 9-significant-digit decimal form, so JSON
// mirrors carry exactly the same values as the CSVs.
inline double round_g9(double v) { return std::strtod(format_g9(v).c_str(), nullptr); }

inline std::string record_to_csv(const ExperimentRecord& rec) {
    std::string s = "theta,pe,pe_e,pe_g,p_branch_e,p_branch_g\n";
    for (size_t i = 0; i < rec.theta_axis.size(); ++i) {
        s += format_g9(rec.theta_axis[i]);
        s += ',';
        s += format_g9(rec.pe[i]);
        s += ',';
        s += format_g9(rec.pe_given_ancilla_e[i]);
        s += ',';
        s += format_g9(rec.pe_given_ancilla_g[i]);
        s += ',';
        s += format_g9(rec.p_branch_e[i]);
        s += ',';
        s += format_g9(rec.p_branch_g[i]);
        s += '\n';
    }
    return s;
}

inline Json record_to_json(const ExperimentRecord& rec) {
    Json j;
    Json rows = Json::array();
    for (size_t i = 0; i < rec.theta_axis.size(); ++i) {
        Json r;
        r["theta"] = round_g9(rec.theta_axis[i]);
        r["pe"] = round_g9(rec.pe[i]);
        r["pe_e"] = round_g9(rec.pe_given_ancilla_e[i]);
        r["pe_g"] = round_g9(rec.pe_given_ancilla_g[i]);
        r["p_branch_e"] = round_g9(rec.p_branch_e[i]);
        r["p_branch_g"] = round_g9(rec.p_branch_g[i]);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["contrast_wave"] = round_g9(rec.contrast_wave);
    j["contrast_particle"] = round_g9(rec.contrast_particle);
    j["contrast_pe"] = round_g9(rec.contrast_pe);
    j["norm_nt"] = round_g9(rec.norm_nt);
    return j;
}

inline std::string grid_to_csv(const WignerGrid& g) {
    std::string s = "re,im,w\n";
    for (size_t i = 0; i < g.re_axis.size(); ++i)
        for (size_t j = 0; j < g.im_axis.size(); ++j) {
            s += format_g9(g.re_axis[i]);
            s += ',';
            s += format_g9(g.im_axis[j]);
            s += ',';
            s += format_g9(g.values(long(i), long(j)));
            s += '\n';
        }
    return s;
}

inline Json grid_to_json(const WignerGrid& g) {
    Json j;
    Json re = Json::array(), im = Json::array(), rows = Json::array();
    for (double v : g.re_axis) re.push_back(round_g9(v));
    for (double v : g.im_axis) im.push_back(round_g9(v));
    for (long i = 0; i < g.values.rows(); ++i) {
        Json row = Json::array();
        for (long k = 0; k < g.values.cols(); ++k) row.push_back(round_g9(g.values(i, k)));
        rows.push_back(std::move(row));
    }
    j["re_axis"] = std::move(re);
    j["im_axis"] = std::move(im);
    j["w"] = std::move(rows);
    return j;
}

inline std::string delay_scan_to_csv(const std::vector<DelayScanPoint>& pts) {
    std::string s =
        "delay_ns,gamma_t,contrast_pe,contrast_wave,contrast_particle,min_w,"
        "min_w_re,min_w_im,coherence_ratio\n";
    for (const auto& p : pts) {
        s += format_g9(p.T);
        s += ',';
        s += format_g9(p.gamma_t);
        s += ',';
        s += format_g9(p.contrast_pe);
        s += ',';
        s += format_g9(p.contrast_wave);
        s += ',';
        s += format_g9(p.contrast_particle);
        s += ',';
        s += format_g9(p.min_w);
        s += ',';
        s += format_g9(p.min_w_chi.real());
        s += ',';
        s += format_g9(p.min_w_chi.imag());
        s += ',';
        s += format_g9(p.coherence_ratio);
        s += '\n';
    }
    return s;
}

inline Json delay_scan_to_json(const std::vector<DelayScanPoint>& pts) {
    Json rows = Json::array();
    for (const auto& p : pts) {
        Json r;
        r["delay_ns"] = round_g9(p.T);
        r["gamma_t"] = round_g9(p.gamma_t);
        r["contrast_pe"] = round_g9(p.contrast_pe);
        r["contrast_wave"] = round_g9(p.contrast_wave);
        r["contrast_particle"] = round_g9(p.contrast_particle);
        r["min_w"] = round_g9(p.min_w);
        r["min_w_chi"] = Json::array({round_g9(p.min_w_chi.real()),
                                      round_g9(p.min_w_chi.imag())});
        r["coherence_ratio"] = round_g9(p.coherence_ratio);
        rows.push_back(std::move(r));
    }
    Json j;
    j["rows"] = std::move(rows);
    return j;
}

}  // namespace qbs
