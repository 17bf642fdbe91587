#pragma once

#include <stdexcept>
#include <string>

namespace qbs {

// Error taxonomy shared by the whole library. The CLI maps validation-type
// failures to exit code 1 and numeric-invariant failures to exit code 2.
enum class ErrorCode {
    validation,        // bad arguments, malformed files, schema violations
    layout_mismatch,   // operands tagged with different space layouts
    truncation,        // state not representable within the Fock cutoff
    numeric,           // trace drift, positivity loss, non-unitarity
    impossible_branch, // post-selection on a probability-~0 outcome
    io,                // filesystem failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

    // Stable token for machine-readable stderr lines.
    const char* code_name() const noexcept {
        switch (code_) {
            case ErrorCode::validation: return "validation";
            case ErrorCode::layout_mismatch: return "layout-mismatch";
            case ErrorCode::truncation: return "truncation";
            case ErrorCode::numeric: return "numeric";
            case ErrorCode::impossible_branch: return "impossible-branch";
            case ErrorCode::io: return "io";
        }
        return "unknown";
    }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw Error(code, msg);
}

}  // namespace qbs
