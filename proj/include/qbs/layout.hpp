#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qbs/errors.hpp"

namespace qbs {

enum class Qubit { ancilla, test };

inline const char* qubit_name(Qubit q) {
    return q == Qubit::ancilla ? "ancilla" : "test";
}

inline Qubit qubit_from_name(const std::string& s) {
    if (s == "ancilla") return Qubit::ancilla;
    if (s == "test") return Qubit::test;
    throw Error(ErrorCode::validation, "unknown qubit label '" + s + "'");
}

// Tensor-space layout: an ordered list of qubit factors followed by one
// resonator factor truncated at Fock level n_cutoff. Basis index convention
// (asserted by tests):
//     index = (sum_k level_k * 2^(slots-1-k)) * fock_dim + photon_number
// i.e. for the full space: ((ancilla*2) + test) * (n_cutoff+1) + n.
// A layout without a resonator is represented by fock_dim() == 1.
class SpaceLayout {
public:
    SpaceLayout() = default;

    static SpaceLayout full(int n_cutoff) {
        return SpaceLayout({Qubit::ancilla, Qubit::test}, check_cutoff(n_cutoff) + 1);
    }
    static SpaceLayout resonator_only(int n_cutoff) {
        return SpaceLayout({}, check_cutoff(n_cutoff) + 1);
    }
    static SpaceLayout qubit_and_resonator(Qubit q, int n_cutoff) {
        return SpaceLayout({q}, check_cutoff(n_cutoff) + 1);
    }
    static SpaceLayout qubit_only(Qubit q) { return SpaceLayout({q}, 1); }
    static SpaceLayout of(std::vector<Qubit> qubits, int n_cutoff) {
        return SpaceLayout(std::move(qubits), check_cutoff(n_cutoff) + 1);
    }

    bool has_resonator() const { return fock_dim_ > 1; }
    int fock_dim() const { return fock_dim_; }
    int n_cutoff() const { return fock_dim_ - 1; }
    const std::vector<Qubit>& qubits() const { return qubits_; }
    int n_qubits() const { return static_cast<int>(qubits_.size()); }
    int dim() const { return (1 << qubits_.size()) * fock_dim_; }

    bool has_qubit(Qubit q) const {
        return std::find(qubits_.begin(), qubits_.end(), q) != qubits_.end();
    }
    int slot_of(Qubit q) const {
        auto it = std::find(qubits_.begin(), qubits_.end(), q);
        require(it != qubits_.end(), ErrorCode::validation,
                std::string("qubit '") + qubit_name(q) + "' not present in layout");
        return static_cast<int>(it - qubits_.begin());
    }

    // index of the basis state with the given qubit levels (one per slot,
    // each 0 or 1, slot order) and photon number.
    int index(const std::vector<int>& levels, int n) const {
        require(static_cast<int>(levels.size()) == n_qubits(), ErrorCode::validation,
                "level list does not match qubit slot count");
        require(n >= 0 && n < fock_dim_, ErrorCode::truncation,
                "photon number " + std::to_string(n) + " exceeds cutoff " +
                    std::to_string(n_cutoff()));
        int q = 0;
        for (int lv : levels) {
            require(lv == 0 || lv == 1, ErrorCode::validation, "qubit level must be 0 or 1");
            q = (q << 1) | lv;
        }
        return q * fock_dim_ + n;
    }

    // Decompose a flat basis index into (qubit levels, photon number).
    void decompose(int index, std::vector<int>& levels, int& n) const {
        n = index % fock_dim_;
        int q = index / fock_dim_;
        levels.assign(qubits_.size(), 0);
        for (int k = n_qubits() - 1; k >= 0; --k) {
            levels[static_cast<size_t>(k)] = q & 1;
            q >>= 1;
        }
    }

    bool operator==(const SpaceLayout& o) const {
        return fock_dim_ == o.fock_dim_ && qubits_ == o.qubits_;
    }
    bool operator!=(const SpaceLayout& o) const { return !(*this == o); }

    std::string describe() const {
        std::string s = "[";
        for (auto q : qubits_) {
            s += qubit_name(q);
            s += ",";
        }
        s += has_resonator() ? ("res(nc=" + std::to_string(n_cutoff()) + ")]") : "no-res]";
        return s;
    }

private:
    SpaceLayout(std::vector<Qubit> qubits, int fock_dim)
        : qubits_(std::move(qubits)), fock_dim_(fock_dim) {
        require(qubits_.size() <= 2, ErrorCode::validation, "at most two qubit slots");
        for (size_t i = 0; i + 1 < qubits_.size(); ++i)
            require(qubits_[i] != qubits_[i + 1], ErrorCode::validation,
                    "duplicate qubit label in layout");
    }
    static int check_cutoff(int n_cutoff) {
        require(n_cutoff >= 1, ErrorCode::validation, "n_cutoff must be >= 1");
        return n_cutoff;
    }

    std::vector<Qubit> qubits_;
    int fock_dim_ = 1;
};

inline void require_same_layout(const SpaceLayout& a, const SpaceLayout& b) {
    require(a == b, ErrorCode::layout_mismatch,
            "layout mismatch: " + a.describe() + " vs " + b.describe());
}

}  // namespace qbs
