#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "../common.hpp"
#include "matrix.hpp"

namespace cvqd::qsim {

inline constexpr int kDefaultDenseLimit = 22;
inline constexpr std::size_t kDefaultSparseCap = std::size_t{1} << 20;
inline constexpr double kPruneEps = 1e-14;

inline void check_qubit(int q, int n) {
    if (q < 0 || q >= n) throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
}

class StateVector {
public:
    explicit StateVector(int num_qubits, int dense_limit = kDefaultDenseLimit) : n_(num_qubits) {
        if (num_qubits < 0) throw std::invalid_argument("negative qubit count");
        if (num_qubits > dense_limit)
            throw CapacityError("dense state of " + std::to_string(num_qubits) + " qubits exceeds limit " +
                                std::to_string(dense_limit));
        amps_.assign(std::size_t{1} << num_qubits, cplx{});
        amps_[0] = 1.0;
    }

    static StateVector basis(int num_qubits, u64 index) {
        StateVector s(num_qubits);
        s.amps_[0] = 0.0;
        s.amps_.at(index) = 1.0;
        return s;
    }

    static StateVector from_amplitudes(std::vector<cplx> amps) {
        std::size_t dim = amps.size();
        if (dim == 0 || (dim & (dim - 1)) != 0) throw std::invalid_argument("amplitude count must be a power of two");
        StateVector s(std::countr_zero(dim));
        s.amps_ = std::move(amps);
        return s;
    }

    int num_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    std::vector<cplx>& amplitudes() { return amps_; }
    cplx amp(u64 i) const { return amps_.at(i); }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    void normalize() {
        double nrm = norm();
        if (nrm == 0.0) throw std::runtime_error("cannot normalize zero state");
        for (auto& a : amps_) a /= nrm;
    }

    void apply_1q(const Matrix& m, int q) {
        check_qubit(q, n_);
        const u64 bit = u64{1} << q;
        for (u64 i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            cplx a0 = amps_[i], a1 = amps_[i | bit];
            amps_[i] = m(0, 0) * a0 + m(0, 1) * a1;
            amps_[i | bit] = m(1, 0) * a0 + m(1, 1) * a1;
        }
    }

    // m acts on |q0 q1> with q0 as the high bit of the 4x4 index.
    void apply_2q(const Matrix& m, int q0, int q1) {
        check_qubit(q0, n_);
        check_qubit(q1, n_);
        if (q0 == q1) throw std::invalid_argument("two-qubit gate on a single wire");
        const u64 b0 = u64{1} << q0, b1 = u64{1} << q1;
        for (u64 i = 0; i < amps_.size(); ++i) {
            if (i & (b0 | b1)) continue;
            const u64 idx[4] = {i, i | b1, i | b0, i | b0 | b1};
            cplx in[4], out[4] = {};
            for (int k = 0; k < 4; ++k) in[k] = amps_[idx[k]];
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) out[r] += m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) * in[c];
            for (int k = 0; k < 4; ++k) amps_[idx[k]] = out[k];
        }
    }

    // X^a Z^b on the masked wires.
    void apply_pauli(u64 a, u64 b) {
        std::vector<cplx> out(amps_.size());
        for (u64 i = 0; i < amps_.size(); ++i) out[i ^ a] = parity(i & b) ? -amps_[i] : amps_[i];
        amps_ = std::move(out);
    }

    // Basis-state permutation |i> -> |perm(i)>; perm must be a bijection on the register.
    void apply_permutation(const std::function<u64(u64)>& perm) {
        std::vector<cplx> out(amps_.size());
        std::vector<char> hit(amps_.size(), 0);
        for (u64 i = 0; i < amps_.size(); ++i) {
            u64 j = perm(i);
            if (j >= amps_.size() || hit[j]) throw std::invalid_argument("map is not a permutation of the register");
            hit[j] = 1;
            out[j] = amps_[i];
        }
        amps_ = std::move(out);
    }

private:
    int n_;
    std::vector<cplx> amps_;
};

inline cplx inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("state size mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    return s;
}

inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

// Max amplitude difference after removing the relative global phase.
inline double distance_up_to_phase(const StateVector& a, const StateVector& b) {
    cplx ov = inner(b, a);
    cplx phase = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a.amplitudes()[i] - phase * b.amplitudes()[i]));
    return m;
}

inline bool equal_up_to_phase(const StateVector& a, const StateVector& b, double tol = 1e-9) {
    return a.dim() == b.dim() && distance_up_to_phase(a, b) <= tol;
}

inline nlohmann::json to_json(const StateVector& s) {
    nlohmann::json amps = nlohmann::json::array();
    for (const auto& a : s.amplitudes()) amps.push_back({a.real(), a.imag()});
    return {{"n", s.num_qubits()}, {"amps", amps}};
}

class SparseState {
public:
    using Map = std::unordered_map<u64, cplx>;

    explicit SparseState(int num_qubits, std::size_t cap = kDefaultSparseCap) : n_(num_qubits), cap_(cap) {
        if (num_qubits < 0 || num_qubits > 64) throw CapacityError("sparse state supports 0..64 qubits");
        support_[0] = 1.0;
    }

    static SparseState basis(int num_qubits, u64 index, std::size_t cap = kDefaultSparseCap) {
        SparseState s(num_qubits, cap);
        s.support_.clear();
        s.support_[index & low_mask(num_qubits)] = 1.0;
        return s;
    }

    static SparseState from_dense(const StateVector& d, std::size_t cap = kDefaultSparseCap) {
        SparseState s(d.num_qubits(), cap);
        s.support_.clear();
        for (u64 i = 0; i < d.dim(); ++i)
            if (std::abs(d.amplitudes()[i]) > kPruneEps) s.support_[i] = d.amplitudes()[i];
        s.check_cap();
        return s;
    }

    StateVector to_dense() const {
        StateVector d(n_);
        d.amplitudes()[0] = 0.0;
        for (const auto& [k, v] : support_) d.amplitudes()[k] = v;
        return d;
    }

    int num_qubits() const { return n_; }
    std::size_t cap() const { return cap_; }
    std::size_t support_size() const { return support_.size(); }
    const Map& support() const { return support_; }
    Map& support() { return support_; }

    cplx amp(u64 i) const {
        auto it = support_.find(i);
        return it == support_.end() ? cplx{} : it->second;
    }

    std::vector<u64> sorted_keys() const {
        std::vector<u64> keys;
        keys.reserve(support_.size());
        for (const auto& kv : support_) keys.push_back(kv.first);
        std::sort(keys.begin(), keys.end());
        return keys;
    }

    double norm() const {
        double s = 0.0;
        for (const auto& kv : support_) s += std::norm(kv.second);
        return std::sqrt(s);
    }

    void normalize() {
        double nrm = norm();
        if (nrm == 0.0) throw std::runtime_error("cannot normalize zero state");
        for (auto& kv : support_) kv.second /= nrm;
    }

    void apply_1q(const Matrix& m, int q) {
        check_qubit(q, n_);
        const u64 bit = u64{1} << q;
        Map out;
        out.reserve(support_.size() * 2);
        for (const auto& [k, v] : support_) {
            const std::size_t b = (k & bit) ? 1 : 0;
            out[k & ~bit] += m(0, b) * v;
            out[k | bit] += m(1, b) * v;
        }
        assign_pruned(std::move(out));
    }

    void apply_2q(const Matrix& m, int q0, int q1) {
        check_qubit(q0, n_);
        check_qubit(q1, n_);
        if (q0 == q1) throw std::invalid_argument("two-qubit gate on a single wire");
        const u64 b0 = u64{1} << q0, b1 = u64{1} << q1;
        Map out;
        out.reserve(support_.size() * 2);
        for (const auto& [k, v] : support_) {
            const std::size_t c = ((k & b0) ? 2 : 0) | ((k & b1) ? 1 : 0);
            const u64 base = k & ~(b0 | b1);
            for (std::size_t r = 0; r < 4; ++r) {
                cplx w = m(r, c);
                if (w == cplx{}) continue;
                u64 idx = base | ((r & 2) ? b0 : 0) | ((r & 1) ? b1 : 0);
                out[idx] += w * v;
            }
        }
        assign_pruned(std::move(out));
    }

    void apply_pauli(u64 a, u64 b) {
        Map out;
        out.reserve(support_.size());
        for (const auto& [k, v] : support_) out[k ^ a] = parity(k & b) ? -v : v;
        support_ = std::move(out);
    }

    // Basis map on the support; injectivity on the support is verified.
    void apply_permutation(const std::function<u64(u64)>& perm) {
        Map out;
        out.reserve(support_.size());
        for (const auto& [k, v] : support_) {
            u64 j = perm(k);
            if (n_ < 64 && (j >> n_) != 0) throw std::invalid_argument("map leaves the register");
            if (!out.emplace(j, v).second) throw std::invalid_argument("map is not injective on the support");
        }
        support_ = std::move(out);
    }

private:
    void assign_pruned(Map&& out) {
        for (auto it = out.begin(); it != out.end();) {
            if (std::abs(it->second) <= kPruneEps) it = out.erase(it);
            else ++it;
        }
        support_ = std::move(out);
        check_cap();
    }

    void check_cap() const {
        if (support_.size() > cap_)
            throw CapacityError("sparse support " + std::to_string(support_.size()) + " exceeds cap " +
                                std::to_string(cap_));
    }

    int n_;
    std::size_t cap_;
    Map support_;
};

inline nlohmann::json to_json(const SparseState& s) { return to_json(s.to_dense()); }

} // namespace cvqd::qsim
