#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "../common.hpp"
#include "circuit.hpp"
#include "matrix.hpp"
#include "state.hpp"

namespace cvqd::qsim {

enum class Basis { Standard, Hadamard };

namespace detail {

inline u64 gather(u64 index, const std::vector<int>& qubits) {
    u64 key = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j) key |= static_cast<u64>(bit_at(index, qubits[j])) << j;
    return key;
}

inline u64 sample_key(const std::map<u64, double>& probs, Rng& rng) {
    double total = 0.0;
    for (const auto& kv : probs) total += kv.second;
    double r = uniform01(rng) * total;
    u64 last = probs.begin()->first;
    for (const auto& [k, p] : probs) {
        last = k;
        if (r < p) return k;
        r -= p;
    }
    return last;
}

} // namespace detail

// Standard-basis measurement of qubits (outcome bit j belongs to qubits[j]); collapses in place.
inline std::vector<int> measure_inplace(StateVector& s, const std::vector<int>& qubits, Rng& rng) {
    if (qubits.empty() || s.num_qubits() == 0) throw std::invalid_argument("empty measurement register");
    for (int q : qubits) check_qubit(q, s.num_qubits());
    std::map<u64, double> probs;
    for (u64 i = 0; i < s.dim(); ++i) {
        double p = std::norm(s.amplitudes()[i]);
        if (p > 0) probs[detail::gather(i, qubits)] += p;
    }
    const u64 key = detail::sample_key(probs, rng);
    for (u64 i = 0; i < s.dim(); ++i)
        if (detail::gather(i, qubits) != key) s.amplitudes()[i] = 0.0;
    s.normalize();
    std::vector<int> bits(qubits.size());
    for (std::size_t j = 0; j < qubits.size(); ++j) bits[j] = bit_at(key, static_cast<int>(j));
    return bits;
}

inline std::vector<int> measure_inplace(SparseState& s, const std::vector<int>& qubits, Rng& rng) {
    if (qubits.empty() || s.num_qubits() == 0) throw std::invalid_argument("empty measurement register");
    for (int q : qubits) check_qubit(q, s.num_qubits());
    std::map<u64, double> probs;
    for (u64 k : s.sorted_keys()) probs[detail::gather(k, qubits)] += std::norm(s.amp(k));
    const u64 key = detail::sample_key(probs, rng);
    auto& sup = s.support();
    for (auto it = sup.begin(); it != sup.end();) {
        if (detail::gather(it->first, qubits) != key) it = sup.erase(it);
        else ++it;
    }
    s.normalize();
    std::vector<int> bits(qubits.size());
    for (std::size_t j = 0; j < qubits.size(); ++j) bits[j] = bit_at(key, static_cast<int>(j));
    return bits;
}

// Measures each qubit after applying basis_change, then rotates the post-state back.
template <class State>
std::vector<int> measure_in_basis(State& s, const std::vector<int>& qubits, const Matrix& basis_change, Rng& rng) {
    for (int q : qubits) s.apply_1q(basis_change, q);
    auto bits = measure_inplace(s, qubits, rng);
    Matrix back = basis_change.adjoint();
    for (int q : qubits) s.apply_1q(back, q);
    return bits;
}

template <class State>
std::vector<int> measure_inplace(State& s, const std::vector<int>& qubits, Basis basis, Rng& rng) {
    if (basis == Basis::Standard) return measure_inplace(s, qubits, rng);
    return measure_in_basis(s, qubits, gates::H(), rng);
}

template <class State>
struct Measured {
    std::vector<int> bits;
    State state;
};

template <class State>
Measured<State> measure(State state, const std::vector<int>& qubits, Basis basis, Rng& rng) {
    auto bits = measure_inplace(state, qubits, basis, rng);
    return {std::move(bits), std::move(state)};
}

inline u64 bits_to_word(const std::vector<int>& bits) {
    u64 w = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) w |= static_cast<u64>(bits[j] & 1) << j;
    return w;
}

// m Bell pairs (|00>+|11>)/sqrt2 pairing qubit i with qubit i+m.
inline StateVector make_epr(int m, int dense_limit = kDefaultDenseLimit) {
    if (m < 0) throw std::invalid_argument("negative pair count");
    if (2 * m > dense_limit) throw CapacityError("EPR register exceeds the dense limit");
    StateVector s(2 * m, dense_limit);
    for (int i = 0; i < m; ++i) {
        s.apply_1q(gates::H(), i);
        s.apply_2q(gates::CNOT(), i, i + m);
    }
    return s;
}

struct EprPair {
    int sender;
    int receiver;
};

struct Correction {
    int a = 0; // X exponent
    int b = 0; // Z exponent
};

// Bell-measures source with the sender half; the receiver then holds X^a Z^b |psi>.
template <class State>
Correction teleport(State& s, int source, EprPair pair, Rng& rng) {
    if (source == pair.sender || source == pair.receiver || pair.sender == pair.receiver)
        throw std::invalid_argument("teleport qubit indices collide");
    s.apply_2q(gates::CNOT(), source, pair.sender);
    s.apply_1q(gates::H(), source);
    auto bits = measure_inplace(s, {source, pair.sender}, rng);
    return {bits[1], bits[0]};
}

// Pure single-qubit state of q when the rest of the register is a single basis configuration.
inline StateVector qubit_state(const StateVector& s, int q, double tol = 1e-9) {
    check_qubit(q, s.num_qubits());
    const u64 bit = u64{1} << q;
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (std::norm(s.amplitudes()[i]) > std::norm(s.amplitudes()[best])) best = i;
    const u64 rest = best & ~bit;
    std::vector<cplx> amps = {s.amplitudes()[rest], s.amplitudes()[rest | bit]};
    double kept = std::norm(amps[0]) + std::norm(amps[1]);
    if (std::abs(kept - 1.0) > tol) throw std::invalid_argument("qubit is entangled with the rest of the register");
    return StateVector::from_amplitudes(std::move(amps));
}

// m acts on the listed qubits, with qubits[j] as bit j of m's index.
inline void apply_matrix(StateVector& s, const Matrix& m, const std::vector<int>& qubits) {
    const std::size_t dim = std::size_t{1} << qubits.size();
    if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("matrix does not match the qubit list");
    u64 mask = 0;
    for (int q : qubits) {
        check_qubit(q, s.num_qubits());
        if (mask & (u64{1} << q)) throw std::invalid_argument("repeated qubit");
        mask |= u64{1} << q;
    }
    std::vector<u64> offs(dim, 0);
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t k = 0; k < qubits.size(); ++k)
            if ((j >> k) & 1u) offs[j] |= u64{1} << qubits[k];
    auto& amps = s.amplitudes();
    std::vector<cplx> in(dim), out(dim);
    for (u64 i = 0; i < s.dim(); ++i) {
        if (i & mask) continue;
        for (std::size_t j = 0; j < dim; ++j) in[j] = amps[i | offs[j]];
        for (std::size_t r = 0; r < dim; ++r) {
            cplx acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) acc += m(r, c) * in[c];
            out[r] = acc;
        }
        for (std::size_t j = 0; j < dim; ++j) amps[i | offs[j]] = out[j];
    }
}

// Pure state of the listed qubits when the others sit in one basis configuration.
inline StateVector subsystem_state(const StateVector& s, const std::vector<int>& qubits, double tol = 1e-9) {
    u64 mask = 0;
    for (int q : qubits) {
        check_qubit(q, s.num_qubits());
        mask |= u64{1} << q;
    }
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (std::norm(s.amplitudes()[i]) > std::norm(s.amplitudes()[best])) best = i;
    const u64 rest = best & ~mask;
    std::vector<cplx> amps(std::size_t{1} << qubits.size());
    double kept = 0.0;
    for (std::size_t j = 0; j < amps.size(); ++j) {
        u64 idx = rest;
        for (std::size_t k = 0; k < qubits.size(); ++k)
            if ((j >> k) & 1u) idx |= u64{1} << qubits[k];
        amps[j] = s.amplitudes()[idx];
        kept += std::norm(amps[j]);
    }
    if (std::abs(kept - 1.0) > tol) throw std::invalid_argument("subsystem is entangled with the rest of the register");
    return StateVector::from_amplitudes(std::move(amps));
}

// small placed on the listed qubits of a |0...0> register of the given size.
inline StateVector place_state(const StateVector& small, int total, const std::vector<int>& qubits) {
    if (small.dim() != (std::size_t{1} << qubits.size())) throw std::invalid_argument("qubit list does not match state");
    StateVector s(total);
    s.amplitudes()[0] = 0.0;
    for (std::size_t j = 0; j < small.dim(); ++j) {
        u64 idx = 0;
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            check_qubit(qubits[k], total);
            if ((j >> k) & 1u) idx |= u64{1} << qubits[k];
        }
        s.amplitudes()[idx] += small.amplitudes()[j];
    }
    return s;
}

} // namespace cvqd::qsim
