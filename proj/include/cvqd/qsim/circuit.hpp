#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "state.hpp"

namespace cvqd::qsim {

enum class GateKind { H, T, Tdg, S, Sdg, X, Y, Z, CNOT, Unitary1, Unitary2 };

struct Gate {
    GateKind kind;
    std::vector<int> targets;
    Matrix matrix; // only for Unitary1 / Unitary2

    static Gate h(int q) { return {GateKind::H, {q}, {}}; }
    static Gate t(int q) { return {GateKind::T, {q}, {}}; }
    static Gate tdg(int q) { return {GateKind::Tdg, {q}, {}}; }
    static Gate s(int q) { return {GateKind::S, {q}, {}}; }
    static Gate sdg(int q) { return {GateKind::Sdg, {q}, {}}; }
    static Gate x(int q) { return {GateKind::X, {q}, {}}; }
    static Gate y(int q) { return {GateKind::Y, {q}, {}}; }
    static Gate z(int q) { return {GateKind::Z, {q}, {}}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, {}}; }
    static Gate unitary(Matrix m, int q) { return {GateKind::Unitary1, {q}, std::move(m)}; }
    static Gate unitary(Matrix m, int q0, int q1) { return {GateKind::Unitary2, {q0, q1}, std::move(m)}; }

    Matrix unitary_matrix() const {
        switch (kind) {
        case GateKind::H: return gates::H();
        case GateKind::T: return gates::T();
        case GateKind::Tdg: return gates::Tdg();
        case GateKind::S: return gates::S();
        case GateKind::Sdg: return gates::Sdg();
        case GateKind::X: return gates::X();
        case GateKind::Y: return gates::Y();
        case GateKind::Z: return gates::Z();
        case GateKind::CNOT: return gates::CNOT();
        case GateKind::Unitary1:
        case GateKind::Unitary2: return matrix;
        }
        throw std::logic_error("unknown gate kind");
    }

    std::size_t arity() const { return targets.size(); }
};

using Layer = std::vector<Gate>;

inline void validate_layer(const Layer& layer, int num_qubits) {
    std::set<int> used;
    for (const auto& g : layer) {
        std::size_t want = (g.kind == GateKind::CNOT || g.kind == GateKind::Unitary2) ? 2 : 1;
        if (g.targets.size() != want) throw std::invalid_argument("gate arity mismatch");
        if ((g.kind == GateKind::Unitary1 && (g.matrix.rows() != 2 || g.matrix.cols() != 2)) ||
            (g.kind == GateKind::Unitary2 && (g.matrix.rows() != 4 || g.matrix.cols() != 4)))
            throw std::invalid_argument("unitary gate matrix has the wrong shape");
        for (int q : g.targets) {
            check_qubit(q, num_qubits);
            if (!used.insert(q).second)
                throw std::invalid_argument("overlapping targets in one layer on qubit " + std::to_string(q));
        }
    }
}

template <class State>
void apply_gate(State& state, const Gate& g) {
    Matrix m = g.unitary_matrix();
    if (g.targets.size() == 1) state.apply_1q(m, g.targets[0]);
    else state.apply_2q(m, g.targets[0], g.targets[1]);
}

template <class State>
State& apply_layer(State& state, const Layer& layer) {
    validate_layer(layer, state.num_qubits());
    for (const auto& g : layer) apply_gate(state, g);
    return state;
}

class LayeredCircuit {
public:
    explicit LayeredCircuit(int num_qubits) : n_(num_qubits) {}

    int num_qubits() const { return n_; }
    int depth() const { return static_cast<int>(layers_.size()); }
    const std::vector<Layer>& layers() const { return layers_; }

    LayeredCircuit& add_layer(Layer layer) {
        validate_layer(layer, n_);
        layers_.push_back(std::move(layer));
        return *this;
    }

    template <class State>
    State& run(State& state) const {
        if (state.num_qubits() != n_) throw std::invalid_argument("circuit width does not match state");
        for (const auto& l : layers_) apply_layer(state, l);
        return state;
    }

private:
    int n_;
    std::vector<Layer> layers_;
};

} // namespace cvqd::qsim
