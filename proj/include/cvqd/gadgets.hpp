#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "common.hpp"
#include "qsim.hpp"

namespace cvqd::gadgets {

using qsim::Matrix;

enum class RoundType { Computation, XTest, ZTest };
enum class Parity { Even, Odd };

inline std::string to_string(RoundType r) {
    switch (r) {
    case RoundType::Computation: return "computation";
    case RoundType::XTest: return "xtest";
    case RoundType::ZTest: return "ztest";
    }
    return "?";
}

inline std::string to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

// Pad X^a Z^b on one wire.
struct PadKeys {
    int a = 0;
    int b = 0;
    bool operator==(const PadKeys&) const = default;
};

// The phase gate P of the gadget; the prover's correction is P^z.
inline Matrix phase_gate() { return qsim::gates::Sdg(); }

// Even iff the plaintext on the wire is currently a computational-basis state.
inline Parity parity_for(RoundType round, int raw_h_count) {
    const bool even_h = raw_h_count % 2 == 0;
    if (round == RoundType::ZTest) return even_h ? Parity::Odd : Parity::Even;
    return even_h ? Parity::Even : Parity::Odd;
}

inline Matrix choose_W(RoundType round, Parity parity, int a, int c, int z) {
    using namespace qsim::gates;
    if (round == RoundType::Computation) return H() * power(phase_gate().adjoint(), (a ^ c ^ z) & 1) * T();
    if (parity == Parity::Even) return I();
    return H() * power(phase_gate(), z & 1);
}

inline PadKeys update_t(RoundType round, Parity parity, PadKeys k, int z, int c, int e) {
    if (round == RoundType::Computation) {
        const int a = (k.a + c) & 1;
        return {a, (k.b + e + a + a * z) & 1};
    }
    if (parity == Parity::Even) return {e & 1, 0};
    return {0, (k.b + e + z) & 1};
}

inline PadKeys update_h(PadKeys k) { return {k.b, k.a}; }

inline std::pair<PadKeys, PadKeys> update_cnot(PadKeys control, PadKeys target) {
    return {{control.a, (control.b + target.b) & 1}, {(control.a + target.a) & 1, target.b}};
}

// HTTHTTHTTH, equal to e^{i pi/4} H.
inline std::vector<qsim::GateKind> compile_H() {
    using K = qsim::GateKind;
    return {K::H, K::T, K::T, K::H, K::T, K::T, K::H, K::T, K::T, K::H};
}

struct GadgetRecord {
    int gadget = 0;
    int wire = 0;
    RoundType round = RoundType::Computation;
    Parity parity = Parity::Even;
    int z = 0, c = 0, e = 0;
    PadKeys keys_after;

    nlohmann::json to_json() const {
        nlohmann::json j = {{"gadget", gadget}, {"round", to_string(round)}, {"z", z}, {"c", c}, {"e", e},
                            {"keys_after", {keys_after.a, keys_after.b}}};
        j["parity"] = round == RoundType::Computation ? nlohmann::json(nullptr) : nlohmann::json(to_string(parity));
        return j;
    }
};

class KeyLedger {
public:
    explicit KeyLedger(std::vector<PadKeys> initial) : keys_(std::move(initial)), raw_h_(keys_.size(), 0) {}

    int wires() const { return static_cast<int>(keys_.size()); }
    const PadKeys& keys(int w) const { return keys_.at(static_cast<std::size_t>(w)); }
    const std::vector<PadKeys>& all_keys() const { return keys_; }
    int raw_h(int w) const { return raw_h_.at(static_cast<std::size_t>(w)); }
    Parity parity(int w, RoundType round) const { return parity_for(round, raw_h(w)); }
    const std::vector<GadgetRecord>& history() const { return history_; }

    void apply_h(int w) {
        auto& k = keys_.at(static_cast<std::size_t>(w));
        k = update_h(k);
        raw_h_[static_cast<std::size_t>(w)]++;
    }

    void apply_cnot(int control, int target) {
        if (control == target) throw std::invalid_argument("CNOT on a single wire");
        auto [c, t] = update_cnot(keys(control), keys(target));
        keys_.at(static_cast<std::size_t>(control)) = c;
        keys_.at(static_cast<std::size_t>(target)) = t;
    }

    const GadgetRecord& apply_t(int w, RoundType round, int z, int c, int e) {
        const Parity p = parity(w, round);
        auto& k = keys_.at(static_cast<std::size_t>(w));
        k = update_t(round, p, k, z, c, e);
        history_.push_back({static_cast<int>(history_.size()), w, round, p, z, c, e, k});
        return history_.back();
    }

private:
    std::vector<PadKeys> keys_;
    std::vector<int> raw_h_;
    std::vector<GadgetRecord> history_;
};

// EPR ancilla of one gadget: first receives the data, second is measured with W.
struct GadgetPair {
    int first = 0;
    int second = 0;
    bool consumed = false;
};

template <class State>
void prepare_pair(State& s, const GadgetPair& pair) {
    s.apply_1q(qsim::gates::H(), pair.first);
    s.apply_2q(qsim::gates::CNOT(), pair.first, pair.second);
}

// Prover's first half: CNOT from the pair into the data qubit, then measure the data qubit.
template <class State>
int gadget_entangle(State& s, int data_qubit, GadgetPair& pair, Rng& rng) {
    if (pair.consumed) throw ProtocolError("EPR pair already consumed");
    if (data_qubit == pair.first || data_qubit == pair.second) throw std::invalid_argument("data qubit inside the pair");
    pair.consumed = true;
    s.apply_2q(qsim::gates::CNOT(), pair.first, data_qubit);
    return qsim::measure_inplace(s, {data_qubit}, rng)[0];
}

// Correction P^z on the output qubit; W then a standard-basis measurement on the partner.
template <class State>
int gadget_finish(State& s, const GadgetPair& pair, int z, const Matrix& w, Rng& rng) {
    if (z & 1) s.apply_1q(phase_gate(), pair.first);
    s.apply_1q(w, pair.second);
    return qsim::measure_inplace(s, {pair.second}, rng)[0];
}

struct TGadgetOutcome {
    int c = 0;
    int e = 0;
    int output_qubit = 0;
    PadKeys keys_after;
};

// Full T gadget on a data qubit padded with keys; the verifier picks W after seeing c.
template <class State>
TGadgetOutcome run_t_gadget(State& s, int data_qubit, GadgetPair& pair, RoundType round, Parity parity, int z,
                            PadKeys keys, Rng& rng) {
    TGadgetOutcome out;
    out.c = gadget_entangle(s, data_qubit, pair, rng);
    out.e = gadget_finish(s, pair, z, choose_W(round, parity, keys.a, out.c, z), rng);
    out.output_qubit = pair.first;
    out.keys_after = update_t(round, parity, keys, z, out.c, out.e);
    return out;
}

template <class State>
void reset_qubit(State& s, int q, int outcome) {
    if (outcome) s.apply_1q(qsim::gates::X(), q);
}

enum class OpKind { T, H, CNOT };

struct CircuitOp {
    OpKind kind;
    int w0 = 0;
    int w1 = -1;
};

// Clifford+T circuit over n wires; H gates are compiled to HTTHTTHTTH before evaluation.
class GateCircuit {
public:
    explicit GateCircuit(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("circuit needs a wire");
    }

    int wires() const { return n_; }
    const std::vector<CircuitOp>& ops() const { return ops_; }

    GateCircuit& t(int w) { return push({OpKind::T, w}); }
    GateCircuit& h(int w) { return push({OpKind::H, w}); }
    GateCircuit& cnot(int c, int t) {
        if (c == t) throw std::invalid_argument("CNOT on a single wire");
        return push({OpKind::CNOT, c, t});
    }

    // Raw operations after H compilation; H entries are single raw Hadamards.
    std::vector<CircuitOp> compiled() const {
        std::vector<CircuitOp> out;
        for (const auto& op : ops_) {
            if (op.kind != OpKind::H) {
                out.push_back(op);
                continue;
            }
            for (auto g : compile_H()) out.push_back({g == qsim::GateKind::H ? OpKind::H : OpKind::T, op.w0});
        }
        return out;
    }

    int t_count() const {
        int t = 0;
        for (const auto& op : compiled()) t += op.kind == OpKind::T;
        return t;
    }

    // Ideal action with compiled H (carries e^{i pi/4} per H).
    void apply_ideal(qsim::StateVector& s, const std::vector<int>& physical) const {
        for (const auto& op : compiled()) {
            if (op.kind == OpKind::T) s.apply_1q(qsim::gates::T(), physical.at(op.w0));
            else if (op.kind == OpKind::H) s.apply_1q(qsim::gates::H(), physical.at(op.w0));
            else s.apply_2q(qsim::gates::CNOT(), physical.at(op.w0), physical.at(op.w1));
        }
    }

private:
    GateCircuit& push(CircuitOp op) {
        auto check = [&](int w) {
            if (w < 0 || w >= n_) throw std::out_of_range("wire out of range");
        };
        check(op.w0);
        if (op.kind == OpKind::CNOT) check(op.w1);
        ops_.push_back(op);
        return *this;
    }

    int n_;
    std::vector<CircuitOp> ops_;
};

// Stand-in circuit: depth layers of T on every wire followed by a CNOT ladder.
inline GateCircuit standin_circuit(int n, int layers) {
    GateCircuit c(n);
    for (int l = 0; l < layers; ++l) {
        for (int w = 0; w < n; ++w) c.t(w);
        for (int w = 0; w + 1 < n; ++w) c.cnot(w, w + 1);
    }
    return c;
}

struct SessionResult {
    RoundType round = RoundType::Computation;
    bool accepted = true;
    double accept_probability = 1.0;
    qsim::StateVector output{1}; // decrypted plaintext, wire i = qubit i
    std::vector<PadKeys> final_keys;
    std::vector<GadgetRecord> trace;
};

// One delegated-evaluation session: n data wires plus a reusable gadget pair (n + 2 qubits).
class GadgetSession {
public:
    GadgetSession(RoundType round, GateCircuit circuit) : round_(round), circuit_(std::move(circuit)) {
        if (circuit_.wires() + 2 > qsim::kDefaultDenseLimit) throw CapacityError("gadget session too wide");
    }

    RoundType round() const { return round_; }
    const GateCircuit& circuit() const { return circuit_; }
    int t_count() const { return circuit_.t_count(); }

    // Plaintext input for the round: |psi> for computation, |0^n> for X-test, |+^n> for Z-test.
    qsim::StateVector default_input() const {
        const int n = circuit_.wires();
        qsim::StateVector s(n);
        if (round_ == RoundType::ZTest)
            for (int w = 0; w < n; ++w) s.apply_1q(qsim::gates::H(), w);
        return s;
    }

    // Honest evaluation followed by the prover channel phi on the data wires.
    SessionResult run(const qsim::Kraus& phi, Rng& rng, std::optional<qsim::StateVector> input = std::nullopt,
                        std::optional<std::vector<PadKeys>> initial_keys = std::nullopt) const {
        const int n = circuit_.wires();
        qsim::StateVector plain = input ? *input : default_input();
        if (plain.num_qubits() != n) throw std::invalid_argument("input does not match the circuit width");
        if (round_ != RoundType::Computation && input) throw std::invalid_argument("test rounds fix their input");

        std::vector<PadKeys> keys;
        if (initial_keys) {
            if (static_cast<int>(initial_keys->size()) != n) throw std::invalid_argument("key count mismatch");
            keys = *initial_keys;
        } else {
            for (int w = 0; w < n; ++w) keys.push_back({coin(rng), coin(rng)});
        }
        KeyLedger ledger(keys);

        std::vector<int> phys(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) phys[static_cast<std::size_t>(w)] = w;
        auto s = qsim::place_state(plain, n + 2, phys);
        for (int w = 0; w < n; ++w) {
            if (keys[static_cast<std::size_t>(w)].b) s.apply_1q(qsim::gates::Z(), w);
            if (keys[static_cast<std::size_t>(w)].a) s.apply_1q(qsim::gates::X(), w);
        }
        int free0 = n, free1 = n + 1;

        for (const auto& op : circuit_.compiled()) {
            if (op.kind == OpKind::H) {
                s.apply_1q(qsim::gates::H(), phys[static_cast<std::size_t>(op.w0)]);
                ledger.apply_h(op.w0);
            } else if (op.kind == OpKind::CNOT) {
                s.apply_2q(qsim::gates::CNOT(), phys[static_cast<std::size_t>(op.w0)],
                           phys[static_cast<std::size_t>(op.w1)]);
                ledger.apply_cnot(op.w0, op.w1);
            } else {
                const int data = phys[static_cast<std::size_t>(op.w0)];
                GadgetPair pair{free0, free1};
                prepare_pair(s, pair);
                const int z = coin(rng);
                const Parity parity = ledger.parity(op.w0, round_);
                auto out = run_t_gadget(s, data, pair, round_, parity, z, ledger.keys(op.w0), rng);
                ledger.apply_t(op.w0, round_, z, out.c, out.e);
                reset_qubit(s, data, out.c);
                reset_qubit(s, pair.second, out.e);
                phys[static_cast<std::size_t>(op.w0)] = out.output_qubit;
                free0 = data;
                free1 = pair.second;
            }
        }

        qsim::apply_kraus_sampled(s, phi, phys, rng);
        for (int w = 0; w < n; ++w) {
            const auto& k = ledger.keys(w);
            if (k.a) s.apply_1q(qsim::gates::X(), phys[static_cast<std::size_t>(w)]);
            if (k.b) s.apply_1q(qsim::gates::Z(), phys[static_cast<std::size_t>(w)]);
        }

        SessionResult r;
        r.round = round_;
        r.output = qsim::subsystem_state(s, phys);
        r.final_keys = ledger.all_keys();
        r.trace = ledger.history();
        if (round_ != RoundType::Computation) {
            auto check = r.output;
            if (round_ == RoundType::ZTest)
                for (int w = 0; w < n; ++w) check.apply_1q(qsim::gates::H(), w);
            r.accept_probability = std::norm(check.amplitudes()[0]);
            r.accepted = uniform01(rng) < r.accept_probability;
        }
        return r;
    }

private:
    RoundType round_;
    GateCircuit circuit_;
};

inline SessionResult run_session(const GadgetSession& session, const qsim::Kraus& phi, Rng& rng) {
    return session.run(phi, rng);
}

} // namespace cvqd::gadgets
