#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "common.hpp"
#include "qsim.hpp"

namespace cvqd::hybrid {

struct DepthBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemeViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SchemeKind { dCQ, dQC };

inline const char* to_string(SchemeKind k) { return k == SchemeKind::dCQ ? "dCQ" : "dQC"; }

struct Step {
    enum class Type { Classical, Quantum } type;
    std::string name;          // classical steps
    int layers = 0;            // quantum steps
    bool full_measurement = false;
};

class HybridTrace {
public:
    HybridTrace(SchemeKind kind, int budget) : kind_(kind), budget_(budget) {}

    SchemeKind kind() const { return kind_; }
    int budget() const { return budget_; }
    const std::vector<Step>& steps() const { return steps_; }

    void add_classical(std::string name) { steps_.push_back({Step::Type::Classical, std::move(name), 0, false}); }

    void add_quantum(int layers, bool full_measurement) {
        steps_.push_back({Step::Type::Quantum, {}, layers, full_measurement});
    }

    int total_layers() const {
        int s = 0;
        for (const auto& st : steps_)
            if (st.type == Step::Type::Quantum) s += st.layers;
        return s;
    }

    // Largest number of layers applied to one coherent state (between full measurements).
    int audited_depth() const {
        int best = 0, run = 0;
        for (const auto& st : steps_) {
            if (st.type != Step::Type::Quantum) continue;
            run += st.layers;
            best = std::max(best, run);
            if (st.full_measurement) run = 0;
        }
        return best;
    }

    bool valid() const {
        if (kind_ == SchemeKind::dCQ) {
            for (const auto& st : steps_)
                if (st.type == Step::Type::Quantum && (!st.full_measurement || st.layers > budget_)) return false;
            return true;
        }
        return audited_depth() <= budget_;
    }

    HybridTrace as_dqc() const {
        HybridTrace t(SchemeKind::dQC, budget_);
        t.steps_ = steps_;
        return t;
    }

    nlohmann::json to_json() const {
        nlohmann::json steps = nlohmann::json::array();
        for (const auto& st : steps_) {
            if (st.type == Step::Type::Classical) steps.push_back({{"type", "classical"}, {"name", st.name}});
            else steps.push_back({{"type", "quantum"}, {"layers", st.layers}, {"full_measurement", st.full_measurement}});
        }
        return {{"kind", to_string(kind_)}, {"budget", budget_}, {"steps", steps}};
    }

private:
    SchemeKind kind_;
    int budget_;
    std::vector<Step> steps_;
};

// Quantum register handed to a prover; every layer is charged against the budget before it runs.
// With copies > 1 the register is a product of identical registers acted on in parallel.
class QuantumSession {
public:
    QuantumSession(SchemeKind kind, int num_qubits, int budget, HybridTrace& trace,
                   std::size_t cap = qsim::kDefaultSparseCap, int copies = 1)
        : kind_(kind), budget_(budget), trace_(&trace) {
        if (copies < 1) throw std::invalid_argument("session needs at least one copy");
        states_.assign(static_cast<std::size_t>(copies), qsim::SparseState(num_qubits, cap));
    }

    int num_qubits() const { return states_.front().num_qubits(); }
    int copies() const { return static_cast<int>(states_.size()); }
    int budget() const { return budget_; }
    int layers_used() const { return coherent_layers_; }
    int remaining() const { return budget_ - coherent_layers_; }
    bool closed() const { return closed_; }
    const qsim::SparseState& state(int copy = 0) const { return states_.at(static_cast<std::size_t>(copy)); }

    void reserve(int layers) const {
        ensure_open();
        if (coherent_layers_ + layers > budget_)
            throw DepthBudgetExceeded("quantum depth " + std::to_string(coherent_layers_ + layers) +
                                      " exceeds budget " + std::to_string(budget_));
    }

    void layer(const qsim::Layer& l) {
        reserve(1);
        for (auto& s : states_) qsim::apply_layer(s, l);
        charge(1);
    }

    void run(const qsim::LayeredCircuit& c) {
        reserve(c.depth());
        for (auto& s : states_) c.run(s);
        charge(c.depth());
    }

    // One depth of arbitrary register action (oracle query, teleportation, ...).
    void layer(const std::function<void(qsim::SparseState&)>& op) {
        reserve(1);
        for (auto& s : states_) op(s);
        charge(1);
    }

    void layer_indexed(const std::function<void(qsim::SparseState&, int)>& op) {
        reserve(1);
        for (std::size_t i = 0; i < states_.size(); ++i) op(states_[i], static_cast<int>(i));
        charge(1);
    }

    std::vector<int> measure(const std::vector<int>& qubits, Rng& rng) {
        if (copies() != 1) throw std::logic_error("use measure_copies on a multi-copy session");
        return measure_copies(qubits, rng).front();
    }

    std::vector<std::vector<int>> measure_copies(const std::vector<int>& qubits, Rng& rng) {
        ensure_open();
        if (static_cast<int>(qubits.size()) == num_qubits()) return measure_all_bits(rng);
        if (kind_ == SchemeKind::dCQ) throw SchemeViolation("partial measurement inside a dCQ quantum step");
        close_segment(false);
        std::vector<std::vector<int>> out;
        for (auto& s : states_) out.push_back(qsim::measure_inplace(s, qubits, rng));
        return out;
    }

    u64 measure_all(Rng& rng) {
        if (copies() != 1) throw std::logic_error("use measure_all_copies on a multi-copy session");
        return measure_all_copies(rng).front();
    }

    std::vector<u64> measure_all_copies(Rng& rng) {
        std::vector<u64> out;
        for (const auto& bits : measure_all_bits(rng)) out.push_back(qsim::bits_to_word(bits));
        return out;
    }

    // Records layers applied since the last measurement.
    void flush() {
        if (pending_ > 0) close_segment(false);
    }

    void close() {
        flush();
        closed_ = true;
    }

    qsim::SparseState& mutable_state(int copy = 0) {
        ensure_open();
        return states_.at(static_cast<std::size_t>(copy));
    }

private:
    std::vector<std::vector<int>> measure_all_bits(Rng& rng) {
        ensure_open();
        std::vector<int> all(static_cast<std::size_t>(num_qubits()));
        for (int i = 0; i < num_qubits(); ++i) all[static_cast<std::size_t>(i)] = i;
        std::vector<std::vector<int>> out;
        for (auto& s : states_) out.push_back(qsim::measure_inplace(s, all, rng));
        close_segment(true);
        return out;
    }

    void ensure_open() const {
        if (closed_) throw SchemeViolation("quantum state used across a round boundary");
    }

    void charge(int layers) {
        coherent_layers_ += layers;
        pending_ += layers;
    }

    void close_segment(bool full) {
        if (pending_ > 0 || full) trace_->add_quantum(pending_, full);
        pending_ = 0;
        if (full) coherent_layers_ = 0;
    }

    SchemeKind kind_;
    int budget_;
    HybridTrace* trace_;
    std::vector<qsim::SparseState> states_;
    int coherent_layers_ = 0;
    int pending_ = 0;
    bool closed_ = false;
};

using Memory = std::vector<u64>;

struct DcqRound {
    std::string name;
    int num_qubits;
    std::function<void(QuantumSession&, const Memory&)> quantum;
};

template <class Output>
struct RunResult {
    Output output;
    HybridTrace trace;
};

// Alternates classical preparation with depth-bounded circuits, measuring every qubit after each.
template <class Output>
RunResult<Output> run_dcq(int budget, const std::vector<DcqRound>& rounds,
                          const std::function<Output(const Memory&)>& finish, Rng& rng,
                          std::size_t cap = qsim::kDefaultSparseCap) {
    HybridTrace trace(SchemeKind::dCQ, budget);
    Memory memory;
    for (const auto& r : rounds) {
        trace.add_classical(r.name);
        if (r.num_qubits == 0 || !r.quantum) continue;
        QuantumSession session(SchemeKind::dCQ, r.num_qubits, budget, trace, cap);
        r.quantum(session, memory);
        memory.push_back(session.measure_all(rng));
        session.close();
    }
    trace.add_classical("output");
    return {finish(memory), std::move(trace)};
}

class QcContext {
public:
    QcContext(QuantumSession& session, HybridTrace& trace, Rng& rng) : session_(&session), trace_(&trace), rng_(&rng) {}

    QuantumSession& quantum() { return *session_; }
    Rng& rng() { return *rng_; }

    template <class F>
    auto classical(const std::string& name, F&& f) {
        session_->flush();
        trace_->add_classical(name);
        return f();
    }

private:
    QuantumSession* session_;
    HybridTrace* trace_;
    Rng* rng_;
};

// A single persistent quantum register with classical interleavings; layers between full
// measurements are bounded by the budget.
template <class Output>
RunResult<Output> run_dqc(int budget, int num_qubits, const std::function<Output(QcContext&)>& program, Rng& rng,
                          std::size_t cap = qsim::kDefaultSparseCap) {
    HybridTrace trace(SchemeKind::dQC, budget);
    QuantumSession session(SchemeKind::dQC, num_qubits, budget, trace, cap);
    QcContext ctx(session, trace, rng);
    Output out = program(ctx);
    session.close();
    return {std::move(out), std::move(trace)};
}

} // namespace cvqd::hybrid
