#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "../common.hpp"
#include "../hybrid.hpp"
#include "setup.hpp"
#include "solver.hpp"

namespace cvqd::game {

using RoundTrip = std::function<void(qsim::SparseState&, int)>;

// P_A: measures its EPR halves, sends its solver register through each query, answers at the end.
class ProverA {
public:
    virtual ~ProverA() = default;
    virtual std::string name() const = 0;
    virtual int declared_budget() const = 0;
    virtual void start(const SolverLayout& layout, int copies, int queries) = 0;
    virtual void begin_round(int /*k*/) {}
    // Unitary applied to the half before its standard-basis measurement.
    virtual qsim::Matrix epr_basis(Label w, Rng& rng) = 0;
    virtual int report_outcome(Label /*w*/, int measured, Rng& /*rng*/) { return measured; }
    // Query k (0-based); roundtrip teleports the register out and back. Returns false if nothing was sent.
    virtual bool query(int k, const RoundTrip& roundtrip) = 0;
    // Measurement of the returned test register, Hadamard basis when asked.
    virtual u64 test_measure(qsim::StateVector state, bool hadamard, Rng& rng) = 0;
    virtual u64 answer(Rng& rng) = 0;
    virtual const hybrid::HybridTrace& trace() const = 0;
};

namespace detail {

inline u64 measure_register(qsim::StateVector s, bool hadamard, Rng& rng) {
    std::vector<int> all;
    for (int i = 0; i < s.num_qubits(); ++i) {
        if (hadamard) s.apply_1q(qsim::gates::H(), i);
        all.push_back(i);
    }
    return qsim::bits_to_word(qsim::measure_inplace(s, all, rng));
}

inline u64 random_nonzero(int n, Rng& rng) {
    u64 g = 0;
    while (g == 0) g = random_bits(rng, n);
    return g;
}

} // namespace detail

// Runs the query algorithm faithfully under its declared budget.
class HonestA : public ProverA {
public:
    explicit HonestA(int budget_override = -1) : budget_override_(budget_override) {}

    std::string name() const override { return "honest"; }
    int declared_budget() const override { return budget_; }

    void start(const SolverLayout& layout, int copies, int queries) override {
        layout_ = layout;
        queries_ = queries;
        program_.emplace(layout);
        budget_ = budget_override_ >= 0 ? budget_override_ : layout.depth();
        trace_ = hybrid::HybridTrace(hybrid::SchemeKind::dQC, budget_);
        session_ = std::make_unique<hybrid::QuantumSession>(hybrid::SchemeKind::dQC, layout.num_qubits(), budget_,
                                                            trace_, qsim::kDefaultSparseCap, copies);
    }

    qsim::Matrix epr_basis(Label w, Rng&) override { return label_unitary(w); }

    bool query(int k, const RoundTrip& roundtrip) override {
        if (k == 0) program_->first_layer(*session_);
        program_->query_layer(*session_, roundtrip);
        return true;
    }

    u64 test_measure(qsim::StateVector state, bool hadamard, Rng& rng) override {
        return detail::measure_register(std::move(state), hadamard, rng);
    }

    u64 answer(Rng& rng) override {
        program_->last_layer(*session_);
        auto samples = program_->finish(*session_, rng);
        session_->close();
        return answer_from_samples(samples.ys, layout_.n, rng);
    }

    const hybrid::HybridTrace& trace() const override { return trace_; }
    const hybrid::QuantumSession& session() const { return *session_; }

protected:
    SolverLayout layout_;
    int queries_ = 0;
    int budget_ = 0;
    int budget_override_;
    std::optional<SolverProgram> program_;
    hybrid::HybridTrace trace_{hybrid::SchemeKind::dQC, 0};
    std::unique_ptr<hybrid::QuantumSession> session_;
};

// Measures correctly but reports uniformly random EPR outcomes.
class LyingA : public HonestA {
public:
    std::string name() const override { return "lying"; }
    int report_outcome(Label, int, Rng& rng) override { return coin(rng); }
};

// Measures a Z-labelled half in the X basis with probability 1/2.
class BasisSwapA : public HonestA {
public:
    std::string name() const override { return "basis-swap"; }
    qsim::Matrix epr_basis(Label w, Rng& rng) override {
        if (w == Label::Z && coin(rng)) return label_unitary(Label::X);
        return label_unitary(w);
    }
};

// No quantum depth: standard-basis measurements only, random teleport corrections, random answer.
class ClassicalA : public ProverA {
public:
    std::string name() const override { return "classical"; }
    int declared_budget() const override { return 0; }
    void start(const SolverLayout& layout, int, int) override {
        n_ = layout.n;
        trace_ = hybrid::HybridTrace(hybrid::SchemeKind::dQC, 0);
    }
    qsim::Matrix epr_basis(Label, Rng&) override { return qsim::gates::I(); }
    bool query(int, const RoundTrip&) override {
        trace_.add_classical("query without a register");
        return false;
    }
    u64 test_measure(qsim::StateVector state, bool, Rng& rng) override {
        return detail::measure_register(std::move(state), false, rng);
    }
    u64 answer(Rng& rng) override { return detail::random_nonzero(n_, rng); }
    const hybrid::HybridTrace& trace() const override { return trace_; }

private:
    int n_ = 0;
    hybrid::HybridTrace trace_{hybrid::SchemeKind::dQC, 0};
};

// Honest solver with budget d: once the next round needs more layers than remain, it measures
// its register and continues as the classical prover.
class MidResetA : public HonestA {
public:
    explicit MidResetA(int budget) : HonestA(budget) {}
    std::string name() const override { return "mid-reset"; }

    void begin_round(int k) override {
        if (reset_) return;
        const int need = 1 + (k == 0 ? 1 : 0) + (k == queries_ - 1 ? 1 : 0);
        if (need > session_->remaining()) {
            Rng local(static_cast<u64>(k) + 17);
            session_->measure_all_copies(local);
            session_->close();
            trace_.add_classical("reset");
            reset_ = true;
        }
    }

    qsim::Matrix epr_basis(Label w, Rng& rng) override {
        return reset_ ? qsim::gates::I() : HonestA::epr_basis(w, rng);
    }

    bool query(int k, const RoundTrip& roundtrip) override {
        if (reset_) return false;
        return HonestA::query(k, roundtrip);
    }

    u64 test_measure(qsim::StateVector state, bool hadamard, Rng& rng) override {
        return detail::measure_register(std::move(state), hadamard && !reset_, rng);
    }

    u64 answer(Rng& rng) override {
        if (reset_) return detail::random_nonzero(layout_.n, rng);
        return HonestA::answer(rng);
    }

    bool was_reset() const { return reset_; }

private:
    bool reset_ = false;
};

struct PadKey {
    u64 a = 0;
    u64 b = 0;
};

// P_O: evaluates the oracle on P_A's register and the stand-in circuit through gadgets.
class ProverO {
public:
    virtual ~ProverO() = default;
    virtual std::string name() const = 0;
    // Acts on the padded register; key_in is the pad as known to the verifier. Returns the reported outgoing pad.
    virtual PadKey evaluate_register(qsim::SparseState& s, PadKey key_in,
                                     const std::function<void(qsim::SparseState&)>& oracle, Rng& rng) = 0;
    virtual bool runs_gadgets() const { return true; }
    virtual void after_standin(qsim::StateVector& /*s*/, const std::vector<int>& /*wires*/) {}
};

class HonestO : public ProverO {
public:
    std::string name() const override { return "honest"; }
    PadKey evaluate_register(qsim::SparseState& s, PadKey key_in, const std::function<void(qsim::SparseState&)>& oracle,
                             Rng& rng) override {
        s.apply_pauli(key_in.a, key_in.b);
        oracle(s);
        tamper(s);
        PadKey out{random_bits(rng, s.num_qubits()), random_bits(rng, s.num_qubits())};
        s.apply_pauli(out.a, out.b);
        return out;
    }

protected:
    virtual void tamper(qsim::SparseState&) {}
};

// Never evaluates anything and reports random outcomes.
class SkipO : public ProverO {
public:
    std::string name() const override { return "skip"; }
    PadKey evaluate_register(qsim::SparseState& s, PadKey, const std::function<void(qsim::SparseState&)>&,
                             Rng& rng) override {
        return {random_bits(rng, s.num_qubits()), random_bits(rng, s.num_qubits())};
    }
    bool runs_gadgets() const override { return false; }
};

// Honest evaluation followed by an X on the first wire.
class PauliO : public HonestO {
public:
    std::string name() const override { return "pauli"; }
    void after_standin(qsim::StateVector& s, const std::vector<int>& wires) override {
        s.apply_1q(qsim::gates::X(), wires.front());
    }

protected:
    void tamper(qsim::SparseState& s) override { s.apply_pauli(1, 0); }
};

using ProverAFactory = std::function<std::unique_ptr<ProverA>()>;
using ProverOFactory = std::function<std::unique_ptr<ProverO>()>;

inline ProverAFactory prover_a_factory(const std::string& name, int d) {
    if (name == "honest") return [] { return std::make_unique<HonestA>(); };
    if (name == "lying" || name == "random-report") return [] { return std::make_unique<LyingA>(); };
    if (name == "classical") return [] { return std::make_unique<ClassicalA>(); };
    if (name == "midreset" || name == "mid-reset") return [d] { return std::make_unique<MidResetA>(d); };
    if (name == "basis-swap") return [] { return std::make_unique<BasisSwapA>(); };
    throw ConfigError("unknown P_A strategy '" + name + "'");
}

inline ProverOFactory prover_o_factory(const std::string& name) {
    if (name == "honest") return [] { return std::make_unique<HonestO>(); };
    if (name == "skip") return [] { return std::make_unique<SkipO>(); };
    if (name == "pauli") return [] { return std::make_unique<PauliO>(); };
    throw ConfigError("unknown P_O strategy '" + name + "'");
}

inline std::vector<std::string> prover_a_names() { return {"honest", "lying", "classical", "midreset", "basis-swap"}; }
inline std::vector<std::string> prover_o_names() { return {"honest", "skip", "pauli"}; }

} // namespace cvqd::game
