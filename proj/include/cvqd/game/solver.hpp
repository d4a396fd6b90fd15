#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "../common.hpp"
#include "../hybrid.hpp"
#include "../oracles.hpp"

namespace cvqd::game {

enum class SolverKind { InPlace, Standard };

inline std::string to_string(SolverKind k) { return k == SolverKind::InPlace ? "inplace" : "standard"; }

inline SolverKind parse_solver(const std::string& s) {
    if (s == "inplace") return SolverKind::InPlace;
    if (s == "standard") return SolverKind::Standard;
    throw ConfigError("unknown solver '" + s + "' (expected inplace|standard)");
}

// Register layout of the d-shuffling solvers.
// In-place: x (n) | work (width) | flag.  Standard: x (n) | w_0 .. w_{d-1} (width each) | v (n + 1, top bit marks bottom).
struct SolverLayout {
    SolverKind kind = SolverKind::InPlace;
    int n = 0;
    int d = 0;
    int width = 0;

    int num_qubits() const {
        return kind == SolverKind::InPlace ? n + width + 1 : n + d * width + n + 1;
    }
    int queries() const { return kind == SolverKind::InPlace ? d + 1 : 2 * d + 1; }
    int depth() const { return queries() + 2; }
    int level_of_query(int k) const {
        if (k < 0 || k >= queries()) throw std::out_of_range("query index out of range");
        return k <= d ? k : 2 * d - k;
    }
    oracles::Register x() const { return {0, n}; }
    oracles::Register chain(int i) const { return {n + i * width, width}; }
    oracles::Register value() const { return {n + d * width, n + 1}; }
    int flag_qubit() const { return n + width; }
};

// Oracle access for one solver layout; query k acts on the whole solver register.
class QueryOracle {
public:
    QueryOracle(SolverLayout layout, oracles::ShufflingOracle base) : layout_(layout) {
        if (layout_.d < 1) throw ConfigError("d-shuffling solvers need d >= 1");
        if (layout_.kind == SolverKind::InPlace)
            inplace_ = std::make_shared<oracles::InPlaceShufflingOracle>(std::move(base));
        else
            standard_ = std::make_shared<oracles::ShufflingOracle>(std::move(base));
        if (layout_.num_qubits() > 64) throw CapacityError("solver register exceeds 64 qubits");
    }

    const SolverLayout& layout() const { return layout_; }
    const oracles::ShufflingOracle& shuffling() const { return inplace_ ? inplace_->base() : *standard_; }
    u64 shift() const { return shuffling().simon().shift(); }

    void apply(int k, qsim::SparseState& s) const {
        const int level = layout_.level_of_query(k);
        if (inplace_) {
            inplace_->apply_level(s, level);
            return;
        }
        const auto& o = *standard_;
        const int d = layout_.d;
        if (level == 0) {
            oracles::apply_standard_oracle(s, [&](u64 x) { return o.eval_level(0, x); }, layout_.x(), layout_.chain(0));
        } else if (level < d) {
            oracles::apply_standard_oracle(s, [&](u64 w) { return o.eval_level(level, w); }, layout_.chain(level - 1),
                                           layout_.chain(level));
        } else {
            const u64 bottom = u64{1} << layout_.n;
            oracles::apply_standard_oracle(
                s,
                [&](u64 y) {
                    auto v = o.eval_final(y);
                    return v ? *v : bottom;
                },
                layout_.chain(d - 1), layout_.value());
        }
    }

private:
    SolverLayout layout_;
    std::shared_ptr<oracles::InPlaceShufflingOracle> inplace_;
    std::shared_ptr<oracles::ShufflingOracle> standard_;
};

inline QueryOracle sample_query_oracle(SolverKind kind, int n, int d, oracles::OracleMode mode, Rng& rng,
                                       int width_factor = 0) {
    auto f = oracles::sample_simon(n, rng);
    auto base = oracles::sample_shuffling(f, d, rng, mode, width_factor);
    SolverLayout layout{kind, n, d, base.width()};
    return QueryOracle(layout, std::move(base));
}

struct SolverSamples {
    std::vector<u64> ys;
    int attempts = 0;
    int accepted = 0;
};

// The honest query algorithm split into its layers so that queries can be routed through provers.
class SolverProgram {
public:
    explicit SolverProgram(SolverLayout layout) : layout_(layout) {}

    const SolverLayout& layout() const { return layout_; }

    void first_layer(hybrid::QuantumSession& q) const {
        q.layer([&](qsim::SparseState& s) {
            for (int i = 0; i < layout_.n; ++i) s.apply_1q(qsim::gates::H(), i);
        });
    }

    void query_layer(hybrid::QuantumSession& q, const std::function<void(qsim::SparseState&, int)>& query) const {
        q.layer_indexed(query);
    }

    void last_layer(hybrid::QuantumSession& q) const {
        q.layer([&](qsim::SparseState& s) {
            for (int i = 0; i < layout_.n; ++i) s.apply_1q(qsim::gates::H(), i);
            if (layout_.kind == SolverKind::InPlace) s.apply_1q(qsim::gates::H(), layout_.flag_qubit());
        });
    }

    // Measures every copy; in-place samples are kept only when the flag reads 0.
    SolverSamples finish(hybrid::QuantumSession& q, Rng& rng) const {
        SolverSamples out;
        for (u64 word : q.measure_all_copies(rng)) {
            out.attempts++;
            if (layout_.kind == SolverKind::InPlace && bit_at(word, layout_.flag_qubit())) continue;
            out.accepted++;
            out.ys.push_back(layout_.x().get(word));
        }
        return out;
    }

private:
    SolverLayout layout_;
};

// Final answer from samples: the recovered shift, or a uniformly random nonzero guess.
inline u64 answer_from_samples(const std::vector<u64>& ys, int n, Rng& rng) {
    if (auto s = oracles::solve_simon(ys, n)) return *s;
    u64 g = 0;
    while (g == 0) g = random_bits(rng, n);
    return g;
}

struct SolverRun {
    SolverSamples samples;
    hybrid::HybridTrace trace{hybrid::SchemeKind::dQC, 0};
};

// Direct (prover-free) run of the solver with `copies` parallel registers under a depth budget.
inline SolverRun run_solver(const QueryOracle& oracle, int copies, int budget, Rng& rng) {
    const SolverProgram program(oracle.layout());
    hybrid::HybridTrace trace(hybrid::SchemeKind::dQC, budget);
    hybrid::QuantumSession q(hybrid::SchemeKind::dQC, oracle.layout().num_qubits(), budget, trace,
                             qsim::kDefaultSparseCap, copies);
    program.first_layer(q);
    for (int k = 0; k < oracle.layout().queries(); ++k)
        program.query_layer(q, [&](qsim::SparseState& s, int) { oracle.apply(k, s); });
    program.last_layer(q);
    SolverRun run;
    run.samples = program.finish(q, rng);
    q.close();
    run.trace = std::move(trace);
    return run;
}

struct SamplingReport {
    int attempts = 0;
    int accepted = 0;
    std::optional<u64> recovered;
    int audited_depth = 0;
};

// Repeats single-copy runs until `wanted` samples pass the flag check, then solves.
inline SamplingReport collect_samples(const QueryOracle& oracle, int wanted, Rng& rng, int max_attempts = 100000) {
    SamplingReport r;
    std::vector<u64> ys;
    while (static_cast<int>(ys.size()) < wanted) {
        if (r.attempts >= max_attempts) throw std::runtime_error("sampling did not reach the requested count");
        auto run = run_solver(oracle, 1, oracle.layout().depth(), rng);
        r.attempts += run.samples.attempts;
        r.accepted += run.samples.accepted;
        r.audited_depth = std::max(r.audited_depth, run.trace.audited_depth());
        for (u64 y : run.samples.ys) ys.push_back(y);
    }
    r.recovered = oracles::solve_simon(ys, oracle.layout().n);
    return r;
}

} // namespace cvqd::game
