#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "../common.hpp"
#include "../gadgets.hpp"
#include "../hybrid.hpp"
#include "../qsim.hpp"
#include "provers.hpp"
#include "setup.hpp"
#include "solver.hpp"
#include "transcript.hpp"

namespace cvqd::game {

using gadgets::Parity;
using gadgets::PadKeys;
using gadgets::RoundType;

// P_A's measurements of its EPR halves in one round. P_O's partner of half i is U_i^T|e_i>.
struct EprRecords {
    std::vector<Label> labels;
    std::vector<qsim::Matrix> basis;
    std::vector<int> measured;  // -1 when unmeasured
    std::vector<int> reported;

    int size() const { return static_cast<int>(labels.size()); }

    int add(Label w, qsim::Matrix u, int e, int reported_e) {
        labels.push_back(w);
        basis.push_back(std::move(u));
        measured.push_back(e);
        reported.push_back(reported_e);
        return size() - 1;
    }

    // Unitary taking |0> to the partner state.
    qsim::Matrix partner_prep(int i) const {
        const auto& u = basis.at(static_cast<std::size_t>(i));
        qsim::Matrix ut = u.adjoint().conj();
        return measured[static_cast<std::size_t>(i)] ? ut * qsim::gates::X() : ut;
    }
};

inline EprRecords measure_halves(const std::vector<Label>& labels, ProverA& a, Rng& rng) {
    EprRecords r;
    for (Label w : labels) {
        if (w == Label::None) {
            r.add(w, qsim::gates::I(), -1, -1);
            continue;
        }
        auto u = a.epr_basis(w, rng);
        const int e = coin(rng);
        r.add(w, std::move(u), e, a.report_outcome(w, e, rng) & 1);
    }
    return r;
}

// Verifier's correction bit for a gadget on pair i.
inline int verifier_z(RoundType round, Parity parity, Label w, int a, int c, Rng& rng) {
    if (round == RoundType::Computation) return (a + (w == Label::F ? 1 : 0) + c) & 1;
    if (parity == Parity::Even) return coin(rng);
    return w == Label::Y ? 1 : 0;
}

struct GadgetStep {
    int layer = 0;  // index of the T gate on its wire
    int wire = 0;
    int pair = 0;
    int c = 0;
    int z = 0;
};

// Stand-in evaluation on n data wires plus one spare qubit holding P_O's EPR half.
struct CircuitRun {
    qsim::StateVector state{1};
    std::vector<int> wires;
    gadgets::KeyLedger ledger{{}};
    std::vector<GadgetStep> steps;
    bool simulated = true;
};

// Returns the EPR index used for the next T gadget on `wire`.
using HalfPicker = std::function<int(int wire, Parity parity, int layer)>;

inline CircuitRun evaluate_gadgets(const gadgets::GateCircuit& circuit, RoundType round, const qsim::StateVector& input,
                                   std::vector<PadKeys> keys, const EprRecords& epr, const HalfPicker& pick,
                                   ProverO& o, bool simulate, Rng& rng) {
    using namespace qsim::gates;
    const int n = circuit.wires();
    if (static_cast<int>(keys.size()) != n) throw std::invalid_argument("key count mismatch");
    CircuitRun run;
    run.simulated = simulate;
    run.ledger = gadgets::KeyLedger(std::move(keys));
    for (int w = 0; w < n; ++w) run.wires.push_back(w);
    int spare = n;
    if (simulate) {
        if (input.num_qubits() != n) throw std::invalid_argument("input does not match the circuit width");
        run.state = qsim::place_state(input, n + 1, run.wires);
    }
    const bool active = o.runs_gadgets();
    std::vector<int> t_seen(static_cast<std::size_t>(n), 0);

    for (const auto& op : circuit.compiled()) {
        auto& w0 = run.wires[static_cast<std::size_t>(op.w0)];
        if (op.kind == gadgets::OpKind::H) {
            if (simulate && active) run.state.apply_1q(H(), w0);
            run.ledger.apply_h(op.w0);
            continue;
        }
        if (op.kind == gadgets::OpKind::CNOT) {
            if (simulate && active) run.state.apply_2q(CNOT(), w0, run.wires[static_cast<std::size_t>(op.w1)]);
            run.ledger.apply_cnot(op.w0, op.w1);
            continue;
        }
        const Parity parity = run.ledger.parity(op.w0, round);
        const int layer = t_seen[static_cast<std::size_t>(op.w0)]++;
        const int i = pick(op.w0, parity, layer);
        const Label w = epr.labels.at(static_cast<std::size_t>(i));
        if (round == RoundType::Computation && !is_magic(w))
            throw ProtocolError("computation gadget drawn outside the F/G pairs");
        int c = 0;
        bool moved = false;
        if (simulate) {
            run.state.apply_1q(epr.partner_prep(i), spare);
            if (active) {
                run.state.apply_2q(CNOT(), spare, w0);
                c = qsim::measure_inplace(run.state, {w0}, rng)[0];
                gadgets::reset_qubit(run.state, w0, c);
                moved = true;
            } else {
                c = coin(rng);
                gadgets::reset_qubit(run.state, spare, qsim::measure_inplace(run.state, {spare}, rng)[0]);
            }
        } else {
            c = coin(rng);
        }
        const int z = verifier_z(round, parity, w, run.ledger.keys(op.w0).a, c, rng);
        if (moved) {
            if (z) run.state.apply_1q(gadgets::phase_gate(), spare);
            std::swap(w0, spare);
        }
        run.ledger.apply_t(op.w0, round, z, c, epr.reported.at(static_cast<std::size_t>(i)));
        run.steps.push_back({layer, op.w0, i, c, z});
    }
    if (simulate) o.after_standin(run.state, run.wires);
    return run;
}

inline qsim::StateVector encrypt(qsim::StateVector s, const std::vector<PadKeys>& keys) {
    u64 a = 0, b = 0;
    for (std::size_t w = 0; w < keys.size(); ++w) {
        a |= static_cast<u64>(keys[w].a & 1) << w;
        b |= static_cast<u64>(keys[w].b & 1) << w;
    }
    s.apply_pauli(a, b);
    return s;
}

inline u64 key_word(const std::vector<PadKeys>& keys, bool x_part) {
    u64 out = 0;
    for (std::size_t w = 0; w < keys.size(); ++w)
        out |= static_cast<u64>((x_part ? keys[w].a : keys[w].b) & 1) << w;
    return out;
}

// Decrypted wires of a simulated run.
inline qsim::StateVector decrypted_output(const CircuitRun& run) {
    return encrypt(qsim::subsystem_state(run.state, run.wires), run.ledger.all_keys());
}

struct CircuitEvaluation {
    qsim::StateVector output{1};
    qsim::StateVector ideal{1};
    double fidelity = 0.0;
    std::vector<gadgets::GadgetRecord> gadgets;
};

// Computation-round evaluation of an arbitrary Clifford+T circuit on P_A's state, each T gadget
// drawing a fresh F/G pair measured by P_A.
inline CircuitEvaluation run_comp_circuit(const gadgets::GateCircuit& circuit, const qsim::StateVector& psi, ProverA& a,
                                          ProverO& o, Rng& rng) {
    const int n = circuit.wires();
    if (n + 1 > qsim::kDefaultDenseLimit) throw CapacityError("stand-in circuit too wide for gadget fidelity");
    std::vector<PadKeys> keys;
    for (int w = 0; w < n; ++w) keys.push_back({coin(rng), coin(rng)});
    EprRecords epr;
    HalfPicker pick = [&](int, Parity, int) {
        const Label w = coin(rng) ? Label::F : Label::G;
        auto u = a.epr_basis(w, rng);
        const int e = coin(rng);
        return epr.add(w, std::move(u), e, a.report_outcome(w, e, rng) & 1);
    };
    auto run = evaluate_gadgets(circuit, RoundType::Computation, encrypt(psi, keys), keys, epr, pick, o, true, rng);
    CircuitEvaluation out;
    out.output = decrypted_output(run);
    out.ideal = psi;
    std::vector<int> phys;
    for (int w = 0; w < n; ++w) phys.push_back(w);
    circuit.apply_ideal(out.ideal, phys);
    out.fidelity = qsim::fidelity(out.output, out.ideal);
    out.gadgets = run.ledger.history();
    return out;
}

// ---------------------------------------------------------------------------------------------
// Rigidity test

struct RigidGroup {
    int count = 0;
    int agree = 0;  // deterministic groups: agreements; CHSH group: wins
};

struct RigidResult {
    bool accepted = true;
    std::map<char, RigidGroup> groups;  // 'X','Y','Z' and 'C' for the F/G CHSH group
    double threshold = 0.0;             // minimum CHSH win rate

    nlohmann::json to_json() const {
        nlohmann::json g = nlohmann::json::object();
        for (const auto& [k, v] : groups) g[std::string(1, k)] = {{"count", v.count}, {"agree", v.agree}};
        return {{"accepted", accepted}, {"groups", g}, {"chsh_threshold", threshold}};
    }
};

inline double chsh_win_probability() { return std::pow(std::cos(std::numbers::pi / 8), 2); }

// Correlator <Phi+| O_A (x) O_B |Phi+> of the observables measured by unitaries ua and ub.
inline double epr_correlator(const qsim::Matrix& ua, const qsim::Matrix& ub) {
    const auto oa = ua.adjoint() * qsim::gates::Z() * ua;
    const auto ob = ub.adjoint() * qsim::gates::Z() * ub;
    qsim::Matrix obt(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) obt(r, c) = ob(c, r);
    return (oa * obt).trace().real() / 2.0;
}

// P_O measures the partners of `indices`: conjugate bases for X/Y/Z, X or Y at random for F/G.
inline RigidResult rigid_check(const EprRecords& epr, const std::vector<int>& indices, double tolerance, Rng& rng,
                               std::vector<int>* po_outcomes = nullptr, std::string* po_bases = nullptr) {
    RigidResult r;
    for (int i : indices) {
        const Label w = epr.labels.at(static_cast<std::size_t>(i));
        qsim::Matrix ub;
        char group;
        char base;
        if (is_magic(w)) {
            base = coin(rng) ? 'Y' : 'X';
            ub = label_unitary(base == 'X' ? Label::X : Label::Y);
            group = 'C';
        } else {
            ub = label_unitary(w).conj();
            group = label_char(w);
            base = group;
        }
        qsim::StateVector half(1);
        half.apply_1q(ub * epr.partner_prep(i), 0);
        const int o = qsim::measure_inplace(half, {0}, rng)[0];
        const int rep = epr.reported[static_cast<std::size_t>(i)];
        auto& g = r.groups[group];
        g.count++;
        if (group == 'C') {
            const bool anti = epr_correlator(label_unitary(w), ub) < 0;
            g.agree += ((rep ^ o) == (anti ? 1 : 0));
        } else {
            g.agree += (rep == o);
        }
        if (po_outcomes) po_outcomes->push_back(o);
        if (po_bases) po_bases->push_back(base);
    }
    const double p = chsh_win_probability();
    for (const auto& [k, g] : r.groups) {
        if (g.count == 0) continue;
        const double rate = static_cast<double>(g.agree) / g.count;
        if (k == 'C') {
            const double thr = p - 3.0 * std::sqrt(p * (1 - p) / g.count);
            r.threshold = thr;
            if (rate < thr) r.accepted = false;
        } else if (1.0 - rate > tolerance) {
            r.accepted = false;
        }
    }
    return r;
}

// Standalone rigidity test over m pairs with uniformly random labels.
inline RigidResult run_rigid(int m, double tolerance, ProverA& a, Rng& rng) {
    static const Label sigma[] = {Label::X, Label::Y, Label::Z, Label::F, Label::G};
    std::vector<Label> labels(static_cast<std::size_t>(m));
    for (auto& l : labels) l = sigma[rng() % 5];
    auto epr = measure_halves(labels, a, rng);
    std::vector<int> all(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
    return rigid_check(epr, all, tolerance, rng);
}

// ---------------------------------------------------------------------------------------------
// Rounds of the query protocol

struct RoundOutcome {
    int round = 0;
    TestKind kind = TestKind::None;
    bool passed = true;
    SetupPartition partition;
    std::optional<CircuitRun> standin;
    std::optional<qsim::StateVector> standin_output;  // decrypted, when simulated
    std::optional<qsim::StateVector> standin_ideal;
    std::optional<RigidResult> rigid;
    bool register_sent = false;
};

namespace detail {

// Disjoint draws from per-block pools.
class BlockPools {
public:
    BlockPools(const SetupPartition& p, Rng& rng) : p_(&p), rng_(&rng) {}

    int take(int block, std::initializer_list<Label> kinds) {
        std::string names;
        for (Label l : kinds) names += label_char(l);
        const auto key = std::make_pair(block, names);
        auto it = pools_.find(key);
        if (it == pools_.end()) {
            auto pool = p_->with_labels(p_->blocks.at(static_cast<std::size_t>(block)), kinds);
            std::shuffle(pool.begin(), pool.end(), *rng_);
            it = pools_.emplace(key, std::move(pool)).first;
        }
        if (it->second.empty()) throw ProtocolError("block ran out of EPR pairs for gadgets");
        const int i = it->second.back();
        it->second.pop_back();
        return i;
    }

private:
    const SetupPartition* p_;
    Rng* rng_;
    std::map<std::pair<int, std::string>, std::vector<int>> pools_;
};

inline void log_gadgets(Transcript& tr, int round, const CircuitRun& run) {
    if (!tr.recording()) return;
    std::map<int, std::vector<const GadgetStep*>> by_layer;
    for (const auto& s : run.steps) by_layer[s.layer].push_back(&s);
    for (const auto& [layer, steps] : by_layer) {
        nlohmann::json idx = nlohmann::json::array(), cs = nlohmann::json::array(), zs = nlohmann::json::array();
        for (const auto* s : steps) {
            idx.push_back(s->pair);
            cs.push_back(s->c);
            zs.push_back(s->z);
        }
        tr.add(round, 5, "V", "P_O", MessageKind::TSubset, {{"layer", layer}, {"indices", idx}});
        tr.add(round, 5, "P_O", "V", MessageKind::GadgetOutcome, {{"layer", layer}, {"c", cs}});
        tr.add(round, 5, "V", "P_O", MessageKind::ZBits, {{"layer", layer}, {"z", zs}});
    }
}

} // namespace detail

// Round k (1-based) of the query protocol; kind None is a computation round.
inline RoundOutcome run_round(const ProtocolConfig& cfg, int k, TestKind kind, ProverA& a, ProverO& o,
                              const QueryOracle& oracle, Transcript& tr, Rng& rng) {
    const int n = cfg.n;
    RoundOutcome out;
    out.round = k;
    out.kind = kind;
    out.partition = sample_partition(cfg, rng);
    const auto& p = out.partition;

    tr.add_lazy(k, 2, "V", "P_A", MessageKind::SetupSets, [&] { return nlohmann::json{{"N_C", p.teleport}}; });
    tr.add_lazy(k, 2, "V", "P_A", MessageKind::BasisList, [&] { return nlohmann::json{{"W", p.label_string()}}; });

    a.begin_round(k - 1);
    auto epr = measure_halves(p.labels, a, rng);

    // Register round trip: P_A's pad, P_O's evaluation and fresh pad, the verifier's key release.
    const int nq = oracle.layout().num_qubits();
    std::vector<PadKey> sent_keys, returned_keys;
    out.register_sent = a.query(k - 1, [&](qsim::SparseState& s, int) {
        PadKey k1{random_bits(rng, nq), random_bits(rng, nq)};
        s.apply_pauli(k1.a, k1.b);
        sent_keys.push_back(k1);
        if (kind != TestKind::None) return;
        PadKey k2 = o.evaluate_register(s, k1, [&](qsim::SparseState& r) { oracle.apply(k - 1, r); }, rng);
        s.apply_pauli(k2.a, k2.b);
        returned_keys.push_back(k2);
    });
    if (!out.register_sent)
        for (int c = 0; c < cfg.parallel_copies(); ++c)
            sent_keys.push_back({random_bits(rng, nq), random_bits(rng, nq)});

    tr.add_lazy(k, 3, "P_A", "V", MessageKind::TeleportCorrections, [&] {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& key : sent_keys) arr.push_back({key.a, key.b});
        return nlohmann::json{{"register", arr}};
    });
    tr.add_lazy(k, 3, "P_A", "V", MessageKind::MeasureOutcomes, [&] {
        std::string e;
        for (int i = 0; i < p.m; ++i)
            if (epr.labels[static_cast<std::size_t>(i)] != Label::None) e += epr.reported[static_cast<std::size_t>(i)] ? '1' : '0';
        return nlohmann::json{{"e", e}};
    });

    if (kind == TestKind::Rigid) {
        const auto bar_n = p.complement_of_teleport();
        std::vector<int> po;
        std::string bases;
        auto rr = rigid_check(epr, bar_n, cfg.rigid_tolerance, rng, &po, &bases);
        tr.add_lazy(k, 4, "V", "P_O", MessageKind::BasisList, [&] { return nlohmann::json{{"indices", bar_n}, {"bases", bases}}; });
        tr.add_lazy(k, 5, "P_O", "V", MessageKind::MeasureOutcomes, [&] { return nlohmann::json{{"o", po}}; });
        out.passed = rr.accepted;
        out.rigid = std::move(rr);
        return out;
    }

    const RoundType round = kind == TestKind::XTest ? RoundType::XTest
                            : kind == TestKind::ZTest ? RoundType::ZTest
                                                      : RoundType::Computation;
    const std::vector<int>& inputs = kind == TestKind::XTest ? p.x_inputs
                                     : kind == TestKind::ZTest ? p.z_inputs
                                                               : p.teleport;
    tr.add_lazy(k, 4, "V", "P_O", MessageKind::SetupSets, [&] { return nlohmann::json{{"N", inputs}}; });

    // Stand-in input: EPR partners for the tests, an encrypted |+^n> in computation rounds.
    const bool simulate = kind != TestKind::None || cfg.fidelity == Fidelity::Gadget;
    std::vector<PadKeys> keys;
    qsim::StateVector input(n);
    qsim::StateVector plain(n);
    if (kind == TestKind::None) {
        for (int w = 0; w < n; ++w) {
            keys.push_back({coin(rng), coin(rng)});
            plain.apply_1q(qsim::gates::H(), w);
        }
        input = encrypt(plain, keys);
    } else {
        for (int w = 0; w < n; ++w) {
            const int i = inputs[static_cast<std::size_t>(w)];
            input.apply_1q(epr.partner_prep(i), w);
            const int e = epr.reported[static_cast<std::size_t>(i)];
            keys.push_back(kind == TestKind::XTest ? PadKeys{e, 0} : PadKeys{0, e});
        }
    }

    detail::BlockPools pools(p, rng);
    HalfPicker pick = [&](int, Parity parity, int layer) {
        if (round == RoundType::Computation) return pools.take(layer, {Label::F, Label::G});
        if (parity == Parity::Even) return pools.take(layer, {Label::Z});
        return pools.take(layer, {Label::X, Label::Y});
    };
    const auto circuit = gadgets::standin_circuit(n, cfg.layers());
    auto run = evaluate_gadgets(circuit, round, input, keys, epr, pick, o, simulate, rng);
    detail::log_gadgets(tr, k, run);

    // P_O teleports the wires back under a fresh pad.
    PadKey back{random_bits(rng, n), random_bits(rng, n)};
    tr.add_lazy(k, 6, "P_O", "V", MessageKind::TeleportCorrections, [&] {
        nlohmann::json reg = nlohmann::json::array();
        for (const auto& key : returned_keys) reg.push_back({key.a, key.b});
        return nlohmann::json{{"wires", {back.a, back.b}}, {"register", reg}};
    });

    if (kind == TestKind::None) {
        tr.add_lazy(k, 7, "V", "P_A", MessageKind::TeleportCorrections, [&] {
            nlohmann::json reg = nlohmann::json::array();
            for (const auto& key : returned_keys) reg.push_back({key.a, key.b});
            return nlohmann::json{{"register", reg}};
        });
        if (simulate) {
            out.standin_output = decrypted_output(run);
            qsim::StateVector ideal = plain;
            std::vector<int> phys;
            for (int w = 0; w < n; ++w) phys.push_back(w);
            circuit.apply_ideal(ideal, phys);
            out.standin_ideal = std::move(ideal);
        }
        out.standin = std::move(run);
        return out;
    }

    const bool hadamard = kind == TestKind::ZTest;
    auto returned = qsim::subsystem_state(run.state, run.wires);
    returned.apply_pauli(back.a, back.b);
    tr.add(k, 7, "V", "P_A", MessageKind::BasisList, {{"measure", hadamard ? "hadamard" : "standard"}});
    const u64 d = a.test_measure(std::move(returned), hadamard, rng) & low_mask(n);
    tr.add(k, 8, "P_A", "V", MessageKind::MeasureOutcomes, {{"d", bit_string(d, n)}});
    const auto& final_keys = run.ledger.all_keys();
    const u64 expect = hadamard ? (back.b ^ key_word(final_keys, false)) : (back.a ^ key_word(final_keys, true));
    out.passed = d == expect;
    out.standin = std::move(run);
    return out;
}

struct QueryResult {
    bool accepted = false;
    RoundPlan plan;
    std::string error;
    int rounds_run = 0;
    std::optional<u64> answer;
    int audited_depth = 0;
    bool depth_valid = true;
    std::vector<RoundOutcome> rounds;
    Transcript transcript;

    nlohmann::json verdict_json() const {
        nlohmann::json j = {{"accepted", accepted},
                            {"gamma", plan.gamma},
                            {"ell", plan.ell},
                            {"test", to_string(plan.test)},
                            {"rounds", rounds_run}};
        if (!error.empty()) j["error"] = error;
        if (answer) j["answer"] = *answer;
        return j;
    }
};

struct QueryOptions {
    std::optional<RoundPlan> plan;
    bool record = false;
    bool keep_rounds = false;
};

// Runs the query protocol on one oracle instance.
inline QueryResult run_query_protocol(const ProtocolConfig& cfg, ProverA& a, ProverO& o, const QueryOracle& oracle,
                                      Rng& rng, const QueryOptions& opts = {}) {
    QueryResult res;
    res.transcript = Transcript(opts.record);
    auto& tr = res.transcript;
    res.plan = opts.plan ? *opts.plan : sample_plan(cfg, rng);
    const int q = cfg.queries();
    if (oracle.layout().queries() != q || oracle.layout().n != cfg.n || oracle.layout().d != cfg.d)
        throw ConfigError("oracle does not match the protocol configuration");
    if (res.plan.gamma == 1 && (res.plan.ell < 1 || res.plan.ell > q || res.plan.test == TestKind::None))
        throw ConfigError("round plan needs a test round in [1, q]");

    try {
        a.start(oracle.layout(), cfg.parallel_copies(), q);
        const int rounds = res.plan.gamma ? res.plan.ell : q;
        for (int k = 1; k <= rounds; ++k) {
            const TestKind kind = (res.plan.gamma && k == res.plan.ell) ? res.plan.test : TestKind::None;
            auto r = run_round(cfg, k, kind, a, o, oracle, tr, rng);
            res.rounds_run = k;
            const bool passed = r.passed;
            if (opts.keep_rounds) res.rounds.push_back(std::move(r));
            if (kind != TestKind::None) res.accepted = passed;
        }
        if (!res.plan.gamma) {
            const u64 w = a.answer(rng) & low_mask(cfg.n);
            res.answer = w;
            tr.add(q, 8, "P_A", "V", MessageKind::FinalAnswer, {{"w", bit_string(w, cfg.n)}});
            res.accepted = w == oracle.shift();
        }
    } catch (const hybrid::DepthBudgetExceeded& e) {
        res.accepted = false;
        res.error = std::string("depth budget exceeded: ") + e.what();
    } catch (const hybrid::SchemeViolation& e) {
        res.accepted = false;
        res.error = std::string("scheme violation: ") + e.what();
    }
    res.audited_depth = a.trace().audited_depth();
    res.depth_valid = a.trace().valid();
    tr.add(std::max(res.rounds_run, 1), 9, "V", "all", MessageKind::Verdict, res.verdict_json());
    return res;
}

// Transcript document of one run.
inline nlohmann::json transcript_json(const ProtocolConfig& cfg, u64 seed, const QueryResult& r, const ProverA& a) {
    return {{"config", cfg.to_json()},
            {"seed", seed},
            {"messages", r.transcript.messages_json()},
            {"verdict", r.verdict_json()},
            {"depth_audit", {{"audited_depth", r.audited_depth}, {"budget", a.declared_budget()}, {"valid", r.depth_valid}}}};
}

} // namespace cvqd::game
