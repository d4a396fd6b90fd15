#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "../common.hpp"
#include "../gadgets.hpp"
#include "../oracles/shuffling.hpp"
#include "solver.hpp"

namespace cvqd::game {

// Measurement labels for EPR halves; None marks the teleport set.
enum class Label { None, X, Y, Z, F, G };

inline char label_char(Label l) {
    switch (l) {
    case Label::X: return 'X';
    case Label::Y: return 'Y';
    case Label::Z: return 'Z';
    case Label::F: return 'F';
    case Label::G: return 'G';
    default: return '-';
    }
}

// Unitary applied before a standard-basis measurement for each label. F and G are the two
// computation-row bases H S^k T with k = 1 and k = 0.
inline qsim::Matrix label_unitary(Label l) {
    using namespace qsim::gates;
    switch (l) {
    case Label::X: return H();
    case Label::Y: return H() * Sdg();
    case Label::Z: return I();
    case Label::F: return H() * S() * T();
    case Label::G: return H() * T();
    default: return I();
    }
}

inline bool is_magic(Label l) { return l == Label::F || l == Label::G; }

inline double choose_alpha(int q, double p, double c = 1.0) {
    if (q < 1) throw ConfigError("q must be at least 1");
    if (!(p > 0 && p < 0.5)) throw ConfigError("p must lie in (0, 1/2)");
    if (!(c > 0)) throw ConfigError("alpha constant must be positive");
    return 1.0 / (1.0 + 2.0 * q * c / p);
}

enum class Fidelity { Abstract, Gadget };

inline std::string to_string(Fidelity f) { return f == Fidelity::Abstract ? "abstract" : "gadget"; }

inline Fidelity parse_fidelity(const std::string& s) {
    if (s == "abstract") return Fidelity::Abstract;
    if (s == "gadget") return Fidelity::Gadget;
    throw ConfigError("unknown fidelity mode '" + s + "' (expected abstract|gadget)");
}

struct ProtocolConfig {
    int n = 3;
    int d = 2;
    int q = 0;               // 0: derived from the solver (d+1 in-place, 2d+1 standard)
    double p = 1.0 / 3.0;
    double alpha = 0.0;      // 0: choose_alpha(q, p, alpha_constant)
    double alpha_constant = 1.0;
    int block_size = 0;      // 0: 10 n
    int standin_layers = 0;  // 0: d
    int copies = 0;          // 0: 8 n parallel solver registers
    double rigid_tolerance = 0.1;
    SolverKind solver = SolverKind::InPlace;
    oracles::OracleMode oracle_mode = oracles::OracleMode::Exact;
    Fidelity fidelity = Fidelity::Abstract;
    int trials = 1000;
    u64 seed = 1;

    int queries() const { return q > 0 ? q : (solver == SolverKind::InPlace ? d + 1 : 2 * d + 1); }
    double alpha_value() const { return alpha > 0 ? alpha : choose_alpha(queries(), p, alpha_constant); }
    int block() const { return block_size > 0 ? block_size : 10 * n; }
    int layers() const { return standin_layers > 0 ? standin_layers : d; }
    int parallel_copies() const { return copies > 0 ? copies : 8 * n; }
    int m() const { return 3 * n + layers() * block(); }

    // All violations at once; empty when valid.
    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        if (n < 2) v.push_back("n must be at least 2");
        if (d < 1) v.push_back("d must be at least 1");
        if (q < 0) v.push_back("q must be nonnegative");
        if (!(p > 0 && p < 0.5)) v.push_back("p must lie in (0, 1/2)");
        if (alpha < 0 || alpha >= 1) v.push_back("alpha must lie in (0, 1)");
        if (!(alpha_constant > 0)) v.push_back("alpha constant must be positive");
        if (block_size != 0 && block_size < 3 * n) v.push_back("block size must be at least 3n");
        if (copies < 0) v.push_back("copies must be nonnegative");
        if (!(rigid_tolerance > 0 && rigid_tolerance < 0.5)) v.push_back("rigid tolerance must lie in (0, 1/2)");
        if (trials < 1) v.push_back("trials must be positive");
        if (n >= 2 && d >= 1) {
            const int expect = solver == SolverKind::InPlace ? d + 1 : 2 * d + 1;
            if (q > 0 && q != expect)
                v.push_back("q must equal " + std::to_string(expect) + " for the " + to_string(solver) + " solver");
            if (fidelity == Fidelity::Gadget && n + 1 > 9) v.push_back("gadget fidelity is limited to 8 wires");
        }
        return v;
    }

    void validate() const {
        auto v = violations();
        if (v.empty()) return;
        std::string msg;
        for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
        throw ConfigError(msg);
    }

    nlohmann::json to_json() const {
        return {{"n", n},
                {"d", d},
                {"q", queries()},
                {"p", p},
                {"alpha", alpha_value()},
                {"m", m()},
                {"block_size", block()},
                {"standin_layers", layers()},
                {"copies", parallel_copies()},
                {"rigid_tolerance", rigid_tolerance},
                {"solver", to_string(solver)},
                {"oracle_mode", oracles::to_string(oracle_mode)},
                {"fidelity", to_string(fidelity)},
                {"trials", trials},
                {"seed", seed}};
    }
};

// Index sets of one round. x_inputs / z_inputs are the test input sets (pairs measured in Z / in X).
struct SetupPartition {
    int m = 0;
    std::vector<int> teleport;        // N_C
    std::vector<Label> labels;        // W over [m], None on N_C
    std::vector<int> x_inputs;        // N_X
    std::vector<int> z_inputs;        // N_Z
    std::vector<std::vector<int>> blocks;

    std::vector<int> with_labels(const std::vector<int>& pool, std::initializer_list<Label> ls) const {
        std::vector<int> out;
        for (int i : pool)
            if (std::find(ls.begin(), ls.end(), labels[static_cast<std::size_t>(i)]) != ls.end()) out.push_back(i);
        return out;
    }

    std::vector<int> complement_of_teleport() const {
        std::vector<int> out;
        for (int i = 0; i < m; ++i)
            if (labels[static_cast<std::size_t>(i)] != Label::None) out.push_back(i);
        return out;
    }

    std::string label_string() const {
        std::string s;
        for (Label l : labels) s += label_char(l);
        return s;
    }
};

namespace detail {

inline std::vector<int> sample_subset(std::vector<int> pool, std::size_t k, Rng& rng) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace detail

// Rejection-samples until both test sets exist and every block can host n gadgets of each kind.
inline SetupPartition sample_partition(const ProtocolConfig& cfg, Rng& rng, int max_tries = 10000) {
    const int n = cfg.n, m = cfg.m();
    static const Label sigma[] = {Label::X, Label::Y, Label::Z, Label::F, Label::G};
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        SetupPartition p;
        p.m = m;
        std::vector<int> all(static_cast<std::size_t>(m));
        std::iota(all.begin(), all.end(), 0);
        p.teleport = detail::sample_subset(all, static_cast<std::size_t>(n), rng);
        p.labels.assign(static_cast<std::size_t>(m), Label::None);
        std::vector<int> rest;
        for (int i = 0; i < m; ++i) {
            if (std::binary_search(p.teleport.begin(), p.teleport.end(), i)) continue;
            p.labels[static_cast<std::size_t>(i)] = sigma[rng() % 5];
            rest.push_back(i);
        }
        auto zs = p.with_labels(rest, {Label::Z});
        auto xs = p.with_labels(rest, {Label::X});
        if (static_cast<int>(zs.size()) < n || static_cast<int>(xs.size()) < n) continue;
        p.x_inputs = detail::sample_subset(zs, static_cast<std::size_t>(n), rng);
        p.z_inputs = detail::sample_subset(xs, static_cast<std::size_t>(n), rng);
        std::vector<int> residual;
        for (int i : rest)
            if (!std::binary_search(p.x_inputs.begin(), p.x_inputs.end(), i) &&
                !std::binary_search(p.z_inputs.begin(), p.z_inputs.end(), i))
                residual.push_back(i);
        std::shuffle(residual.begin(), residual.end(), rng);
        const int layers = cfg.layers();
        const std::size_t size = residual.size() / static_cast<std::size_t>(layers);
        bool ok = size > 0;
        for (int l = 0; l < layers && ok; ++l) {
            std::vector<int> b(residual.begin() + static_cast<std::ptrdiff_t>(l * size),
                               residual.begin() + static_cast<std::ptrdiff_t>((l + 1) * size));
            std::sort(b.begin(), b.end());
            ok = static_cast<int>(p.with_labels(b, {Label::F, Label::G}).size()) >= n &&
                 static_cast<int>(p.with_labels(b, {Label::Z}).size()) >= n &&
                 static_cast<int>(p.with_labels(b, {Label::X, Label::Y}).size()) >= n;
            p.blocks.push_back(std::move(b));
        }
        if (ok) return p;
    }
    throw ConfigError("could not sample a valid partition; increase the block size");
}

// Structural invariants of a partition.
inline bool partition_valid(const SetupPartition& p, int n) {
    std::vector<int> seen(static_cast<std::size_t>(p.m), 0);
    auto mark = [&](const std::vector<int>& v) {
        for (int i : v) seen[static_cast<std::size_t>(i)]++;
    };
    mark(p.teleport);
    mark(p.x_inputs);
    mark(p.z_inputs);
    for (const auto& b : p.blocks) mark(b);
    for (int s : seen)
        if (s > 1) return false;
    if (static_cast<int>(p.teleport.size()) != n || static_cast<int>(p.x_inputs.size()) != n ||
        static_cast<int>(p.z_inputs.size()) != n)
        return false;
    for (int i : p.teleport)
        if (p.labels[static_cast<std::size_t>(i)] != Label::None) return false;
    for (int i : p.x_inputs)
        if (p.labels[static_cast<std::size_t>(i)] != Label::Z) return false;
    for (int i : p.z_inputs)
        if (p.labels[static_cast<std::size_t>(i)] != Label::X) return false;
    for (const auto& b : p.blocks)
        if (b.size() != p.blocks.front().size()) return false;
    return true;
}

enum class TestKind { None, XTest, ZTest, Rigid };

inline std::string to_string(TestKind t) {
    switch (t) {
    case TestKind::XTest: return "xtest";
    case TestKind::ZTest: return "ztest";
    case TestKind::Rigid: return "rigid";
    default: return "none";
    }
}

struct RoundPlan {
    int gamma = 1;  // 0: computation-only run with a final answer check
    int ell = 0;    // 1-based test round when gamma = 1
    TestKind test = TestKind::None;
};

inline RoundPlan sample_plan(const ProtocolConfig& cfg, Rng& rng) {
    RoundPlan r;
    r.gamma = uniform01(rng) < cfg.alpha_value() ? 0 : 1;
    if (r.gamma == 0) return r;
    r.ell = 1 + static_cast<int>(rng() % static_cast<u64>(cfg.queries()));
    const double u = uniform01(rng);
    r.test = u < cfg.p ? TestKind::XTest : (u < 2 * cfg.p ? TestKind::ZTest : TestKind::Rigid);
    return r;
}

} // namespace cvqd::game
