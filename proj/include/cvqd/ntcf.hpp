#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "common.hpp"
#include "hybrid.hpp"
#include "oracles/prp.hpp"
#include "qsim.hpp"

namespace cvqd::ntcf {

inline constexpr int kDefaultD0 = 14;

// Toy claw-free pair f_b(x) = Pi(x ^ b s) on n-bit strings. Not claw-free against anyone who
// can invert Pi; the trapdoor is (Pi key, s).
class ToyNtcfKey {
public:
    ToyNtcfKey(int n, std::string perm_key, u64 shift)
        : n_(n), perm_(std::move(perm_key), n), shift_(shift & low_mask(n)) {
        if (n < 2 || n > 30) throw ConfigError("toy NTCF needs 2 <= n <= 30");
        if (shift_ == 0) throw std::invalid_argument("claw shift must be nonzero");
    }

    int n() const { return n_; }
    int response_bits() const { return n_ + 1; }
    u64 f(int b, u64 x) const { return perm_.eval((x ^ (b ? shift_ : 0)) & low_mask(n_)); }

    nlohmann::json public_json() const { return {{"n", n_}, {"perm_key", oracles::fnv1a(perm_.key())}}; }

private:
    friend class Trapdoor;
    int n_;
    oracles::KeyedPermutation perm_;
    u64 shift_;
};

class Trapdoor {
public:
    explicit Trapdoor(const ToyNtcfKey& k) : key_(&k) {}
    u64 shift() const { return key_->shift_; }
    u64 inv(int b, u64 y) const { return key_->perm_.invert(y) ^ (b ? key_->shift_ : 0); }
    // The claw (x0, x1) over y.
    std::pair<u64, u64> claw(u64 y) const { return {inv(0, y), inv(1, y)}; }

private:
    const ToyNtcfKey* key_;
};

inline ToyNtcfKey gen(int n, Rng& rng) {
    u64 s = 0;
    while (s == 0) s = random_bits(rng, n);
    return ToyNtcfKey(n, oracles::key_from_seed(rng()), s);
}

inline bool chk(const ToyNtcfKey& k, int b, u64 x, u64 y) { return k.f(b, x) == y; }

// Responses pack (b, x) or (u, e) as bit 0 = b/u, bits 1..n = x/e.
inline u64 pack(int bit, u64 v) { return static_cast<u64>(bit & 1) | (v << 1); }
inline int head(u64 w) { return static_cast<int>(w & 1); }
inline u64 tail(u64 w) { return w >> 1; }

// Verifier predicate: preimage check for c = 0, equation u = e.(x0 ^ x1) for c = 1. Every e is admissible.
inline bool verify_v(const ToyNtcfKey& k, u64 y, int c, std::optional<u64> w) {
    if (!w || (*w >> k.response_bits()) != 0) return false;
    const int bit = head(*w);
    const u64 v = tail(*w);
    if (c == 0) return chk(k, bit, v, y);
    const Trapdoor t(k);
    const auto [x0, x1] = t.claw(y);
    return dot2(v, x0 ^ x1) == bit;
}

// Coherent-depth counter for a prover whose quantum memory is split over independent instances.
class DepthMeter {
public:
    DepthMeter(int budget, hybrid::HybridTrace& trace) : budget_(budget), trace_(&trace) {}
    int used() const { return used_; }
    int remaining() const { return budget_ - used_; }

    void charge(int layers, bool full_measurement) {
        if (used_ + layers > budget_)
            throw hybrid::DepthBudgetExceeded("quantum depth " + std::to_string(used_ + layers) + " exceeds budget " +
                                              std::to_string(budget_));
        used_ += layers;
        trace_->add_quantum(layers, full_measurement);
        if (full_measurement) used_ = 0;
    }

private:
    int budget_;
    hybrid::HybridTrace* trace_;
    int used_ = 0;
};

// Sum over b, x of |b>|x>|f_b(x)> on 1 + 2n qubits (b = qubit 0, x = 1..n, y = n+1..2n).
inline qsim::SparseState samp_state(const ToyNtcfKey& k) {
    const int n = k.n();
    qsim::SparseState s(1 + 2 * n);
    for (int q = 0; q <= n; ++q) s.apply_1q(qsim::gates::H(), q);
    s.apply_permutation([&](u64 idx) {
        const int b = static_cast<int>(idx & 1);
        const u64 x = (idx >> 1) & low_mask(n);
        const u64 y = idx >> (n + 1);
        return (idx & low_mask(n + 1)) | ((y ^ k.f(b, x)) << (n + 1));
    });
    return s;
}

inline std::vector<int> y_qubits(int n) {
    std::vector<int> q;
    for (int i = 0; i < n; ++i) q.push_back(n + 1 + i);
    return q;
}

inline std::vector<int> bx_qubits(int n) {
    std::vector<int> q;
    for (int i = 0; i <= n; ++i) q.push_back(i);
    return q;
}

// Classical information a reset-style prover keeps after destroying its coherence.
struct ClassicalState {
    std::vector<std::optional<u64>> preimages;  // packed (b, x) per instance, when known
};

class NtcfProver {
public:
    virtual ~NtcfProver() = default;
    virtual std::string name() const = 0;
    virtual int declared_budget(int d, int d0) const = 0;
    virtual void start(int d, int d0) {
        trace_ = hybrid::HybridTrace(hybrid::SchemeKind::dQC, declared_budget(d, d0));
    }
    // Phase 2: images y_1..y_{d+1}.
    virtual std::vector<u64> commit(const std::vector<ToyNtcfKey>& keys, Rng& rng) = 0;
    // Phase 3: response to challenge c for instance i (0-based); nullopt means no answer.
    virtual std::optional<u64> respond(int i, int c, Rng& rng) = 0;
    // Classical state after the reset, for rewinding.
    virtual std::optional<ClassicalState> snapshot() const { return std::nullopt; }
    virtual std::optional<u64> respond_from(const ClassicalState& st, int i, int c, Rng& rng) const {
        return classical_response(st, i, c, rng);
    }
    const hybrid::HybridTrace& trace() const { return trace_; }

protected:
    static std::optional<u64> classical_response(const ClassicalState& st, int i, int c, Rng& rng) {
        const auto& pre = st.preimages.at(static_cast<std::size_t>(i));
        if (!pre) return std::nullopt;
        if (c == 0) return *pre;
        // Equation guess: random u with e the stored x.
        return pack(coin(rng), tail(*pre));
    }

    hybrid::HybridTrace trace_{hybrid::SchemeKind::dQC, 0};
};

// Prepares the claw states, measures every y, then measures instance i in the challenge basis.
class HonestProver : public NtcfProver {
public:
    std::string name() const override { return "honest"; }
    int declared_budget(int d, int d0) const override { return d0 + d; }

    std::vector<u64> commit(const std::vector<ToyNtcfKey>& keys, Rng& rng) override {
        meter_.emplace(trace_.budget(), trace_);
        n_ = keys.front().n();
        states_.clear();
        std::vector<u64> ys;
        for (const auto& k : keys) states_.push_back(samp_state(k));
        // Constant-depth preparation and the image measurement are charged d0 - 1 layers.
        meter_->charge(d0_ - 1, false);
        for (auto& s : states_) ys.push_back(qsim::bits_to_word(qsim::measure_inplace(s, y_qubits(n_), rng)));
        return ys;
    }

    void start(int d, int d0) override {
        NtcfProver::start(d, d0);
        d0_ = d0;
        d_ = d;
    }

    std::optional<u64> respond(int i, int c, Rng& rng) override {
        auto& s = states_.at(static_cast<std::size_t>(i));
        const bool last = i == d_;
        meter_->charge(1, last);
        if (c == 1)
            for (int q : bx_qubits(n_)) s.apply_1q(qsim::gates::H(), q);
        const u64 w = qsim::bits_to_word(qsim::measure_inplace(s, bx_qubits(n_), rng));
        return w;
    }

protected:
    int n_ = 0, d0_ = kDefaultD0, d_ = 0;
    std::vector<qsim::SparseState> states_;
    std::optional<DepthMeter> meter_;
};

// Honest prover whose response is corrupted with probability mu in each round.
class NoisyProver : public HonestProver {
public:
    explicit NoisyProver(double mu) : mu_(mu) {}
    std::string name() const override { return "noisy"; }
    std::optional<u64> respond(int i, int c, Rng& rng) override {
        auto w = HonestProver::respond(i, c, rng);
        if (uniform01(rng) < mu_) return std::nullopt;
        return w;
    }

private:
    double mu_;
};

// Commits uniformly random images and answers all-zero responses.
class ZeroProver : public NtcfProver {
public:
    std::string name() const override { return "zero"; }
    int declared_budget(int, int) const override { return 0; }
    std::vector<u64> commit(const std::vector<ToyNtcfKey>& keys, Rng& rng) override {
        std::vector<u64> ys;
        for (const auto& k : keys) ys.push_back(random_bits(rng, k.n()));
        return ys;
    }
    std::optional<u64> respond(int, int, Rng&) override { return 0; }
};

// Classical: evaluates f on random preimages and answers only the preimage challenge.
class PreimageOnlyProver : public NtcfProver {
public:
    std::string name() const override { return "preimage-only"; }
    int declared_budget(int, int) const override { return 0; }
    std::vector<u64> commit(const std::vector<ToyNtcfKey>& keys, Rng& rng) override {
        state_.preimages.clear();
        std::vector<u64> ys;
        for (const auto& k : keys) {
            const int b = coin(rng);
            const u64 x = random_bits(rng, k.n());
            state_.preimages.push_back(pack(b, x));
            ys.push_back(k.f(b, x));
        }
        trace_.add_classical("evaluate f");
        return ys;
    }
    std::optional<u64> respond(int i, int c, Rng&) override {
        if (c == 1) return std::nullopt;
        return state_.preimages.at(static_cast<std::size_t>(i));
    }
    std::optional<ClassicalState> snapshot() const override { return state_; }
    std::optional<u64> respond_from(const ClassicalState& st, int i, int c, Rng&) const override {
        if (c == 1) return std::nullopt;
        return st.preimages.at(static_cast<std::size_t>(i));
    }

private:
    ClassicalState state_;
};

// Honest until it receives challenge j (1-based); it answers round j, measures every remaining
// instance in the standard basis and continues classically, guessing equations at random.
class ResetProver : public HonestProver {
public:
    explicit ResetProver(int j) : j_(j) {
        if (j < 1) throw ConfigError("reset round must be at least 1");
    }
    std::string name() const override { return "reset-at-" + std::to_string(j_); }
    int declared_budget(int, int d0) const override { return d0 - 1 + j_; }

    std::optional<u64> respond(int i, int c, Rng& rng) override {
        if (classical_) return classical_response(*classical_, i, c, rng);
        auto& s = states_.at(static_cast<std::size_t>(i));
        const bool reset = i + 1 == j_;
        meter_->charge(1, reset || i == d_);
        if (c == 1)
            for (int q : bx_qubits(n_)) s.apply_1q(qsim::gates::H(), q);
        const u64 w = qsim::bits_to_word(qsim::measure_inplace(s, bx_qubits(n_), rng));
        if (reset) {
            ClassicalState st;
            st.preimages.assign(states_.size(), std::nullopt);
            for (std::size_t k = static_cast<std::size_t>(i) + 1; k < states_.size(); ++k)
                st.preimages[k] = qsim::bits_to_word(qsim::measure_inplace(states_[k], bx_qubits(n_), rng));
            classical_ = std::move(st);
            trace_.add_classical("reset");
        }
        return w;
    }

    std::optional<ClassicalState> snapshot() const override { return classical_; }

private:
    int j_;
    std::optional<ClassicalState> classical_;
};

// Knows every claw shift (the toy family's trapdoor); answers both challenges classically.
class TrapdoorProver : public NtcfProver {
public:
    std::string name() const override { return "trapdoor"; }
    int declared_budget(int, int) const override { return 0; }
    std::vector<u64> commit(const std::vector<ToyNtcfKey>& keys, Rng& rng) override {
        shifts_.clear();
        state_.preimages.clear();
        std::vector<u64> ys;
        for (const auto& k : keys) {
            const int b = coin(rng);
            const u64 x = random_bits(rng, k.n());
            state_.preimages.push_back(pack(b, x));
            shifts_.push_back(Trapdoor(k).shift());
            ys.push_back(k.f(b, x));
        }
        n_ = keys.front().n();
        trace_.add_classical("evaluate f with trapdoor");
        return ys;
    }
    std::optional<u64> respond(int i, int c, Rng& rng) override { return answer(state_, i, c, rng); }
    std::optional<ClassicalState> snapshot() const override { return state_; }
    std::optional<u64> respond_from(const ClassicalState& st, int i, int c, Rng& rng) const override {
        return answer(st, i, c, rng);
    }

private:
    std::optional<u64> answer(const ClassicalState& st, int i, int c, Rng& rng) const {
        if (c == 0) return st.preimages.at(static_cast<std::size_t>(i));
        const u64 e = random_bits(rng, n_);
        return pack(dot2(e, shifts_.at(static_cast<std::size_t>(i))), e);
    }

    int n_ = 0;
    std::vector<u64> shifts_;
    ClassicalState state_;
};

using ProverFactory = std::function<std::unique_ptr<NtcfProver>()>;

// Names: honest, zero, preimage-only, trapdoor, reset-at-<j>, noisy-<mu>.
inline ProverFactory prover_factory(const std::string& name) {
    if (name == "honest") return [] { return std::make_unique<HonestProver>(); };
    if (name == "zero") return [] { return std::make_unique<ZeroProver>(); };
    if (name == "preimage-only") return [] { return std::make_unique<PreimageOnlyProver>(); };
    if (name == "trapdoor") return [] { return std::make_unique<TrapdoorProver>(); };
    const std::string reset = "reset-at-", noisy = "noisy-";
    try {
        if (name.rfind(reset, 0) == 0) {
            const int j = std::stoi(name.substr(reset.size()));
            return [j] { return std::make_unique<ResetProver>(j); };
        }
        if (name.rfind(noisy, 0) == 0) {
            const double mu = std::stod(name.substr(noisy.size()));
            if (!(mu >= 0 && mu <= 1)) throw ConfigError("noise rate must lie in [0, 1]");
            return [mu] { return std::make_unique<NoisyProver>(mu); };
        }
    } catch (const std::logic_error&) {
        throw ConfigError("malformed prover name '" + name + "'");
    }
    throw ConfigError("unknown NTCF prover '" + name + "'");
}

struct CvqdRun {
    int d = 0;
    int d0 = kDefaultD0;
    std::vector<ToyNtcfKey> keys;
    std::vector<u64> ys;
    std::vector<int> challenges;
    std::vector<std::optional<u64>> responses;
    bool accepted = false;
    int rounds_passed = 0;
    int audited_depth = 0;
    std::string error;

    nlohmann::json to_json() const {
        nlohmann::json ws = nlohmann::json::array();
        for (const auto& w : responses) ws.push_back(w ? nlohmann::json(*w) : nlohmann::json(nullptr));
        nlohmann::json j = {{"d", d},           {"d0", d0},         {"y", ys},
                            {"c", challenges},  {"w", ws},          {"accepted", accepted},
                            {"rounds_passed", rounds_passed}, {"audited_depth", audited_depth}};
        if (!error.empty()) j["error"] = error;
        return j;
    }
};

// d+1 keys, committed images, then challenges revealed one at a time; reject at the first failure.
inline CvqdRun run_cvqd(int d, NtcfProver& p, Rng& rng, int n = 3, int d0 = kDefaultD0) {
    if (d < 0) throw ConfigError("d must be nonnegative");
    if (d0 < 1) throw ConfigError("d0 must be positive");
    CvqdRun run;
    run.d = d;
    run.d0 = d0;
    for (int i = 0; i <= d; ++i) run.keys.push_back(gen(n, rng));
    try {
        p.start(d, d0);
        run.ys = p.commit(run.keys, rng);
        if (static_cast<int>(run.ys.size()) != d + 1) throw ProtocolError("prover committed the wrong number of images");
        run.accepted = true;
        for (int i = 0; i <= d; ++i) {
            const int c = coin(rng);
            run.challenges.push_back(c);
            auto w = p.respond(i, c, rng);
            run.responses.push_back(w);
            if (!verify_v(run.keys[static_cast<std::size_t>(i)], run.ys[static_cast<std::size_t>(i)], c, w)) {
                run.accepted = false;
                break;
            }
            run.rounds_passed++;
        }
    } catch (const hybrid::DepthBudgetExceeded& e) {
        run.accepted = false;
        run.error = std::string("depth budget exceeded: ") + e.what();
    }
    run.audited_depth = p.trace().audited_depth();
    return run;
}

struct Extraction {
    u64 y = 0;
    std::optional<u64> w0, w1;
    bool valid0 = false;
    bool valid1 = false;
    bool both_valid = false;
};

// Runs the prover through rounds 1..d with random challenges, then replays the last round from its
// classical state under both challenge values.
inline Extraction rewind_extract(NtcfProver& p, int d, Rng& rng, int n = 3, int d0 = kDefaultD0) {
    std::vector<ToyNtcfKey> keys;
    for (int i = 0; i <= d; ++i) keys.push_back(gen(n, rng));
    p.start(d, d0);
    auto ys = p.commit(keys, rng);
    for (int i = 0; i < d; ++i) p.respond(i, coin(rng), rng);
    auto st = p.snapshot();
    if (!st) throw ProtocolError("prover does not expose a classical state to rewind");
    Extraction ex;
    ex.y = ys.at(static_cast<std::size_t>(d));
    ex.w0 = p.respond_from(*st, d, 0, rng);
    ex.w1 = p.respond_from(*st, d, 1, rng);
    const auto& k = keys[static_cast<std::size_t>(d)];
    ex.valid0 = verify_v(k, ex.y, 0, ex.w0);
    ex.valid1 = verify_v(k, ex.y, 1, ex.w1);
    ex.both_valid = ex.valid0 && ex.valid1;
    return ex;
}

struct NtcfReport {
    int d = 0;
    int d0 = kDefaultD0;
    int n = 3;
    std::string prover;
    int trials = 0;
    int accepted = 0;
    int audited_depth = 0;
    bool extracted = false;
    int valid0 = 0, valid1 = 0, both = 0;

    double accept_rate() const { return trials ? static_cast<double>(accepted) / trials : 0.0; }
    double p0() const { return trials ? static_cast<double>(valid0) / trials : 0.0; }
    double p1() const { return trials ? static_cast<double>(valid1) / trials : 0.0; }
    double both_rate() const { return trials ? static_cast<double>(both) / trials : 0.0; }

    nlohmann::json to_json() const {
        nlohmann::json j = {{"d", d},
                            {"d0", d0},
                            {"n", n},
                            {"prover", prover},
                            {"trials", trials},
                            {"accept_rate", accept_rate()},
                            {"audited_depth", audited_depth}};
        if (extracted) j["extractor"] = {{"p0", p0()}, {"p1", p1()}, {"both_valid_rate", both_rate()}};
        return j;
    }
};

// Trials of run_cvqd (and optionally the extractor), one stream per trial, optionally threaded.
inline NtcfReport run_experiment(int d, const std::string& prover, int trials, u64 seed, bool extract = false,
                                 int n = 3, int d0 = kDefaultD0, int jobs = 1) {
    if (trials < 1) throw ConfigError("trials must be positive");
    auto factory = prover_factory(prover);
    struct Slot {
        bool accepted = false;
        int depth = 0;
        std::optional<Extraction> ex;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) {
            Rng rng = stream_rng(seed, static_cast<u64>(t));
            auto p = factory();
            auto run = run_cvqd(d, *p, rng, n, d0);
            auto& s = slots[static_cast<std::size_t>(t)];
            s.accepted = run.accepted;
            s.depth = run.audited_depth;
            if (extract) {
                auto q = factory();
                s.ex = rewind_extract(*q, d, rng, n, d0);
            }
        }
    };
    const int j = std::max(1, std::min(jobs, trials));
    if (j == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < j; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    NtcfReport r;
    r.d = d;
    r.d0 = d0;
    r.n = n;
    r.prover = prover;
    r.trials = trials;
    r.extracted = extract;
    for (const auto& s : slots) {
        r.accepted += s.accepted;
        r.audited_depth = std::max(r.audited_depth, s.depth);
        if (s.ex) {
            r.valid0 += s.ex->valid0;
            r.valid1 += s.ex->valid1;
            r.both += s.ex->both_valid;
        }
    }
    return r;
}

} // namespace cvqd::ntcf
