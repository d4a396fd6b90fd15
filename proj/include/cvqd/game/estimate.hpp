#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "../common.hpp"
#include "protocol.hpp"

namespace cvqd::game {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

inline Interval wilson_interval(int successes, int trials, double z = 1.96) {
    if (trials <= 0) return {};
    const double n = trials, ph = successes / n, z2 = z * z;
    const double centre = (ph + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct Tally {
    int runs = 0;
    int accepted = 0;
    double rate() const { return runs ? static_cast<double>(accepted) / runs : 0.0; }
};

struct AcceptanceEstimate {
    int trials = 0;
    int accepted = 0;
    Interval ci;
    std::map<std::string, Tally> by_branch;  // "answer", "xtest", "ztest", "rigid"
    int max_audited_depth = 0;
    int errors = 0;
    int repeat = 1;

    double p_hat() const { return trials ? static_cast<double>(accepted) / trials : 0.0; }

    nlohmann::json to_json() const {
        nlohmann::json br = nlohmann::json::object();
        for (const auto& [k, t] : by_branch) br[k] = {{"runs", t.runs}, {"accepted", t.accepted}, {"rate", t.rate()}};
        return {{"trials", trials},
                {"accepted", accepted},
                {"accept_rate", p_hat()},
                {"ci95", {ci.lo, ci.hi}},
                {"branches", br},
                {"audited_depth", max_audited_depth},
                {"errors", errors},
                {"repeat", repeat}};
    }
};

struct EstimateOptions {
    int jobs = 1;
    int repeat = 1;                        // sequential repetition: accept iff every instance accepts
    std::optional<int> gamma;              // force the branch
    std::optional<TestKind> test;          // force the test (implies gamma = 1)
    int width_factor = 0;
};

// Default repetition count ceil(alpha^-2 (ln lambda)^2) with lambda = n.
inline int default_repetitions(const ProtocolConfig& cfg) {
    const double a = cfg.alpha_value(), l = std::log(static_cast<double>(std::max(cfg.n, 2)));
    return static_cast<int>(std::ceil(l * l / (a * a)));
}

struct InstanceOutcome {
    bool accepted = false;
    std::string branch;
    int audited_depth = 0;
    bool error = false;
};

inline RoundPlan forced_plan(const ProtocolConfig& cfg, const EstimateOptions& opts, Rng& rng) {
    RoundPlan plan = sample_plan(cfg, rng);
    if (opts.test) {
        plan.gamma = 1;
        plan.test = *opts.test;
        if (plan.ell == 0) plan.ell = 1 + static_cast<int>(rng() % static_cast<u64>(cfg.queries()));
    } else if (opts.gamma) {
        plan.gamma = *opts.gamma;
        if (plan.gamma == 0) {
            plan.ell = 0;
            plan.test = TestKind::None;
        } else if (plan.test == TestKind::None) {
            plan = sample_plan(cfg, rng);
            while (plan.gamma == 0) plan = sample_plan(cfg, rng);
        }
    }
    return plan;
}

// One protocol instance on a freshly sampled oracle, from its own stream.
inline QueryResult run_instance_full(const ProtocolConfig& cfg, const ProverAFactory& fa, const ProverOFactory& fo,
                                     const EstimateOptions& opts, u64 stream, bool record,
                                     nlohmann::json* transcript = nullptr) {
    Rng rng = stream_rng(cfg.seed, stream);
    auto oracle = sample_query_oracle(cfg.solver, cfg.n, cfg.d, cfg.oracle_mode, rng, opts.width_factor);
    auto a = fa();
    auto o = fo();
    QueryOptions qo;
    qo.plan = forced_plan(cfg, opts, rng);
    qo.record = record;
    auto r = run_query_protocol(cfg, *a, *o, oracle, rng, qo);
    if (transcript) {
        *transcript = transcript_json(cfg, cfg.seed, r, *a);
        (*transcript)["stream"] = stream;
        (*transcript)["oracle"] = oracle.shuffling().descriptor();
    }
    return r;
}

inline InstanceOutcome run_instance(const ProtocolConfig& cfg, const ProverAFactory& fa, const ProverOFactory& fo,
                                    const EstimateOptions& opts, u64 stream) {
    auto r = run_instance_full(cfg, fa, fo, opts, stream, false);
    InstanceOutcome out;
    out.accepted = r.accepted;
    out.branch = r.plan.gamma ? to_string(r.plan.test) : "answer";
    out.audited_depth = r.audited_depth;
    out.error = !r.error.empty();
    return out;
}

// Recorded transcript of the instance that estimate_acceptance runs on the given stream.
inline nlohmann::json instance_transcript(const ProtocolConfig& cfg, const ProverAFactory& fa, const ProverOFactory& fo,
                                          const EstimateOptions& opts, u64 stream) {
    nlohmann::json j;
    run_instance_full(cfg, fa, fo, opts, stream, true, &j);
    return j;
}

// Acceptance over independent trials; trial t uses streams t*repeat .. t*repeat+repeat-1,
// so the result does not depend on the job count.
inline AcceptanceEstimate estimate_acceptance(const ProtocolConfig& cfg, const ProverAFactory& fa,
                                              const ProverOFactory& fo, int trials,
                                              const EstimateOptions& opts = {}) {
    cfg.validate();
    if (trials < 1) throw ConfigError("trials must be positive");
    if (opts.repeat < 1) throw ConfigError("repeat must be positive");
    std::vector<std::vector<InstanceOutcome>> results(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) {
            auto& slot = results[static_cast<std::size_t>(t)];
            for (int r = 0; r < opts.repeat; ++r) {
                slot.push_back(run_instance(cfg, fa, fo, opts, static_cast<u64>(t) * opts.repeat + r));
                if (!slot.back().accepted) break;
            }
        }
    };
    const int jobs = std::max(1, std::min(opts.jobs, trials));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    AcceptanceEstimate est;
    est.trials = trials;
    est.repeat = opts.repeat;
    for (const auto& slot : results) {
        bool all = true;
        for (const auto& inst : slot) {
            all = all && inst.accepted;
            auto& b = est.by_branch[inst.branch];
            b.runs++;
            b.accepted += inst.accepted;
            est.max_audited_depth = std::max(est.max_audited_depth, inst.audited_depth);
            est.errors += inst.error;
        }
        est.accepted += all;
    }
    est.ci = wilson_interval(est.accepted, est.trials);
    return est;
}

struct StrategyReport {
    std::string prover_a;
    std::string prover_o;
    AcceptanceEstimate estimate;
};

struct Cvqd2Report {
    ProtocolConfig config;
    int honest_depth = 0;
    std::vector<StrategyReport> strategies;

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : strategies) {
            auto j = s.estimate.to_json();
            j["prover_a"] = s.prover_a;
            j["prover_o"] = s.prover_o;
            arr.push_back(j);
        }
        return {{"config", config.to_json()}, {"honest_audited_depth", honest_depth}, {"strategies", arr}};
    }
};

// Separation run: honest provers against the listed strategies, q fixed by the solver kind.
inline Cvqd2Report run_cvqd2(ProtocolConfig cfg, const std::vector<std::pair<std::string, std::string>>& strategies,
                             int trials, const EstimateOptions& opts = {}) {
    const int expect = cfg.solver == SolverKind::InPlace ? cfg.d + 1 : 2 * cfg.d + 1;
    if (cfg.q != 0 && cfg.q != expect)
        throw ConfigError("q must equal " + std::to_string(expect) + " for the " + to_string(cfg.solver) + " solver");
    cfg.q = expect;
    cfg.validate();
    Cvqd2Report rep;
    rep.config = cfg;
    for (const auto& [sa, so] : strategies) {
        StrategyReport s{sa, so, estimate_acceptance(cfg, prover_a_factory(sa, cfg.d), prover_o_factory(so), trials, opts)};
        if (sa == "honest" && so == "honest") rep.honest_depth = s.estimate.max_audited_depth;
        rep.strategies.push_back(std::move(s));
    }
    return rep;
}

} // namespace cvqd::game
