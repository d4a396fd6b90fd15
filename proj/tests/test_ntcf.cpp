#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <set>

#include "cvqd/ntcf.hpp"

using namespace cvqd;
using namespace cvqd::ntcf;

namespace {

// Brute-force preimages of y under f_b, found without the trapdoor.
std::vector<u64> preimages(const ToyNtcfKey& k, int b, u64 y) {
    std::vector<u64> out;
    for (u64 x = 0; x < (u64{1} << k.n()); ++x)
        if (k.f(b, x) == y) out.push_back(x);
    return out;
}

double binomial_sigma(double p, int n) { return std::sqrt(std::max(p * (1 - p), 1e-4) / n); }

class ScriptedProver : public NtcfProver {
public:
    std::string name() const override { return "scripted"; }
    int declared_budget(int, int) const override { return 0; }
    std::vector<u64> commit(const std::vector<ToyNtcfKey>& keys, Rng&) override {
        committed = true;
        keys_ = keys;
        std::vector<u64> ys;
        for (const auto& k : keys) ys.push_back(k.f(0, 1));
        return ys;
    }
    std::optional<u64> respond(int i, int c, Rng&) override {
        EXPECT_TRUE(committed);
        EXPECT_EQ(i, static_cast<int>(seen.size()));
        seen.push_back(c);
        if (c == 0) return pack(0, 1);
        return std::nullopt;
    }
    bool committed = false;
    std::vector<int> seen;

private:
    std::vector<ToyNtcfKey> keys_;
};

} // namespace

TEST(ToyNtcf, ClawStructureExhaustive) {
    Rng rng(11);
    for (int n = 2; n <= 7; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            auto k = gen(n, rng);
            Trapdoor t(k);
            std::set<u64> im0, im1;
            for (u64 x = 0; x < (u64{1} << n); ++x) {
                im0.insert(k.f(0, x));
                im1.insert(k.f(1, x));
                EXPECT_EQ(k.f(0, x), k.f(1, x ^ t.shift()));
                EXPECT_EQ(t.inv(0, k.f(0, x)), x);
                EXPECT_EQ(t.inv(1, k.f(1, x)), x);
            }
            EXPECT_EQ(im0.size(), u64{1} << n);
            EXPECT_EQ(im0, im1);
            for (u64 y = 0; y < (u64{1} << n); ++y) {
                auto [x0, x1] = t.claw(y);
                EXPECT_EQ(preimages(k, 0, y), std::vector<u64>{x0});
                EXPECT_EQ(preimages(k, 1, y), std::vector<u64>{x1});
                EXPECT_NE(x0, x1);
            }
        }
    }
}

TEST(ToyNtcf, CheckAndVerifierPredicate) {
    Rng rng(12);
    auto k = gen(4, rng);
    const u64 y = k.f(1, 5);
    const auto x0 = preimages(k, 0, y).front();
    EXPECT_TRUE(chk(k, 1, 5, y));
    EXPECT_TRUE(chk(k, 0, x0, y));
    EXPECT_FALSE(chk(k, 0, x0 ^ 1, y));
    EXPECT_TRUE(verify_v(k, y, 0, pack(1, 5)));
    EXPECT_FALSE(verify_v(k, y, 0, std::nullopt));
    EXPECT_FALSE(verify_v(k, y, 0, pack(1, 5) | (u64{1} << 10)));
    const u64 s = x0 ^ 5;
    for (u64 e = 0; e < 16; ++e) {
        EXPECT_TRUE(verify_v(k, y, 1, pack(dot2(e, s), e)));
        EXPECT_FALSE(verify_v(k, y, 1, pack(1 - dot2(e, s), e)));
    }
    EXPECT_THROW(ToyNtcfKey(3, "k", 0), std::invalid_argument);
    EXPECT_THROW(ToyNtcfKey(1, "k", 1), ConfigError);
}

TEST(ToyNtcf, ClawStateAfterImageMeasurement) {
    Rng rng(13);
    for (int n = 2; n <= 4; ++n) {
        auto k = gen(n, rng);
        for (int rep = 0; rep < 8; ++rep) {
            auto s = samp_state(k);
            EXPECT_EQ(s.support_size(), u64{1} << (n + 1));
            const u64 y = qsim::bits_to_word(qsim::measure_inplace(s, y_qubits(n), rng));
            const u64 x0 = preimages(k, 0, y).front(), x1 = preimages(k, 1, y).front();
            const u64 hi = y << (n + 1);
            ASSERT_EQ(s.support_size(), 2u);
            EXPECT_NEAR(std::norm(s.amp(hi | pack(0, x0))), 0.5, 1e-12);
            EXPECT_NEAR(std::norm(s.amp(hi | pack(1, x1))), 0.5, 1e-12);
        }
    }
}

TEST(ToyNtcf, HadamardOutcomesSatisfyEquation) {
    Rng rng(14);
    for (int n = 2; n <= 4; ++n) {
        auto k = gen(n, rng);
        for (u64 target = 0; target < (u64{1} << n); ++target) {
            // Post-measurement state for image target, built from the library sampler.
            qsim::SparseState s(1 + 2 * n);
            do {
                s = samp_state(k);
            } while (qsim::bits_to_word(qsim::measure_inplace(s, y_qubits(n), rng)) != target);
            for (int q : bx_qubits(n)) s.apply_1q(qsim::gates::H(), q);
            const u64 x0 = preimages(k, 0, target).front(), x1 = preimages(k, 1, target).front();
            const double scale = 1.0 / (std::sqrt(2.0) * std::pow(2.0, (n + 1) / 2.0));
            for (int u = 0; u <= 1; ++u) {
                for (u64 e = 0; e < (u64{1} << n); ++e) {
                    const double expect = scale * ((dot2(e, x0) ? -1 : 1) + ((u + dot2(e, x1)) % 2 ? -1 : 1));
                    const auto a = s.amp((target << (n + 1)) | pack(u, e));
                    EXPECT_NEAR(a.real(), expect, 1e-10);
                    EXPECT_NEAR(a.imag(), 0.0, 1e-10);
                    if (std::norm(a) > 1e-12) {
                        EXPECT_EQ(u, dot2(e, x0 ^ x1));
                        EXPECT_NEAR(std::norm(a), std::pow(2.0, -n), 1e-10);
                    }
                }
            }
        }
    }
}

TEST(DepthMeter, ChargesAndResets) {
    hybrid::HybridTrace tr(hybrid::SchemeKind::dQC, 4);
    DepthMeter m(4, tr);
    m.charge(3, false);
    EXPECT_EQ(m.remaining(), 1);
    m.charge(1, true);
    EXPECT_EQ(m.used(), 0);
    m.charge(2, false);
    EXPECT_THROW(m.charge(3, false), hybrid::DepthBudgetExceeded);
    EXPECT_EQ(tr.audited_depth(), 4);
}

TEST(Cvqd, HonestAcceptsWithDepthD0PlusD) {
    for (int d = 1; d <= 6; ++d) {
        auto r = run_experiment(d, "honest", 200, 100 + d);
        EXPECT_EQ(r.accept_rate(), 1.0) << "d=" << d;
        EXPECT_EQ(r.audited_depth, kDefaultD0 + d);
    }
    auto r = run_experiment(2, "honest", 50, 7, false, 3, 6);
    EXPECT_EQ(r.audited_depth, 8);
}

TEST(Cvqd, HonestTraceExceedingBudgetAborts) {
    // A budget one short of the honest depth cannot complete the final round.
    class Short : public HonestProver {
    public:
        int declared_budget(int d, int d0) const override { return d0 + d - 1; }
    } p;
    Rng rng(15);
    auto run = run_cvqd(3, p, rng);
    EXPECT_FALSE(run.accepted);
    EXPECT_NE(run.error.find("depth budget"), std::string::npos);
}

TEST(Cvqd, NoisyHonestRate) {
    const double mu = 0.1;
    const int d = 3, trials = 3000;
    auto r = run_experiment(d, "noisy-0.1", trials, 16);
    const double expect = std::pow(1 - mu, d + 1);
    EXPECT_NEAR(r.accept_rate(), expect, 4 * binomial_sigma(expect, trials));
    EXPECT_GE(r.accept_rate(), 1 - (d + 1) * mu - 4 * binomial_sigma(expect, trials));
}

TEST(Cvqd, PreimageOnlyProverRate) {
    const int trials = 4000;
    for (int d = 1; d <= 3; ++d) {
        auto r = run_experiment(d, "preimage-only", trials, 17 + d);
        const double expect = std::pow(0.5, d + 1);
        EXPECT_NEAR(r.accept_rate(), expect, 4 * binomial_sigma(expect, trials)) << "d=" << d;
        EXPECT_EQ(r.audited_depth, 0);
    }
}

TEST(Cvqd, ZeroProverRate) {
    const int trials = 4000, d = 2, n = 3;
    auto r = run_experiment(d, "zero", trials, 21, false, n);
    const double per_round = 0.5 + 0.5 * std::pow(2.0, -n);
    const double expect = std::pow(per_round, d + 1);
    EXPECT_NEAR(r.accept_rate(), expect, 4 * binomial_sigma(expect, trials));
    EXPECT_LT(r.accept_rate(), 0.9);
}

TEST(Cvqd, ResetProverRateAndDepth) {
    const int trials = 3000, d = 4;
    for (int j = 1; j <= 3; ++j) {
        auto r = run_experiment(d, "reset-at-" + std::to_string(j), trials, 30 + j);
        const double expect = std::pow(0.75, d + 1 - j);
        EXPECT_NEAR(r.accept_rate(), expect, 4 * binomial_sigma(expect, trials)) << "j=" << j;
        EXPECT_EQ(r.audited_depth, kDefaultD0 - 1 + j);
        EXPECT_LT(r.audited_depth, kDefaultD0 + d);
    }
}

TEST(Cvqd, ChallengesRevealedSequentiallyAndAbortOnFailure) {
    Rng rng(40);
    for (int rep = 0; rep < 50; ++rep) {
        ScriptedProver p;
        auto run = run_cvqd(5, p, rng);
        EXPECT_EQ(p.seen, run.challenges);
        if (!run.accepted) {
            EXPECT_EQ(run.challenges.back(), 1);
            EXPECT_EQ(static_cast<int>(run.responses.size()), run.rounds_passed + 1);
        } else {
            EXPECT_EQ(run.rounds_passed, 6);
        }
    }
}

TEST(Extractor, InequalityHoldsForEveryProver) {
    for (const std::string name : {"preimage-only", "trapdoor", "reset-at-1", "reset-at-2"}) {
        auto r = run_experiment(2, name, 1500, 50, true);
        EXPECT_GE(r.both_rate() + 1e-12, r.p0() + r.p1() - 1) << name;
        EXPECT_LE(r.both_rate(), std::min(r.p0(), r.p1()) + 1e-12) << name;
    }
}

TEST(Extractor, TrapdoorProverAnswersBothAndPreimageOnlyOne) {
    auto t = run_experiment(3, "trapdoor", 300, 51, true);
    EXPECT_EQ(t.both_rate(), 1.0);
    EXPECT_EQ(t.accept_rate(), 1.0);
    auto p = run_experiment(3, "preimage-only", 300, 52, true);
    EXPECT_EQ(p.p0(), 1.0);
    EXPECT_EQ(p.p1(), 0.0);
    EXPECT_EQ(p.both_rate(), 0.0);
    auto reset = run_experiment(2, "reset-at-1", 2000, 53, true);
    EXPECT_EQ(reset.p0(), 1.0);
    EXPECT_NEAR(reset.p1(), 0.5, 4 * binomial_sigma(0.5, 2000));
}

TEST(Extractor, CoherentProverCannotBeRewound) {
    HonestProver p;
    Rng rng(54);
    EXPECT_THROW(rewind_extract(p, 2, rng), ProtocolError);
}

TEST(Experiment, JobsDoNotChangeResults) {
    auto a = run_experiment(3, "reset-at-2", 400, 60, true, 3, kDefaultD0, 1);
    auto b = run_experiment(3, "reset-at-2", 400, 60, true, 3, kDefaultD0, 4);
    EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(Experiment, ReportJsonAndNames) {
    auto r = run_experiment(1, "trapdoor", 20, 61, true);
    auto j = r.to_json();
    for (const char* key : {"d", "d0", "accept_rate", "audited_depth"}) EXPECT_TRUE(j.contains(key)) << key;
    for (const char* key : {"p0", "p1", "both_valid_rate"}) EXPECT_TRUE(j["extractor"].contains(key)) << key;
    EXPECT_FALSE(run_experiment(1, "honest", 5, 62).to_json().contains("extractor"));
    EXPECT_THROW(prover_factory("oracle"), ConfigError);
    EXPECT_THROW(prover_factory("reset-at-x"), ConfigError);
    EXPECT_THROW(prover_factory("noisy-2"), ConfigError);
    EXPECT_THROW(prover_factory("reset-at-0")(), ConfigError);
}
