#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "cvqd/oracles.hpp"
#include "cvqd/qsim.hpp"

using namespace cvqd;
using namespace cvqd::oracles;

TEST(Prp, FeistelInvertsExhaustively) {
    for (int w : {1, 5, 8}) {
        KeyedPermutation p("key-" + std::to_string(w), w);
        std::set<u64> seen;
        for (u64 x = 0; x < (u64{1} << w); ++x) {
            const u64 y = p.eval(x);
            EXPECT_LT(y, u64{1} << w);
            EXPECT_EQ(p.invert(y), x);
            seen.insert(y);
        }
        EXPECT_EQ(seen.size(), std::size_t{1} << w);
    }
}

TEST(Prp, DifferentKeysGiveDifferentPermutations) {
    KeyedPermutation a("alpha", 16), b("beta", 16);
    int same = 0;
    for (u64 x = 0; x < 256; ++x) same += a.eval(x) == b.eval(x);
    EXPECT_LT(same, 4);
    EXPECT_THROW(a.eval(u64{1} << 16), std::invalid_argument);
}

TEST(Prp, TableLimit) {
    Rng rng(1);
    EXPECT_THROW(Permutation::random_table(kExactTableLimit + 1, rng), CapacityError);
}

TEST(Simon, TwoToOneWithShift) {
    Rng rng(7);
    for (int n : {2, 3, 5, 6}) {
        auto f = sample_simon(n, rng);
        const u64 s = f.shift();
        ASSERT_NE(s, 0u);
        std::map<u64, std::vector<u64>> fibres;
        for (u64 x = 0; x < (u64{1} << n); ++x) {
            EXPECT_EQ(f.eval(x), f.eval(x ^ s));
            fibres[f.eval(x)].push_back(x);
        }
        EXPECT_EQ(fibres.size(), std::size_t{1} << (n - 1));
        for (const auto& [v, xs] : fibres) {
            ASSERT_EQ(xs.size(), 2u);
            EXPECT_EQ(xs[0] ^ xs[1], s);
            auto h = f.preimage_in_subgroup(v);
            ASSERT_TRUE(h.has_value());
            EXPECT_TRUE(f.subgroup().in_subgroup(*h));
        }
        EXPECT_TRUE(is_simon_function(f));
    }
}

TEST(Simon, SubgroupSplitsEachPair) {
    const int n = 4;
    for (u64 s = 1; s < 16; ++s) {
        SubgroupEmbedding e(n, s);
        int count = 0;
        for (u64 x = 0; x < 16; ++x) {
            EXPECT_NE(e.in_subgroup(x), e.in_subgroup(x ^ s));
            count += e.in_subgroup(x);
        }
        EXPECT_EQ(count, 8);
    }
}

TEST(Simon, ShiftIsUniform) {
    // chi-square over the 63 nonzero shifts at n = 6
    Rng rng(2024);
    const int n = 6, trials = 63 * 200;
    std::vector<int> counts(64, 0);
    for (int t = 0; t < trials; ++t) counts[sample_shift(n, rng)]++;
    EXPECT_EQ(counts[0], 0);
    double chi = 0.0;
    const double expect = trials / 63.0;
    for (int s = 1; s < 64; ++s) chi += (counts[s] - expect) * (counts[s] - expect) / expect;
    // 62 degrees of freedom; p = 0.001 critical value is about 100.9
    EXPECT_LT(chi, 100.9);
}

TEST(Simon, SolverRecoversShift) {
    const int n = 5;
    const u64 s = 0b10110;
    std::vector<u64> ys;
    for (u64 y = 0; y < 32; ++y)
        if (!parity(y & s)) ys.push_back(y);
    auto got = solve_simon(ys, n);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(*got, s);
    EXPECT_FALSE(solve_simon({0b00011}, n).has_value());
}

TEST(Simon, DropPivotEmbeddingIsTwoToOne) {
    const int n = 5;
    const u64 s = 0b01101;
    auto f = pseudorandom_simon(std::string("k"), s, n, n - 1);
    std::set<u64> values;
    for (u64 x = 0; x < 32; ++x) {
        EXPECT_EQ(f.eval(x), f.eval(x ^ s));
        EXPECT_LT(f.eval(x), u64{1} << (n - 1));
        values.insert(f.eval(x));
    }
    EXPECT_EQ(values.size(), 16u);
}

TEST(Shuffling, CompositionMatchesSimonOnInputs) {
    Rng rng(3);
    auto f = sample_simon(3, rng);
    auto g = sample_shuffling(f, 2, rng, OracleMode::Exact);
    EXPECT_EQ(g.width(), 12);
    for (u64 x = 0; x < 8; ++x) {
        // independent route: chain the level tables by hand
        const u64 y = g.eval_level(1, g.eval_level(0, x));
        auto v = g.eval_final(y);
        ASSERT_TRUE(v.has_value());
        EXPECT_EQ(*v, f.eval(x));
        EXPECT_EQ(*g.eval_chain(x), f.eval(x));
    }
}

TEST(Shuffling, BottomOffHiddenSet) {
    Rng rng(4);
    auto f = sample_simon(3, rng);
    auto g = sample_shuffling(f, 2, rng, OracleMode::Exact);
    std::set<u64> hidden;
    for (u64 x = 0; x < 8; ++x) hidden.insert(g.embed(x));
    int bottoms = 0;
    for (u64 y = 0; y < (u64{1} << g.width()); ++y) {
        const bool in = hidden.count(y) > 0;
        EXPECT_EQ(g.eval_final(y).has_value(), in);
        bottoms += !in;
    }
    EXPECT_EQ(bottoms, (1 << 12) - 8);
}

TEST(Shuffling, PrpModeAndDescriptor) {
    Rng rng(5);
    auto f = sample_simon(8, rng);
    auto g = sample_shuffling(f, 3, rng, OracleMode::Prp);
    EXPECT_EQ(g.width(), 40);
    for (u64 x = 0; x < 256; x += 17) EXPECT_EQ(*g.eval_chain(x), f.eval(x));
    auto j = g.descriptor();
    EXPECT_EQ(j["mode"], "prp");
    EXPECT_EQ(j["d"], 3);
    EXPECT_EQ(j["shift_commitment"].get<std::string>(), shift_commitment(f.shift(), g.seed()));
    EXPECT_FALSE(j.contains("domain_width"));
    EXPECT_THROW(sample_shuffling(f, 3, rng, OracleMode::Exact), CapacityError);
    EXPECT_THROW(parse_mode("fast"), ConfigError);
}

namespace {

InPlaceShufflingOracle small_inplace(u64 seed, int n = 3, int d = 2, int factor = 0) {
    Rng rng(seed);
    auto f = sample_simon(n, rng);
    return build_inplace(sample_shuffling(f, d, rng, OracleMode::Exact, factor));
}

} // namespace

TEST(InPlace, FinalLevelIsBijectionAt13Bits) {
    auto o = small_inplace(11);
    ASSERT_EQ(o.final_width(), 13);
    const u64 size = u64{1} << 13;
    std::vector<char> hit(size, 0);
    for (u64 w = 0; w < size; ++w) {
        const u64 v = o.eval(2, w);
        ASSERT_LT(v, size);
        EXPECT_FALSE(hit[v]);
        hit[v] = 1;
        EXPECT_EQ(o.invert(2, v), w);
    }
}

TEST(InPlace, FinalLevelOnHiddenSet) {
    auto o = small_inplace(12);
    const auto& f = o.base().simon();
    const int m = f.m();
    for (u64 x = 0; x < 8; ++x) {
        const u64 y = o.base().embed(x);
        for (u64 b = 0; b < 2; ++b) {
            const u64 out = o.eval(2, y | (b << o.width()));
            EXPECT_EQ(out & low_mask(m), f.eval(x));
            EXPECT_EQ((out >> m) & 1u, b);
            EXPECT_EQ((out & low_mask(o.width())) >> (m + 1), 0u);
            const u64 flag = out >> o.width();
            // the flag flips exactly for preimages in the subgroup half
            EXPECT_EQ(flag ^ b, f.subgroup().in_subgroup(x) ? 1u : 0u);
        }
    }
}

TEST(InPlace, TwoQueryRouteMatchesDirect) {
    Rng rng(13);
    auto p = Permutation::random_table(4, rng);
    for (u64 x = 0; x < 16; ++x) {
        auto a = qsim::SparseState::basis(8, x);
        auto b = a;
        inplace_from_standard(a, p, {0, 4}, {4, 4});
        apply_inplace(b, [&](u64 v) { return p.eval(v); }, {0, 4});
        EXPECT_EQ(a.sorted_keys(), b.sorted_keys());
        EXPECT_EQ(a.sorted_keys().front(), p.eval(x));
    }
    // superposition route
    qsim::StateVector d(8);
    for (int q = 0; q < 4; ++q) d.apply_1q(qsim::gates::H(), q);
    auto s = qsim::SparseState::from_dense(d);
    auto t = s;
    inplace_from_standard(s, p, {0, 4}, {4, 4});
    apply_inplace(t, [&](u64 v) { return p.eval(v); }, {0, 4});
    EXPECT_LT(qsim::distance_up_to_phase(s.to_dense(), t.to_dense()), 1e-12);
    auto dirty = qsim::SparseState::basis(8, 0x10);
    EXPECT_THROW(inplace_from_standard(dirty, p, {0, 4}, {4, 4}), std::invalid_argument);
    EXPECT_THROW(apply_standard_oracle(dirty, [](u64 v) { return v; }, {0, 4}, {3, 4}), std::invalid_argument);
}

TEST(InPlace, ApplyLevelsOnRegisters) {
    auto o = small_inplace(14);
    qsim::SparseState s(o.solver_qubits());
    for (int q = 0; q < o.n(); ++q) s.apply_1q(qsim::gates::H(), q);
    for (int i = 0; i <= o.d(); ++i) o.apply_level(s, i);
    EXPECT_EQ(s.support_size(), 8u);
    const auto& f = o.base().simon();
    for (const auto& [k, v] : s.support()) {
        const u64 x = o.x_register().get(k);
        const u64 work = o.work_register().get(k);
        EXPECT_EQ(work & low_mask(f.m()), f.eval(x));
        EXPECT_NEAR(std::abs(v), 1.0 / std::sqrt(8.0), 1e-12);
        EXPECT_EQ(k >> o.flag_qubit(), f.subgroup().in_subgroup(x) ? 1u : 0u);
    }
}

TEST(Shadow, AgreesOffHiddenSetAndStaysBijective) {
    auto o = small_inplace(15);
    Rng rng(99);
    std::vector<u64> pts;
    for (u64 x = 0; x < 8; ++x) pts.push_back(o.base().eval_level(0, x));
    auto g = shadow_oracle(o, {1, pts}, rng);
    std::set<u64> hidden(pts.begin(), pts.end());
    std::set<u64> images;
    int moved = 0;
    for (u64 w = 0; w < (u64{1} << o.width()); ++w) {
        const u64 v = g.eval(1, w);
        images.insert(v);
        EXPECT_EQ(g.invert(1, v), w);
        if (!hidden.count(w)) EXPECT_EQ(v, o.eval(1, w));
        else moved += v != o.eval(1, w);
    }
    EXPECT_EQ(images.size(), std::size_t{1} << o.width());
    EXPECT_GT(moved, 0);
}

TEST(Shadow, FinalLevelShadowBreaksShift) {
    auto o = small_inplace(16);
    Rng rng(5);
    std::vector<u64> pts;
    for (u64 x = 0; x < 8; ++x) pts.push_back(o.base().embed(x));
    auto g = shadow_oracle(o, {o.d(), pts}, rng);
    const auto& f = o.base().simon();
    int broken = 0;
    for (u64 x = 0; x < 8; ++x) {
        const u64 y = o.base().embed(x);
        for (u64 b = 0; b < 2; ++b) {
            const u64 w = y | (b << o.width());
            const u64 v = g.eval(o.d(), w);
            EXPECT_EQ(g.invert(o.d(), v), w);
            broken += (v & low_mask(f.m())) != f.eval(x) || ((v >> f.m()) & 1u) != b;
        }
    }
    EXPECT_GT(broken, 0);
    EXPECT_TRUE(g.has_overrides());
    EXPECT_FALSE(shadow_oracle(o, {1, {}}, rng).has_overrides());
    EXPECT_THROW(shadow_oracle(o, {1, {pts[0], pts[0]}}, rng), std::invalid_argument);
    EXPECT_THROW(shadow_oracle(o, {3, pts}, rng), std::out_of_range);
}

TEST(InPlace, RequiresPositiveDepth) {
    Rng rng(1);
    auto f = sample_simon(3, rng);
    EXPECT_THROW(InPlaceShufflingOracle(sample_shuffling(f, 0, rng, OracleMode::Exact)), std::invalid_argument);
}
