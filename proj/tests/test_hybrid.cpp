#include <gtest/gtest.h>

#include "cvqd/hybrid.hpp"

using namespace cvqd;
using namespace cvqd::hybrid;
using qsim::Gate;

TEST(Hybrid, ClassicalOnlyRoundsProduceNoQuantumSteps) {
    Rng rng(1);
    std::vector<DcqRound> rounds = {{"a", 0, nullptr}, {"b", 0, nullptr}};
    auto r = run_dcq<int>(0, rounds, [](const Memory& m) { return static_cast<int>(m.size()); }, rng);
    EXPECT_EQ(r.output, 0);
    for (const auto& st : r.trace.steps()) EXPECT_EQ(st.type, Step::Type::Classical);
    EXPECT_TRUE(r.trace.valid());
}

TEST(Hybrid, DcqRejectsCircuitDeeperThanBudget) {
    Rng rng(2);
    qsim::LayeredCircuit c(1);
    c.add_layer({Gate::h(0)}).add_layer({Gate::t(0)}).add_layer({Gate::h(0)});
    std::vector<DcqRound> rounds = {{"deep", 1, [&](QuantumSession& s, const Memory&) { s.run(c); }}};
    EXPECT_THROW(run_dcq<int>(2, rounds, [](const Memory&) { return 0; }, rng), DepthBudgetExceeded);
}

TEST(Hybrid, DcqBudgetCheckedBeforeExecution) {
    HybridTrace trace(SchemeKind::dCQ, 2);
    QuantumSession s(SchemeKind::dCQ, 1, 2, trace);
    qsim::LayeredCircuit c(1);
    c.add_layer({Gate::x(0)}).add_layer({Gate::x(0)}).add_layer({Gate::x(0)});
    EXPECT_THROW(s.run(c), DepthBudgetExceeded);
    EXPECT_NEAR(std::abs(s.state().amp(0)), 1.0, 1e-12);
    EXPECT_EQ(s.layers_used(), 0);
}

TEST(Hybrid, DcqMeasuresEveryQubitAfterEachRound) {
    Rng rng(3);
    std::vector<DcqRound> rounds;
    for (int r = 0; r < 3; ++r)
        rounds.push_back({"flip", 2, [](QuantumSession& s, const Memory& m) {
                              s.layer({Gate::x(static_cast<int>(m.size() % 2))});
                          }});
    auto r = run_dcq<Memory>(1, rounds, [](const Memory& m) { return m; }, rng);
    ASSERT_EQ(r.output.size(), 3u);
    EXPECT_EQ(r.output[0], 1u);
    EXPECT_EQ(r.output[1], 2u);
    for (const auto& st : r.trace.steps()) {
        if (st.type == Step::Type::Quantum) {
            EXPECT_TRUE(st.full_measurement);
        }
    }
    EXPECT_TRUE(r.trace.valid());
    EXPECT_TRUE(r.trace.as_dqc().valid());
    EXPECT_EQ(r.trace.audited_depth(), 1);
}

TEST(Hybrid, DcqForbidsPartialMeasurement) {
    Rng rng(4);
    std::vector<DcqRound> rounds = {{"partial", 2, [&](QuantumSession& s, const Memory&) {
                                         s.layer({Gate::h(0)});
                                         s.measure({0}, rng);
                                     }}};
    EXPECT_THROW(run_dcq<int>(3, rounds, [](const Memory&) { return 0; }, rng), SchemeViolation);
}

TEST(Hybrid, StateCannotCrossRoundBoundary) {
    Rng rng(5);
    HybridTrace trace(SchemeKind::dCQ, 1);
    QuantumSession s(SchemeKind::dCQ, 1, 1, trace);
    s.measure_all(rng);
    s.close();
    EXPECT_THROW(s.layer({Gate::h(0)}), SchemeViolation);
}

TEST(Hybrid, DqcAllowsAdaptiveMeasurementWithinBudget) {
    Rng rng(6);
    auto r = run_dqc<int>(1, 2, [](QcContext& ctx) {
        ctx.quantum().layer({Gate::h(0)});
        int c = ctx.classical("coin", [&] { return coin(ctx.rng()); });
        if (c) return ctx.quantum().measure({0}, ctx.rng())[0];
        return -1;
    }, rng);
    EXPECT_TRUE(r.trace.valid());
    EXPECT_EQ(r.trace.audited_depth(), 1);
}

TEST(Hybrid, DqcRejectsOneLayerTooMany) {
    Rng rng(7);
    for (int d = 1; d <= 5; ++d) {
        auto prog = [d](QcContext& ctx) {
            for (int l = 0; l <= d; ++l) {
                ctx.quantum().layer({Gate::h(0)});
                ctx.classical("adapt", [] { return 0; });
            }
            return 0;
        };
        EXPECT_THROW(run_dqc<int>(d, 1, prog, rng), DepthBudgetExceeded);
    }
}

TEST(Hybrid, DqcPartialMeasurementDoesNotResetDepth) {
    Rng rng(8);
    auto prog = [](QcContext& ctx) {
        ctx.quantum().layer({Gate::h(0)});
        ctx.quantum().measure({0}, ctx.rng());
        ctx.quantum().layer({Gate::h(1)});
        ctx.quantum().layer({Gate::h(1)});
        return 0;
    };
    EXPECT_THROW(run_dqc<int>(2, 2, prog, rng), DepthBudgetExceeded);
    auto r = run_dqc<int>(3, 2, prog, rng);
    EXPECT_EQ(r.trace.audited_depth(), 3);
}

TEST(Hybrid, TraceJson) {
    HybridTrace t(SchemeKind::dQC, 4);
    t.add_classical("prep");
    t.add_quantum(2, false);
    auto j = t.to_json();
    EXPECT_EQ(j["kind"], "dQC");
    EXPECT_EQ(j["budget"], 4);
    EXPECT_EQ(j["steps"].size(), 2u);
    EXPECT_EQ(j["steps"][1]["layers"], 2);
}
