#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cvqd/qsim.hpp"

using namespace cvqd;
using namespace cvqd::qsim;

namespace {

StateVector random_state(int n, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> amps(std::size_t{1} << n);
    for (auto& a : amps) a = cplx(g(rng), g(rng));
    auto s = StateVector::from_amplitudes(std::move(amps));
    s.normalize();
    return s;
}

// Full-register operator for a one-qubit matrix on wire q (wire i = bit i).
Matrix embed1(const Matrix& m, int q, int n) {
    Matrix out = Matrix::identity(1);
    for (int w = n - 1; w >= 0; --w) out = kron(out, w == q ? m : gates::I());
    return out;
}

std::vector<cplx> matvec(const Matrix& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r] += m(r, c) * v[c];
    return out;
}

} // namespace

TEST(Qsim, HadamardOnZero) {
    StateVector s(1);
    apply_layer(s, {Gate::h(0)});
    EXPECT_NEAR(s.amp(0).real(), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s.amp(1).real(), 1 / std::sqrt(2.0), 1e-12);
}

TEST(Qsim, TwoXGatesGiveOneOne) {
    StateVector s(2);
    apply_layer(s, {Gate::x(0), Gate::x(1)});
    EXPECT_NEAR(std::abs(s.amp(3)), 1.0, 1e-12);
}

TEST(Qsim, LayerPreservesNorm) {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        auto s = random_state(3, rng);
        apply_layer(s, {Gate::h(0), Gate::cnot(2, 1)});
        apply_layer(s, {Gate::t(0), Gate::s(1), Gate::y(2)});
        EXPECT_NEAR(s.norm(), 1.0, 1e-9);
    }
}

TEST(Qsim, OverlappingTargetsRejected) {
    StateVector s(2);
    EXPECT_THROW(apply_layer(s, {Gate::h(0), Gate::cnot(0, 1)}), std::invalid_argument);
    EXPECT_THROW(apply_layer(s, {Gate::h(2)}), std::out_of_range);
}

TEST(Qsim, DenseLimitIsEnforced) {
    EXPECT_THROW(StateVector(23), CapacityError);
    EXPECT_THROW(make_epr(12), CapacityError);
}

TEST(Qsim, SingleQubitGateMatchesKroneckerOracle) {
    Rng rng(11);
    auto s = random_state(3, rng);
    auto expect = matvec(embed1(gates::T() * gates::H(), 1, 3), s.amplitudes());
    s.apply_1q(gates::H(), 1);
    s.apply_1q(gates::T(), 1);
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(std::abs(s.amplitudes()[i] - expect[i]), 0.0, 1e-12);
}

TEST(Qsim, CnotActsOnBasisStates) {
    for (u64 i = 0; i < 8; ++i) {
        auto s = StateVector::basis(3, i);
        s.apply_2q(gates::CNOT(), 2, 0);
        u64 expect = bit_at(i, 2) ? (i ^ 1u) : i;
        EXPECT_NEAR(std::abs(s.amp(expect)), 1.0, 1e-12);
    }
}

TEST(Qsim, MeasureDeterministicOne) {
    Rng rng(1);
    auto r = measure(StateVector::basis(1, 1), {0}, Basis::Standard, rng);
    EXPECT_EQ(r.bits[0], 1);
    EXPECT_NEAR(std::abs(r.state.amp(1)), 1.0, 1e-12);
}

TEST(Qsim, HadamardMeasureOfPlusGivesZeroAndKeepsPlus) {
    Rng rng(2);
    StateVector plus(1);
    plus.apply_1q(gates::H(), 0);
    auto r = measure(plus, {0}, Basis::Hadamard, rng);
    EXPECT_EQ(r.bits[0], 0);
    EXPECT_TRUE(equal_up_to_phase(r.state, plus));
}

TEST(Qsim, BornRuleFrequency) {
    Rng rng(3);
    StateVector plus(1);
    plus.apply_1q(gates::H(), 0);
    int zeros = 0;
    for (int t = 0; t < 10000; ++t) zeros += measure(plus, {0}, Basis::Standard, rng).bits[0] == 0;
    EXPECT_NEAR(zeros / 10000.0, 0.5, 0.02);
}

TEST(Qsim, EmptyMeasurementRejected) {
    Rng rng(4);
    StateVector s(1);
    EXPECT_THROW(measure_inplace(s, std::vector<int>{}, rng), std::invalid_argument);
}

TEST(Qsim, EprSingle) {
    auto s = make_epr(1);
    EXPECT_NEAR(s.amp(0).real(), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s.amp(3).real(), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(std::abs(s.amp(1)) + std::abs(s.amp(2)), 0.0, 1e-12);
}

TEST(Qsim, EprPairsCorrelateInBothBases) {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        auto s = make_epr(2);
        auto bits = measure_inplace(s, {0, 1, 2, 3}, rng);
        EXPECT_EQ(bits[0], bits[2]);
        EXPECT_EQ(bits[1], bits[3]);
        auto h = make_epr(1);
        auto hb = measure_inplace(h, {0, 1}, Basis::Hadamard, rng);
        EXPECT_EQ(hb[0], hb[1]);
    }
}

TEST(Qsim, TeleportBasisAndPlusStates) {
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        auto s = StateVector::basis(3, 0);
        s.apply_1q(gates::H(), 1);
        s.apply_2q(gates::CNOT(), 1, 2);
        auto c = teleport(s, 0, {1, 2}, rng);
        auto recv = qubit_state(s, 2);
        EXPECT_NEAR(std::abs(recv.amp(static_cast<u64>(c.a))), 1.0, 1e-9);

        StateVector p(3);
        p.apply_1q(gates::H(), 0);
        p.apply_1q(gates::H(), 1);
        p.apply_2q(gates::CNOT(), 1, 2);
        auto cp = teleport(p, 0, {1, 2}, rng);
        StateVector expect(1);
        expect.apply_1q(gates::H(), 0);
        if (cp.b) expect.apply_1q(gates::Z(), 0);
        EXPECT_TRUE(equal_up_to_phase(qubit_state(p, 2), expect));
    }
}

TEST(Qsim, TeleportRandomStatesRecoveredAfterCorrection) {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        auto psi = random_state(1, rng);
        std::vector<cplx> amps(8);
        amps[0] = psi.amp(0) / std::sqrt(2.0);
        amps[1] = psi.amp(1) / std::sqrt(2.0);
        amps[6] = psi.amp(0) / std::sqrt(2.0);
        amps[7] = psi.amp(1) / std::sqrt(2.0);
        auto s = StateVector::from_amplitudes(amps);
        auto c = teleport(s, 0, {1, 2}, rng);
        auto recv = qubit_state(s, 2);
        if (c.a) recv.apply_1q(gates::X(), 0);
        if (c.b) recv.apply_1q(gates::Z(), 0);
        EXPECT_NEAR(fidelity(recv, psi), 1.0, 1e-9);
    }
}

TEST(Qsim, TeleportIndexCollision) {
    Rng rng(9);
    StateVector s(3);
    EXPECT_THROW(teleport(s, 1, {1, 2}, rng), std::invalid_argument);
}

TEST(Qsim, DenseSparseAgreeOnRandomCircuits) {
    Rng rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 12;
        LayeredCircuit c(n);
        for (int l = 0; l < 8; ++l) {
            Layer layer;
            std::vector<int> wires(n);
            for (int i = 0; i < n; ++i) wires[i] = i;
            std::shuffle(wires.begin(), wires.end(), rng);
            for (int i = 0; i + 1 < n; i += 3) {
                switch (rng() % 4) {
                case 0: layer.push_back(Gate::h(wires[i])); break;
                case 1: layer.push_back(Gate::t(wires[i])); break;
                case 2: layer.push_back(Gate::cnot(wires[i], wires[i + 1])); break;
                default: layer.push_back(Gate::s(wires[i])); break;
                }
            }
            c.add_layer(layer);
        }
        StateVector d(n);
        SparseState s(n);
        c.run(d);
        c.run(s);
        auto sd = s.to_dense();
        for (std::size_t i = 0; i < d.dim(); ++i) ASSERT_NEAR(std::abs(d.amplitudes()[i] - sd.amplitudes()[i]), 0.0, 1e-9);
        EXPECT_NEAR(s.norm(), 1.0, 1e-9);
    }
}

TEST(Qsim, SparseCapEnforced) {
    SparseState s(4, 8);
    s.apply_1q(gates::H(), 0);
    s.apply_1q(gates::H(), 1);
    s.apply_1q(gates::H(), 2);
    EXPECT_THROW(s.apply_1q(gates::H(), 3), CapacityError);
}

TEST(Qsim, JsonDump) {
    StateVector s(1);
    s.apply_1q(gates::X(), 0);
    auto j = to_json(s);
    EXPECT_EQ(j["n"], 1);
    EXPECT_DOUBLE_EQ(j["amps"][1][0].get<double>(), 1.0);
}

TEST(Qsim, TwirlIdentityAndX) {
    auto id = twirl(unitary_channel(gates::I()), 1);
    EXPECT_NEAR(id.r0(), 1.0, 1e-12);
    auto x = twirl(unitary_channel(gates::X()), 1);
    EXPECT_NEAR(x.weight(PauliOp{1, 1, 0}), 1.0, 1e-12);
}

TEST(Qsim, TwirlRejectsNonTracePreserving) {
    EXPECT_THROW(twirl({gates::I() * 0.5}, 1), std::invalid_argument);
}

// Brute-force twirl: average P_a^dag Phi(P_a rho P_a^dag) P_a over all Paulis.
TEST(Qsim, TwirlMatchesBruteForceAverageOnBasisInputs) {
    Rng rng(12);
    const double r = 1 / std::sqrt(2.0);
    std::vector<StateVector> inputs;
    inputs.push_back(StateVector::basis(1, 0));
    inputs.push_back(StateVector::basis(1, 1));
    inputs.push_back(StateVector::from_amplitudes({r, r}));
    inputs.push_back(StateVector::from_amplitudes({r, cplx(0, r)}));
    for (int t = 0; t < 10; ++t) {
        auto k = random_channel(1, 3, rng);
        auto dist = twirl(k, 1);
        for (const auto& in : inputs) {
            Matrix rho(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) rho(i, j) = in.amp(i) * std::conj(in.amp(j));
            Matrix avg(2, 2), pauli_out(2, 2);
            for (u64 c = 0; c < 4; ++c) {
                Matrix p = PauliOp::from_code(1, c).matrix();
                avg = avg + p.adjoint() * apply_channel(k, p * rho * p.adjoint()) * p * 0.25;
                pauli_out = pauli_out + p * rho * p.adjoint() * dist.weight(c);
            }
            EXPECT_LT((avg - pauli_out).max_abs(), 1e-9);
        }
    }
}

TEST(Qsim, TwirlOffDiagonalProcessEntriesVanish) {
    Rng rng(13);
    for (int t = 0; t < 5; ++t) {
        auto k = random_channel(2, 2, rng);
        Kraus twirled;
        for (u64 c = 0; c < 16; ++c) {
            Matrix p = PauliOp::from_code(2, c).matrix();
            for (const auto& kk : k) twirled.push_back(p.adjoint() * kk * p * 0.25);
        }
        Matrix chi = process_matrix(twirled, 2);
        for (std::size_t a = 0; a < 16; ++a)
            for (std::size_t b = 0; b < 16; ++b)
                if (a != b) {
                    EXPECT_LT(std::abs(chi(a, b)), 1e-9);
                }
    }
}

TEST(Qsim, PauliDeviation) {
    EXPECT_DOUBLE_EQ(pauli_deviation(PauliDistribution::point_mass({1, 0, 0})), 0.0);
    PauliDistribution r(1, {0.9, 0.1, 0.0, 0.0});
    EXPECT_NEAR(pauli_deviation(r), 0.1, 1e-12);
    const double eps = 0.02;
    PauliDistribution planted(1, {1 - 4 * eps, 2 * eps, eps, eps});
    EXPECT_NEAR(pauli_deviation(planted), 4 * eps, 1e-12);
}

TEST(Qsim, PauliDistributionValidation) {
    EXPECT_THROW(PauliDistribution(1, {0.5, 0.6, 0.0, -0.1}), std::invalid_argument);
    EXPECT_THROW(PauliDistribution(1, {0.5, 0.4, 0.0, 0.0}), std::invalid_argument);
}
