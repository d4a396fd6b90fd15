#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "../common.hpp"
#include "matrix.hpp"
#include "ops.hpp"
#include "state.hpp"

namespace cvqd::qsim {

// X^a Z^b with one bit per wire (wire i = bit i).
struct PauliOp {
    int n = 1;
    u64 a = 0;
    u64 b = 0;

    static PauliOp from_code(int n, u64 code) { return {n, code & low_mask(n), code >> n}; }
    u64 code() const { return a | (b << n); }
    bool is_identity() const { return a == 0 && b == 0; }

    Matrix matrix() const {
        const std::size_t dim = std::size_t{1} << n;
        Matrix m(dim, dim);
        for (u64 i = 0; i < dim; ++i) m(i ^ a, i) = parity(i & b) ? -1.0 : 1.0;
        return m;
    }

    // Label such as "XZ" (wire 0 first), with Y for X^1 Z^1.
    std::string label() const {
        std::string s;
        for (int i = 0; i < n; ++i) {
            int x = bit_at(a, i), z = bit_at(b, i);
            s += x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
        }
        return s;
    }
};

class PauliDistribution {
public:
    explicit PauliDistribution(int n) : n_(n), w_(std::size_t{1} << (2 * n), 0.0) {}
    PauliDistribution(int n, std::vector<double> weights) : n_(n), w_(std::move(weights)) {
        if (w_.size() != (std::size_t{1} << (2 * n))) throw std::invalid_argument("expected 4^n Pauli weights");
        validate();
    }

    static PauliDistribution point_mass(const PauliOp& p) {
        PauliDistribution d(p.n);
        d.w_[p.code()] = 1.0;
        return d;
    }

    int num_qubits() const { return n_; }
    std::size_t size() const { return w_.size(); }
    double weight(const PauliOp& p) const { return w_.at(p.code()); }
    double weight(u64 code) const { return w_.at(code); }
    double& operator[](u64 code) { return w_.at(code); }
    double r0() const { return w_[0]; }
    const std::vector<double>& weights() const { return w_; }

    void validate(double tol = 1e-9) const {
        double s = 0.0;
        for (double v : w_) {
            if (v < -tol) throw std::invalid_argument("negative Pauli weight");
            s += v;
        }
        if (std::abs(s - 1.0) > tol) throw std::invalid_argument("Pauli weights do not sum to 1");
    }

private:
    int n_;
    std::vector<double> w_;
};

using Kraus = std::vector<Matrix>;

inline double pauli_deviation(const PauliDistribution& r) { return 1.0 - r.r0(); }

inline Matrix apply_channel(const Kraus& kraus, const Matrix& rho) {
    Matrix out(rho.rows(), rho.cols());
    for (const auto& k : kraus) out = out + k * rho * k.adjoint();
    return out;
}

inline void check_trace_preserving(const Kraus& kraus, std::size_t dim, double tol = 1e-9) {
    if (kraus.empty()) throw std::invalid_argument("empty Kraus list");
    Matrix acc(dim, dim);
    for (const auto& k : kraus) {
        if (k.rows() != dim || k.cols() != dim) throw std::invalid_argument("Kraus operator has the wrong dimension");
        acc = acc + k.adjoint() * k;
    }
    if ((acc - Matrix::identity(dim)).max_abs() > tol)
        throw std::invalid_argument("channel is not trace preserving");
}

// Choi matrix sum_{ij} |i><j| (x) Phi(|i><j|).
inline Matrix choi(const Kraus& kraus) {
    const std::size_t dim = kraus.at(0).rows();
    Matrix out(dim * dim, dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            Matrix eij(dim, dim);
            eij(i, j) = 1.0;
            Matrix img = apply_channel(kraus, eij);
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t c = 0; c < dim; ++c) out(i * dim + r, j * dim + c) = img(r, c);
        }
    return out;
}

// Process matrix chi_{ab} in the X^a Z^b basis: Phi(rho) = sum chi_{ab} P_a rho P_b^dagger.
inline Matrix process_matrix(const Kraus& kraus, int n) {
    const std::size_t dim = std::size_t{1} << n, np = dim * dim;
    std::vector<Matrix> paulis;
    for (u64 c = 0; c < np; ++c) paulis.push_back(PauliOp::from_code(n, c).matrix().adjoint());
    Matrix chi(np, np);
    for (const auto& k : kraus) {
        std::vector<cplx> coeff(np);
        for (u64 c = 0; c < np; ++c) coeff[c] = (paulis[c] * k).trace() / static_cast<double>(dim);
        for (u64 a = 0; a < np; ++a)
            for (u64 b = 0; b < np; ++b) chi(a, b) += coeff[a] * std::conj(coeff[b]);
    }
    return chi;
}

// Pauli twirl: the diagonal of the process matrix.
inline PauliDistribution twirl(const Kraus& kraus, int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("twirl supports 1..3 qubits");
    const std::size_t dim = std::size_t{1} << n;
    check_trace_preserving(kraus, dim);
    Matrix chi = process_matrix(kraus, n);
    std::vector<double> w(dim * dim);
    for (std::size_t a = 0; a < w.size(); ++a) w[a] = chi(a, a).real();
    return PauliDistribution(n, std::move(w));
}

inline Kraus pauli_channel_kraus(const PauliDistribution& r) {
    Kraus out;
    for (u64 c = 0; c < r.size(); ++c)
        if (r.weight(c) > 0) out.push_back(PauliOp::from_code(r.num_qubits(), c).matrix() * std::sqrt(r.weight(c)));
    return out;
}

inline Kraus unitary_channel(const Matrix& u) { return {u}; }

// Random CPTP map with `rank` Kraus operators, from a Haar-like random isometry.
inline Kraus random_channel(int n, int rank, Rng& rng) {
    const std::size_t dim = std::size_t{1} << n, rows = dim * static_cast<std::size_t>(rank);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<cplx>> cols(dim, std::vector<cplx>(rows));
    for (auto& col : cols)
        for (auto& v : col) v = cplx(g(rng), g(rng));
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            cplx ov = 0.0;
            for (std::size_t r = 0; r < rows; ++r) ov += std::conj(cols[p][r]) * cols[c][r];
            for (std::size_t r = 0; r < rows; ++r) cols[c][r] -= ov * cols[p][r];
        }
        double nrm = 0.0;
        for (const auto& v : cols[c]) nrm += std::norm(v);
        nrm = std::sqrt(nrm);
        for (auto& v : cols[c]) v /= nrm;
    }
    Kraus out(static_cast<std::size_t>(rank), Matrix(dim, dim));
    for (std::size_t j = 0; j < out.size(); ++j)
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) out[j](r, c) = cols[c][j * dim + r];
    return out;
}

// One Kraus branch drawn with its Born weight and applied to the listed qubits; returns its index.
inline std::size_t apply_kraus_sampled(StateVector& s, const Kraus& kraus, const std::vector<int>& qubits, Rng& rng) {
    if (kraus.empty()) return 0;
    std::vector<StateVector> branches;
    std::vector<double> weights;
    for (const auto& k : kraus) {
        StateVector b = s;
        apply_matrix(b, k, qubits);
        weights.push_back(b.norm() * b.norm());
        branches.push_back(std::move(b));
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("channel annihilates the state");
    double r = uniform01(rng) * total;
    std::size_t pick = weights.size() - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (r < weights[i]) {
            pick = i;
            break;
        }
        r -= weights[i];
    }
    s = std::move(branches[pick]);
    s.normalize();
    return pick;
}

} // namespace cvqd::qsim
