#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "../common.hpp"
#include "prp.hpp"

namespace cvqd::oracles {

// Strings x_1..x_n are stored with x_1 as the most significant bit, so the lexicographic
// order on strings is the integer order.
struct SubgroupEmbedding {
    int n;
    u64 s;
    int pivot_bit; // bit position of the first index i with s_i = 1

    SubgroupEmbedding(int n_, u64 s_) : n(n_), s(s_), pivot_bit(0) {
        if (s == 0) throw std::invalid_argument("shift must be nonzero");
        if (n < 64 && (s >> n) != 0) throw std::invalid_argument("shift wider than n");
        pivot_bit = 63 - std::countl_zero(s);
    }

    int pivot_index() const { return n - pivot_bit; } // 1-based index into x_1..x_n

    bool in_subgroup(u64 x) const { return x < (x ^ s); }

    u64 to_subgroup(u64 x) const { return in_subgroup(x) ? x : x ^ s; }

    // Drops the pivot coordinate and appends m - (n-1) zeros.
    u64 drop_pivot(u64 x, int m) const {
        const u64 high = x >> (pivot_bit + 1), low = x & low_mask(pivot_bit);
        return ((high << pivot_bit) | low) << (m - (n - 1));
    }

    // Inverse of drop_pivot on the subgroup; nullopt when y is not in its image.
    std::optional<u64> lift(u64 y, int m) const {
        const int pad = m - (n - 1);
        if ((y & low_mask(pad)) != 0) return std::nullopt;
        const u64 c = y >> pad;
        const u64 high = c >> pivot_bit, low = c & low_mask(pivot_bit);
        return (high << (pivot_bit + 1)) | low;
    }
};

// f = F o E o T_s, where T_s folds onto the subgroup H, E injects H into m bits and F permutes m bits.
class SimonFunction {
public:
    enum class Embedding { Identity, DropPivot };

    SimonFunction(int n, int m, u64 s, Permutation outer, Embedding emb)
        : n_(n), m_(m), emb_(emb), sub_(n, s), outer_(std::move(outer)) {
        if (n < 2) throw std::invalid_argument("Simon functions need n >= 2");
        if (m < n - 1) throw std::invalid_argument("codomain must have at least n-1 bits");
        if (emb == Embedding::Identity && m != n) throw std::invalid_argument("identity embedding needs m == n");
        if (outer_.width() != m) throw std::invalid_argument("outer permutation width must equal m");
    }

    int n() const { return n_; }
    int m() const { return m_; }
    u64 shift() const { return sub_.s; }
    const SubgroupEmbedding& subgroup() const { return sub_; }
    const Permutation& outer() const { return outer_; }

    u64 eval(u64 x) const {
        if ((x >> n_) != 0) throw std::invalid_argument("input wider than n");
        const u64 h = sub_.to_subgroup(x);
        return outer_.eval(emb_ == Embedding::Identity ? h : sub_.drop_pivot(h, m_));
    }

    u64 operator()(u64 x) const { return eval(x); }

    // The preimage of v lying in H, if v is in the range.
    std::optional<u64> preimage_in_subgroup(u64 v) const {
        if (m_ < 64 && (v >> m_) != 0) return std::nullopt;
        const u64 u = outer_.invert(v);
        if (emb_ == Embedding::Identity) {
            if (!sub_.in_subgroup(u)) return std::nullopt;
            return u;
        }
        auto x = sub_.lift(u, m_);
        if (!x || !sub_.in_subgroup(*x)) return std::nullopt;
        return x;
    }

private:
    int n_;
    int m_;
    Embedding emb_;
    SubgroupEmbedding sub_;
    Permutation outer_;
};

inline u64 sample_shift(int n, Rng& rng) {
    return 1 + std::uniform_int_distribution<u64>(0, low_mask(n) - 1)(rng);
}

// Uniform Simon function on n bits: f = pi o T_s with pi a uniform permutation.
inline SimonFunction sample_simon(int n, Rng& rng, std::optional<u64> forced_shift = std::nullopt) {
    if (n < 2) throw std::invalid_argument("sample_simon needs n >= 2");
    if (forced_shift && *forced_shift == 0) throw std::invalid_argument("forced shift must be nonzero");
    const u64 s = forced_shift ? *forced_shift : sample_shift(n, rng);
    Permutation pi = n <= kExactTableLimit ? Permutation::random_table(n, rng)
                                           : Permutation::feistel(KeyedPermutation(key_from_seed(rng()), n));
    return SimonFunction(n, n, s, std::move(pi), SimonFunction::Embedding::Identity);
}

// g_{k,s} = F_k o W_s o T_s.
inline SimonFunction pseudorandom_simon(Permutation outer, u64 s, int n, int m) {
    if (m < n - 1) throw std::invalid_argument("pseudorandom Simon needs m >= n-1");
    return SimonFunction(n, m, s, std::move(outer), SimonFunction::Embedding::DropPivot);
}

inline SimonFunction pseudorandom_simon(const std::string& key, u64 s, int n, int m) {
    if (m < n - 1) throw std::invalid_argument("pseudorandom Simon needs m >= n-1");
    return pseudorandom_simon(Permutation::feistel(KeyedPermutation(key, m)), s, n, m);
}

// Exhaustive check that f is 2-to-1 with shift s and no other collisions.
inline bool is_simon_function(const SimonFunction& f) {
    if (f.n() > 22) throw CapacityError("exhaustive Simon check limited to n <= 22");
    const u64 s = f.shift();
    std::vector<u64> vals(std::size_t{1} << f.n());
    for (u64 x = 0; x < vals.size(); ++x) vals[x] = f.eval(x);
    std::vector<std::pair<u64, u64>> sorted;
    sorted.reserve(vals.size());
    for (u64 x = 0; x < vals.size(); ++x) {
        if (vals[x] != vals[x ^ s]) return false;
        sorted.push_back({vals[x], x});
    }
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 2 < sorted.size(); ++i)
        if (sorted[i].first == sorted[i + 2].first) return false;
    return true;
}

// Recovers s from vectors y with y.s = 0 when they span an (n-1)-dimensional space.
inline std::optional<u64> solve_simon(const std::vector<u64>& ys, int n) {
    std::vector<u64> basis; // row-echelon, distinct leading bits
    std::vector<int> lead;
    for (u64 y : ys) {
        y &= low_mask(n);
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (bit_at(y, lead[i])) y ^= basis[i];
        if (y == 0) continue;
        int lb = 63 - std::countl_zero(y);
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (bit_at(basis[i], lb)) basis[i] ^= y;
        basis.push_back(y);
        lead.push_back(lb);
    }
    if (static_cast<int>(basis.size()) != n - 1) return std::nullopt;
    int free_bit = -1;
    for (int b = 0; b < n; ++b)
        if (std::find(lead.begin(), lead.end(), b) == lead.end()) free_bit = b;
    u64 s = u64{1} << free_bit;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (bit_at(basis[i], free_bit)) s |= u64{1} << lead[i];
    return s;
}

} // namespace cvqd::oracles
