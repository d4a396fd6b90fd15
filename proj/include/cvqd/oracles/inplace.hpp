#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "../common.hpp"
#include "../qsim/state.hpp"
#include "shuffling.hpp"

namespace cvqd::oracles {

// Contiguous qubit range [offset, offset + width) of a basis index.
struct Register {
    int offset = 0;
    int width = 0;

    u64 get(u64 k) const { return (k >> offset) & low_mask(width); }
    u64 set(u64 k, u64 v) const {
        const u64 m = low_mask(width) << offset;
        return (k & ~m) | ((v & low_mask(width)) << offset);
    }
    bool overlaps(const Register& o) const {
        return offset < o.offset + o.width && o.offset < offset + width;
    }
    int end() const { return offset + width; }
};

inline void check_register(const Register& r, int num_qubits) {
    if (r.offset < 0 || r.width < 0 || r.end() > num_qubits) throw std::out_of_range("register outside the state");
}

// O_Q |x, y> = |x, y xor Q(x)>.
inline void apply_standard_oracle(qsim::SparseState& state, const std::function<u64(u64)>& q, Register in,
                                  Register out) {
    if (in.overlaps(out)) throw std::invalid_argument("oracle registers overlap");
    check_register(in, state.num_qubits());
    check_register(out, state.num_qubits());
    state.apply_permutation([&](u64 k) { return out.set(k, out.get(k) ^ q(in.get(k))); });
}

// |x> -> |P(x)> on one register, applied directly.
inline void apply_inplace(qsim::SparseState& state, const std::function<u64(u64)>& p, Register reg) {
    check_register(reg, state.num_qubits());
    state.apply_permutation([&](u64 k) { return reg.set(k, p(reg.get(k))); });
}

// |x>|0> -> |P(x)>|0> using only O_P, O_{P^-1} and a register swap.
inline void inplace_from_standard(qsim::SparseState& state, const Permutation& p, Register reg, Register ancilla) {
    if (reg.width != ancilla.width) throw std::invalid_argument("ancilla width must match the register");
    for (const auto& kv : state.support())
        if (ancilla.get(kv.first) != 0) throw std::invalid_argument("ancilla must start in |0>");
    apply_standard_oracle(state, [&](u64 x) { return p.eval(x); }, reg, ancilla);
    apply_standard_oracle(state, [&](u64 y) { return p.invert(y); }, ancilla, reg);
    state.apply_permutation([&](u64 k) { return ancilla.set(reg.set(k, ancilla.get(k)), reg.get(k)); });
}

// In-place d-shuffling: U_{f_0} writes f_0(x) into a work register, U_{f_1..f_{d-1}} permute it,
// and U_{f_d} maps (y, b) to (f(x') with b in the index bit, b xor b'(x')) where b'(x') = [x' in H].
class InPlaceShufflingOracle {
public:
    explicit InPlaceShufflingOracle(ShufflingOracle base) : base_(std::move(base)) {
        if (base_.d() < 1) throw std::invalid_argument("in-place shuffling needs d >= 1");
        if (base_.width() < base_.simon().m() + 1) throw std::invalid_argument("domain too narrow for the final map");
        overrides_.resize(static_cast<std::size_t>(base_.d() + 1));
    }

    const ShufflingOracle& base() const { return base_; }
    int n() const { return base_.n(); }
    int d() const { return base_.d(); }
    int width() const { return base_.width(); }
    int final_width() const { return base_.width() + 1; }
    int index_bit() const { return base_.simon().m(); }

    int coset_bit(u64 x_prime) const { return base_.simon().subgroup().in_subgroup(x_prime) ? 1 : 0; }

    // f_0 on an n-bit input (XOR-style level).
    u64 first(u64 x) const {
        if (auto v = lookup(0, x, true)) return *v;
        return base_.eval_level(0, x);
    }

    // Level i in 1..d as a bijection: width bits for i < d, width+1 bits for i = d.
    u64 eval(int i, u64 w) const {
        check_level(i);
        if (auto v = lookup(i, w, true)) return *v;
        return i < d() ? base_.eval_level(i, w) : final_eval(w);
    }

    u64 invert(int i, u64 w) const {
        check_level(i);
        if (auto v = lookup(i, w, false)) return *v;
        return i < d() ? base_.level(i).invert(w) : final_invert(w);
    }

    // Register layout used by the solver: x (n qubits), work (width), flag (1).
    Register x_register() const { return {0, n()}; }
    Register work_register() const { return {n(), width()}; }
    int flag_qubit() const { return n() + width(); }
    int solver_qubits() const { return n() + width() + 1; }

    void apply_level(qsim::SparseState& s, int i) const {
        if (i == 0) {
            apply_standard_oracle(s, [&](u64 x) { return first(x); }, x_register(), work_register());
        } else if (i < d()) {
            apply_inplace(s, [&](u64 w) { return eval(i, w); }, work_register());
        } else {
            apply_inplace(s, [&](u64 w) { return eval(i, w); }, Register{n(), width() + 1});
        }
    }

    // Shadow support: replaces level i on the listed points.
    void set_override(int level, const std::unordered_map<u64, u64>& fwd) {
        auto& o = overrides_.at(static_cast<std::size_t>(level));
        for (const auto& [k, v] : fwd) {
            o.fwd[k] = v;
            o.bwd[v] = k;
        }
    }

    bool has_overrides() const {
        for (const auto& o : overrides_)
            if (!o.fwd.empty()) return true;
        return false;
    }

private:
    struct Override {
        std::unordered_map<u64, u64> fwd, bwd;
    };

    void check_level(int i) const {
        if (i < 1 || i > d()) throw std::out_of_range("in-place level must be 1..d");
    }

    std::optional<u64> lookup(int level, u64 w, bool forward) const {
        const auto& o = overrides_[static_cast<std::size_t>(level)];
        const auto& m = forward ? o.fwd : o.bwd;
        auto it = m.find(w);
        if (it == m.end()) return std::nullopt;
        return it->second;
    }

    bool in_domain_part(u64 w) const { return base_.in_hidden_set(w & low_mask(width())); }

    bool in_image_part(u64 w) const {
        const u64 y = w & low_mask(width());
        if ((y >> (index_bit() + 1)) != 0) return false;
        return base_.simon().preimage_in_subgroup(y & low_mask(index_bit())).has_value();
    }

    u64 phi(u64 w) const {
        const u64 y = w & low_mask(width());
        const u64 b = w >> width();
        const u64 x = *base_.preimage(y);
        const u64 v = base_.simon().eval(x);
        const u64 flag = b ^ static_cast<u64>(coset_bit(x));
        return v | (b << index_bit()) | (flag << width());
    }

    u64 phi_inverse(u64 w) const {
        const u64 y = w & low_mask(width());
        const u64 j = (y >> index_bit()) & 1u;
        const u64 flag = w >> width();
        const u64 xh = *base_.simon().preimage_in_subgroup(y & low_mask(index_bit()));
        const u64 x = (flag ^ j) ? xh : (xh ^ base_.simon().shift());
        return base_.embed(x) | (j << width());
    }

    // phi is a bijection from S_d x {0,1} onto the image set; the rest is closed along chains.
    u64 final_eval(u64 w) const {
        if (in_domain_part(w)) return phi(w);
        if (!in_image_part(w)) return w;
        u64 u = phi_inverse(w);
        while (in_image_part(u)) u = phi_inverse(u);
        return u;
    }

    u64 final_invert(u64 w) const {
        if (in_image_part(w)) return phi_inverse(w);
        if (!in_domain_part(w)) return w;
        u64 u = phi(w);
        while (in_domain_part(u)) u = phi(u);
        return u;
    }

    ShufflingOracle base_;
    std::vector<Override> overrides_;
};

inline InPlaceShufflingOracle build_inplace(const ShufflingOracle& shuffling) {
    InPlaceShufflingOracle o(shuffling);
    if (o.width() + 1 <= 16) {
        const u64 size = u64{1} << o.final_width();
        std::vector<char> hit(size, 0);
        for (u64 w = 0; w < size; ++w) {
            const u64 v = o.eval(o.d(), w);
            if (v >= size || hit[v] || o.invert(o.d(), v) != w) throw std::logic_error("final level is not a bijection");
            hit[v] = 1;
        }
    }
    return o;
}

struct HiddenSet {
    int level = 0;
    std::vector<u64> points;
};

// Shadow oracle: agrees with F off the hidden points and re-pairs the hidden points with their
// own images uniformly at random, so every level stays a bijection.
inline InPlaceShufflingOracle shadow_oracle(const InPlaceShufflingOracle& f, const HiddenSet& hidden, Rng& rng) {
    if (hidden.level < 0 || hidden.level > f.d()) throw std::out_of_range("hidden level out of range");
    InPlaceShufflingOracle g = f;
    if (hidden.points.empty()) return g;
    std::vector<u64> domain;
    for (u64 p : hidden.points) {
        const int bits = hidden.level == 0 ? f.n() : f.width();
        if (bits < 64 && (p >> bits) != 0) throw std::invalid_argument("hidden point outside the domain");
        if (hidden.level == f.d()) {
            domain.push_back(p);
            domain.push_back(p | (u64{1} << f.width()));
        } else {
            domain.push_back(p);
        }
    }
    std::sort(domain.begin(), domain.end());
    if (std::adjacent_find(domain.begin(), domain.end()) != domain.end())
        throw std::invalid_argument("duplicate hidden point");
    const u64 full = u64{1} << std::min(63, hidden.level == f.d() ? f.final_width() : f.width());
    if (hidden.level > 0 && domain.size() >= full) throw std::invalid_argument("hidden set covers the whole domain");
    std::vector<u64> images;
    for (u64 w : domain) images.push_back(hidden.level == 0 ? f.first(w) : f.eval(hidden.level, w));
    std::shuffle(images.begin(), images.end(), rng);
    std::unordered_map<u64, u64> fwd;
    for (std::size_t i = 0; i < domain.size(); ++i) fwd[domain[i]] = images[i];
    g.set_override(hidden.level, fwd);
    return g;
}

} // namespace cvqd::oracles
