#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "../common.hpp"

namespace cvqd::oracles {

inline u64 fnv1a(const std::string& bytes, u64 h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string key_from_seed(u64 seed) {
    std::string k(8, '\0');
    for (int i = 0; i < 8; ++i) k[static_cast<std::size_t>(i)] = static_cast<char>((seed >> (8 * i)) & 0xff);
    return k;
}

// Feistel network on `width` bits. Each round XORs a keyed function of one half into the
// other half; halves alternate, so odd widths use an unbalanced split.
class KeyedPermutation {
public:
    KeyedPermutation(std::string key, int width, int rounds = 10)
        : key_(std::move(key)), width_(width), rounds_(rounds) {
        if (width < 1 || width > 64) throw std::invalid_argument("permutation width must be 1..64");
        if (rounds < 1) throw std::invalid_argument("need at least one round");
        left_bits_ = (width + 1) / 2;
        right_bits_ = width - left_bits_;
        k0_ = mix64(fnv1a(key_));
        k1_ = mix64(fnv1a(key_, k0_ ^ 0x5bd1e995ULL));
    }

    int width() const { return width_; }
    int rounds() const { return rounds_; }
    const std::string& key() const { return key_; }

    u64 eval(u64 x) const {
        check(x);
        u64 l = x >> right_bits_, r = x & low_mask(right_bits_);
        for (int i = 0; i < rounds_; ++i) step(l, r, i);
        return (l << right_bits_) | r;
    }

    u64 invert(u64 y) const {
        check(y);
        u64 l = y >> right_bits_, r = y & low_mask(right_bits_);
        for (int i = rounds_ - 1; i >= 0; --i) step(l, r, i);
        return (l << right_bits_) | r;
    }

private:
    void check(u64 x) const {
        if (width_ < 64 && (x >> width_) != 0) throw std::invalid_argument("input wider than the permutation");
    }

    u64 round_fn(int i, u64 v) const {
        return mix64(k0_ ^ mix64(v + k1_ * static_cast<u64>(2 * i + 1)));
    }

    // Round i updates the left half on even i and the right half on odd i; each is an involution.
    void step(u64& l, u64& r, int i) const {
        if (i % 2 == 0) l ^= round_fn(i, r) & low_mask(left_bits_);
        else r ^= round_fn(i, l) & low_mask(right_bits_);
    }

    std::string key_;
    int width_;
    int rounds_;
    int left_bits_ = 0;
    int right_bits_ = 0;
    u64 k0_ = 0, k1_ = 0;
};

inline u64 prp_eval(const KeyedPermutation& p, u64 x) { return p.eval(x); }
inline u64 prp_invert(const KeyedPermutation& p, u64 y) { return p.invert(y); }

inline constexpr int kExactTableLimit = 24;

// Bijection on `width` bits backed by an explicit table, a Feistel network, or the identity.
class Permutation {
public:
    enum class Kind { Identity, Table, Feistel };

    static Permutation identity(int width) {
        Permutation p;
        p.kind_ = Kind::Identity;
        p.width_ = width;
        return p;
    }

    static Permutation random_table(int width, Rng& rng) {
        if (width > kExactTableLimit)
            throw CapacityError("exact permutation tables are limited to " + std::to_string(kExactTableLimit) + " bits");
        Permutation p;
        p.kind_ = Kind::Table;
        p.width_ = width;
        auto fwd = std::make_shared<std::vector<std::uint32_t>>(std::size_t{1} << width);
        std::iota(fwd->begin(), fwd->end(), 0u);
        std::shuffle(fwd->begin(), fwd->end(), rng);
        auto inv = std::make_shared<std::vector<std::uint32_t>>(fwd->size());
        for (std::uint32_t i = 0; i < fwd->size(); ++i) (*inv)[(*fwd)[i]] = i;
        p.fwd_ = std::move(fwd);
        p.inv_ = std::move(inv);
        return p;
    }

    static Permutation feistel(KeyedPermutation k) {
        Permutation p;
        p.kind_ = Kind::Feistel;
        p.width_ = k.width();
        p.feistel_ = std::make_shared<KeyedPermutation>(std::move(k));
        return p;
    }

    Kind kind() const { return kind_; }
    int width() const { return width_; }

    u64 eval(u64 x) const {
        switch (kind_) {
        case Kind::Identity: return x;
        case Kind::Table: return (*fwd_).at(x);
        case Kind::Feistel: return feistel_->eval(x);
        }
        return x;
    }

    u64 invert(u64 y) const {
        switch (kind_) {
        case Kind::Identity: return y;
        case Kind::Table: return (*inv_).at(y);
        case Kind::Feistel: return feistel_->invert(y);
        }
        return y;
    }

private:
    Kind kind_ = Kind::Identity;
    int width_ = 0;
    std::shared_ptr<const std::vector<std::uint32_t>> fwd_, inv_;
    std::shared_ptr<const KeyedPermutation> feistel_;
};

} // namespace cvqd::oracles
