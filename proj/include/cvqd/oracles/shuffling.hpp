#pragma once

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "../common.hpp"
#include "prp.hpp"
#include "simon.hpp"

namespace cvqd::oracles {

enum class OracleMode { Exact, Prp };

inline const char* to_string(OracleMode m) { return m == OracleMode::Exact ? "exact" : "prp"; }

inline OracleMode parse_mode(const std::string& s) {
    if (s == "exact") return OracleMode::Exact;
    if (s == "prp") return OracleMode::Prp;
    throw ConfigError("unknown oracle mode '" + s + "'");
}

inline std::string hex64(u64 v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Salted commitment to the hidden shift.
inline std::string shift_commitment(u64 s, u64 seed) {
    return hex64(mix64(fnv1a(key_from_seed(s), mix64(seed ^ 0x636f6d6d6974ULL))));
}

// f_0..f_{d-1} are permutations of {0,1}^width; f_d is defined on S_d only.
class ShufflingOracle {
public:
    ShufflingOracle(SimonFunction f, int d, int width, OracleMode mode, u64 seed, std::vector<Permutation> perms)
        : f_(std::move(f)), d_(d), width_(width), mode_(mode), seed_(seed), perms_(std::move(perms)) {
        if (static_cast<int>(perms_.size()) != d_) throw std::invalid_argument("need d permutations");
    }

    const SimonFunction& simon() const { return f_; }
    int n() const { return f_.n(); }
    int d() const { return d_; }
    int width() const { return width_; }
    OracleMode mode() const { return mode_; }
    u64 seed() const { return seed_; }
    bool domain_scaled() const { return width_ != (d_ + 2) * f_.n(); }
    const Permutation& level(int i) const { return perms_.at(static_cast<std::size_t>(i)); }

    // f_i for i < d (the embedding f_0 accepts any width-bit input).
    u64 eval_level(int i, u64 x) const { return perms_.at(static_cast<std::size_t>(i)).eval(x); }

    // f_{d-1} o ... o f_0 applied to a padded n-bit input.
    u64 embed(u64 x) const {
        if ((x >> n()) != 0) throw std::invalid_argument("input wider than n");
        for (const auto& p : perms_) x = p.eval(x);
        return x;
    }

    // The n-bit x' with embed(x') = y, or nullopt when y is outside S_d.
    std::optional<u64> preimage(u64 y) const {
        if (width_ < 64 && (y >> width_) != 0) return std::nullopt;
        for (auto it = perms_.rbegin(); it != perms_.rend(); ++it) y = it->invert(y);
        if ((y >> n()) != 0) return std::nullopt;
        return y;
    }

    bool in_hidden_set(u64 y) const { return preimage(y).has_value(); }

    // f_d: the Simon value on S_d, bottom elsewhere.
    std::optional<u64> eval_final(u64 y) const {
        auto x = preimage(y);
        if (!x) return std::nullopt;
        return f_.eval(*x);
    }

    std::optional<u64> eval_chain(u64 x) const {
        if (d_ == 0) return (x >> n()) == 0 ? std::optional<u64>(f_.eval(x)) : std::nullopt;
        return eval_final(embed(x));
    }

    nlohmann::json descriptor() const {
        nlohmann::json j = {{"n", n()},
                            {"d", d_},
                            {"mode", to_string(mode_)},
                            {"seed", seed_},
                            {"shift_commitment", shift_commitment(f_.shift(), seed_)}};
        if (domain_scaled()) j["domain_width"] = width_;
        return j;
    }

private:
    SimonFunction f_;
    int d_;
    int width_;
    OracleMode mode_;
    u64 seed_;
    std::vector<Permutation> perms_;
};

// width_factor replaces (d+2) when positive (domain scaling for desk-scale runs).
inline ShufflingOracle sample_shuffling(const SimonFunction& f, int d, Rng& rng, OracleMode mode,
                                        int width_factor = 0) {
    if (d < 0) throw std::invalid_argument("d must be nonnegative");
    const int factor = width_factor > 0 ? width_factor : d + 2;
    const int width = factor * f.n();
    if (factor < 2 && d > 0) throw ConfigError("domain must be wider than the input");
    if (width > 64) throw CapacityError("shuffling domain exceeds 64 bits");
    if (mode == OracleMode::Exact && width > kExactTableLimit)
        throw CapacityError("exact mode needs (d+2)n <= " + std::to_string(kExactTableLimit) + " bits; use prp mode");
    const u64 seed = rng();
    Rng local(seed);
    std::vector<Permutation> perms;
    for (int i = 0; i < d; ++i) {
        if (mode == OracleMode::Exact) perms.push_back(Permutation::random_table(width, local));
        else perms.push_back(Permutation::feistel(KeyedPermutation(key_from_seed(local()), width)));
    }
    return ShufflingOracle(f, d, width, mode, seed, std::move(perms));
}

} // namespace cvqd::oracles
