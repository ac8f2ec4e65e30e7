#pragma once

// Deterministic seeded PRNG used by every randomized component.
//
// The generator is xoshiro256++ (Blackman & Vigna), seeded through
// splitmix64.  Substreams are derived from a base seed by mixing in a fixed
// 64-bit role tag plus an optional index, so e.g. ground-truth parameters and
// per-sample noise come from independent streams and changing the sample
// count never perturbs the parameter stream.
//
// Stream contracts, fixed so other implementations can reproduce them:
//   * uniform01()  = (next() >> 11) * 2^-53, in [0, 1)
//   * normal()     = Box-Muller over one uniform pair, drawn atomically:
//                    u1, u2 = uniform01(), uniform01();
//                    z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//                    (the sine branch is discarded)
//   * uniform_index(n) = floor(uniform01() * n), clamped to n - 1
//   * weighted_choice  = inverse CDF over the running sum; the first index
//                        whose cumulative weight strictly exceeds
//                        uniform01() * total wins, so boundary ties resolve
//                        toward the lower index and zero-weight entries are
//                        never selected while a positive weight exists.
//   * shuffle      = Fisher-Yates from the back using uniform_index.

#include <array>
#include <cstdint>
#include <numeric>

#include "common.hpp"

namespace som {

namespace seed_role {
// ASCII-derived role tags for substream derivation.
inline constexpr std::uint64_t params = 0x706172616d73ull;   // "params"
inline constexpr std::uint64_t data = 0x64617461ull;         // "data"
inline constexpr std::uint64_t noise = 0x6e6f697365ull;      // "noise"
inline constexpr std::uint64_t labels = 0x6c6162656c73ull;   // "labels"
inline constexpr std::uint64_t test_data = 0x7464617461ull;  // "tdata"
inline constexpr std::uint64_t test_noise = 0x746e6f6973ull; // "tnois"
inline constexpr std::uint64_t test_labels = 0x746c61626cull;// "tlabl"
inline constexpr std::uint64_t minimizer = 0x6d696e696dull;  // "minim"
inline constexpr std::uint64_t trial = 0x747269616cull;      // "trial"
inline constexpr std::uint64_t init = 0x696e6974ull;         // "init"
inline constexpr std::uint64_t order = 0x6f72646572ull;      // "order"
}  // namespace seed_role

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Substream seed = mix(mix(seed ^ role) + index * golden-ratio step).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t role,
                                 std::uint64_t index = 0) {
    std::uint64_t s = seed ^ role;
    std::uint64_t a = splitmix64(s);
    s = a + index * 0x9e3779b97f4a7c15ull;
    return splitmix64(s);
}

class rng {
  public:
    explicit rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    rng substream(std::uint64_t role, std::uint64_t index = 0) const {
        return rng(derive_seed(seed_of_state(), role, index));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
        return radius * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    Vec normal_vec(std::size_t n) {
        Vec v(n);
        for (double& x : v) x = normal();
        return v;
    }

    std::size_t uniform_index(std::size_t n) {
        const auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    // Index sampled proportionally to nonnegative weights.  Total weight must
    // be positive.
    std::size_t weighted_choice(const Vec& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw degenerate_instance("weighted_choice: total weight is zero");
        const double target = uniform01() * total;
        double cum = 0.0;
        std::size_t last_positive = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0) last_positive = i;
            cum += weights[i];
            if (cum > target) return i;
        }
        return last_positive;  // rounding pushed target past the final sum
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), uniform without replacement.
    std::vector<std::size_t> distinct_indices(std::size_t n, std::size_t k) {
        if (k > n) throw invalid_input("distinct_indices: k exceeds n");
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + uniform_index(n - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // A stable 64-bit digest of the current state, used only to derive
    // substreams from an rng that was itself seeded and never advanced.
    std::uint64_t seed_of_state() const {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < 4; ++i) s = s * 0x100000001b3ull + state_[i];
        return s;
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace som
