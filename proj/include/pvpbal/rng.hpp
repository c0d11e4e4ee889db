#pragma once

#include <cstdint>
#include <vector>

namespace pvpbal {

// xoshiro256++ with splitmix64 seeding. Self-contained so that shuffles and
// draws are reproducible regardless of the standard library in use; every
// "deterministic per seed" contract in the library runs through this type.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    // Derives an independent stream, e.g. one per trainer or per purpose
    // ("init" vs "batch order") so adding draws in one stream cannot shift
    // another.
    Rng stream(std::uint64_t stream_id) const {
        std::uint64_t x = state_[0] ^ (0x9e3779b97f4a7c15ull * (stream_id + 1));
        return Rng(splitmix64(x) ^ state_[3]);
    }

    std::uint64_t next_u64() {
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

    // Unbiased integer in [0, bound) via Lemire's multiply-shift rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        while (true) {
            const std::uint64_t x = next_u64();
            const __uint128_t m = static_cast<__uint128_t>(x) * bound;
            const std::uint64_t low = static_cast<std::uint64_t>(m);
            if (low >= bound || low >= (0ull - bound) % bound) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool next_coin() { return (next_u64() >> 63) != 0; }

    bool next_bernoulli(double p) { return next_unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

}  // namespace pvpbal
