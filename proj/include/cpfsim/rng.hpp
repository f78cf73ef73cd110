#pragma once

// Seeded randomness with platform-independent draw paths. All sampling in
// the project goes through these helpers so that a (seed, stream) pair pins
// the output bit-for-bit; no wall-clock seeding anywhere.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace cpfsim {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Seed for an independent stream derived from (seed, index); splitmix64
    /// of the pair decorrelates neighbouring indices.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Independent stream derived from (seed, index); used to make
    /// per-setting / per-input sampling order-independent.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_seed(seed, index));
    }

    /// Uniform double in [0, 1) from the top 53 bits; avoids the
    /// implementation-defined std distributions.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on the uniform path.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// One categorical draw from `probs` (need not be exactly normalized;
    /// the tail bin absorbs rounding).
    int categorical(const std::vector<double>& probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            acc += probs[k];
            if (u < acc) return static_cast<int>(k);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    /// Multinomial counts over `probs` from `shots` independent draws.
    std::vector<long> multinomial(long shots, const std::vector<double>& probs) {
        if (shots < 0) throw std::invalid_argument("multinomial: negative shot count");
        std::vector<long> counts(probs.size(), 0);
        for (long s = 0; s < shots; ++s) ++counts[categorical(probs)];
        return counts;
    }

    long binomial(long n, double p) {
        long k = 0;
        for (long s = 0; s < n; ++s)
            if (uniform() < p) ++k;
        return k;
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cpfsim
