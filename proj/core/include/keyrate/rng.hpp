// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random-number utilities. Everything here is bit-reproducible
// across platforms and standard libraries: the engine is std::mt19937_64
// (bit-exact by specification), uniform doubles are built from raw 64-bit
// draws, and Gaussians use an explicit Box-Muller transform instead of
// std::normal_distribution (whose algorithm is implementation-defined).

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace keyrate {

// One step of the splitmix64 generator; also the standard 64-bit finalizer
// used to derive independent substream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives a substream seed from a master seed and one or more stream labels.
// Folding each label through splitmix64 decorrelates nearby labels (seed, 0)
// and (seed, 1) far better than plain XOR or addition would.
inline std::uint64_t mix_seed(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
}

template <typename... Rest>
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label, Rest... rest) {
    std::uint64_t s = seed ^ (label + 0x9e3779b97f4a7c15ULL);
    return mix_seed(splitmix64(s), rest...);
}

// Uniform double in [0, 1) with 53 random bits, built directly from the
// engine's output so the mapping is fully specified.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; used where log(u) must stay finite.
inline double uniform_unit_positive(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Standard-normal sampler: Box-Muller on explicit uniform draws, caching the
// second variate. Deterministic given the seed.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_unit_positive(rng_);
        const double u2 = uniform_unit(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace keyrate
