// Copyright 2026 The Unravel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNRAVEL_RNG_H
#define UNRAVEL_RNG_H

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace unravel {

/// Random streams used by the simulators. Keys are derived from
/// (seed, stream, indices...) so every shot / resample / trajectory owns an
/// independent generator and results do not depend on execution order.
enum class Stream : std::uint64_t {
    Shots = 1,
    Readout = 2,
    Bootstrap = 3,
    Calibration = 4,
    Jump = 5,
    Homodyne = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
    for (std::uint64_t p : path) {
        h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Counter-based generator (SplitMix64 output function over key + counter).
/// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
class KeyedRng {
   public:
    using result_type = std::uint64_t;

    explicit constexpr KeyedRng(std::uint64_t key) noexcept : key_(key) {
    }
    KeyedRng(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> path) noexcept
        : key_(derive_key(seed, stream, path)) {
    }

    static constexpr result_type min() noexcept {
        return 0;
    }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }
    constexpr result_type operator()() noexcept {
        return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Index drawn from an (approximately normalized) probability vector.
    std::size_t categorical(std::span<const double> probabilities) noexcept {
        double u = uniform();
        double acc = 0;
        std::size_t last_positive = 0;
        for (std::size_t k = 0; k < probabilities.size(); k++) {
            if (probabilities[k] <= 0) {
                continue;
            }
            last_positive = k;
            acc += probabilities[k];
            if (u < acc) {
                return k;
            }
        }
        // Round-off left u above the accumulated mass.
        return last_positive;
    }

   private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Multinomial draw of n trials over `probabilities` by sequential binomials.
inline std::vector<std::uint64_t> sample_multinomial(std::uint64_t n, std::span<const double> probabilities,
                                                     KeyedRng &rng) {
    std::vector<std::uint64_t> out(probabilities.size(), 0);
    double remaining_mass = 1.0;
    for (std::size_t k = 0; k < probabilities.size() && n > 0; k++) {
        if (k + 1 == probabilities.size()) {
            out[k] = n;
            break;
        }
        double p = remaining_mass > 0 ? probabilities[k] / remaining_mass : 0.0;
        p = std::min(1.0, std::max(0.0, p));
        std::binomial_distribution<std::uint64_t> binom(n, p);
        out[k] = binom(rng);
        n -= out[k];
        remaining_mass -= probabilities[k];
    }
    return out;
}

}  // namespace unravel

#endif
