#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace naphtha {

// SplitMix64 (Steele, Lea, Flood 2014). Counter-based: the state advances by a
// fixed odd gamma and each output is a finalizer of the state, so independent
// substreams can be derived for (seed, index) pairs. Every random draw in the
// project goes through this generator; the exact update and substream rules
// below are part of the reproducibility contract (see README).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Substream for a (seed, index) pair: state0 = mix(mix(seed) ^ GAMMA*(index+1)).
    static Rng substream(std::uint64_t seed, std::uint64_t index);

    // mix(seed ^ mix(tag)) - for deriving auxiliary seeds (fold seeds, shuffles).
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double next_double();

    // Uniform on (0, 1]; safe as a log/pow argument.
    double next_double_pos();

    double uniform(double lo, double hi);

    // Uniform integer in [0, n); n > 0. Plain modulo reduction (documented choice;
    // the bias at 64 bits is irrelevant for dataset indices).
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal via Box-Muller; consumes exactly two draws per call.
    double gaussian();

    // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through shape + 1.
    double gamma(double shape);

    // Dirichlet with per-entry concentrations: normalized gamma draws.
    std::vector<double> dirichlet(std::span<const double> alpha);

    // Fisher-Yates, swaps indices i and i + next_below(n - i).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(next_below(v.size() - i));
            std::swap(v[i], v[j]);
        }
    }

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t state_;
};

} // namespace naphtha
