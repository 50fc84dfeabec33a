#include "naphtha/rng.hpp"

#include <cmath>
#include <numbers>

#include "naphtha/error.hpp"

namespace naphtha {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Rng::mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix(mix(seed) ^ (kGamma * (index + 1))));
}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix(seed ^ mix(tag));
}

std::uint64_t Rng::next_u64() {
    state_ += kGamma;
    return mix(state_);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_double_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    return next_u64() % n;
}

double Rng::gaussian() {
    double u1 = next_double_pos();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) raise(ErrorCode::NonPositiveInput, "gamma shape must be > 0");
    if (shape < 1.0) {
        double u = next_double_pos();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = gaussian();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = next_double_pos();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma(alpha[i]);
        sum += out[i];
    }
    if (sum <= 0.0) {
        // Astronomically unlikely underflow; keep the draw valid.
        for (auto& v : out) v = 1.0 / static_cast<double>(out.size());
        return out;
    }
    for (auto& v : out) v /= sum;
    return out;
}

} // namespace naphtha
