#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace regrate {

/// Splittable counter-based generator. Every stream is identified by a 64-bit
/// key; draws are a pure function of (key, counter), so forked streams never
/// share state and generation order inside one stream cannot perturb another.
/// Keys are derived by hashing (parent key, label), labels being either
/// integers (instance index) or purpose tags ("x0", "ops", ...).
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kKeyTweak)) {}

    SplitRng fork(std::uint64_t label) const { return SplitRng(mix(key_ ^ mix(label + kLabelTweak)), 0); }

    SplitRng fork(std::string_view purpose) const { return fork(fnv1a(purpose)); }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    /// Uniform in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (one value per call; the pair's second
    /// member is discarded to keep the draw count predictable).
    double gaussian() {
        double u = next_unit();
        if (u <= 0.0) u = 0x1.0p-53;
        const double v = next_unit();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
    }

private:
    SplitRng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kKeyTweak = 0x8e2f9d4b1c6a3e57ULL;
    static constexpr std::uint64_t kLabelTweak = 0x4cf5ad432745937fULL;

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += kGamma;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace regrate
