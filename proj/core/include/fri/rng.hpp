#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace fri {

/// Deterministic, platform-independent random stream (xorshift-based).
/// std:: distributions are implementation-defined, so everything that must
/// reproduce byte-for-byte goes through this.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ull;
    }

    std::uint64_t next() {
        // xorshift64*
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free would bias; rejection keeps determinism anyway.
        const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        while (true) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller (no cached spare: keeps the stream
    /// position a pure function of call count).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    /// Derives an independent stream seed from (master, label, index);
    /// used so sub-steps and parallel draws are schedule-independent.
    static std::uint64_t derive(std::uint64_t master, std::string_view label,
                                std::uint64_t index = 0) {
        std::uint64_t h = splitmix(master);
        for (char c : label) h = splitmix(h ^ static_cast<std::uint64_t>(c));
        return splitmix(h ^ index);
    }

  private:
    std::uint64_t state_;
};

}  // namespace fri
