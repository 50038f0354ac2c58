#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace knotmc {

// Counter-based splittable randomness. Every Monte Carlo sample draws from
// its own substream keyed by (seed, sample index), so results do not depend
// on how samples are distributed over workers.
inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t state) : state_(state) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1]
    double next_unit_open0() { return 1.0 - next_unit(); }

    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit_open0();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    void fill_gaussian(std::span<double> out) {
        for (double& v : out) v = next_gaussian();
    }

    // uniform direction on S^{n-1}
    void next_direction(std::span<double> out) {
        for (;;) {
            fill_gaussian(out);
            double s = 0.0;
            for (double v : out) s += v * v;
            if (s > 1e-24) {
                double inv = 1.0 / std::sqrt(s);
                for (double& v : out) v *= inv;
                return;
            }
        }
    }

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline SplitMix64 substream(uint64_t seed, uint64_t index) {
    return SplitMix64(mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ull)));
}

// Base-2 van der Corput radical inverse in [0,1).
inline double van_der_corput(uint64_t i) {
    uint64_t r = 0;
    for (int b = 0; b < 64; ++b) {
        r = (r << 1) | (i & 1);
        i >>= 1;
    }
    return static_cast<double>(r >> 11) * 0x1.0p-53;
}

}  // namespace knotmc
