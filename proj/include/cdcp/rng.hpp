#pragma once

#include <cmath>
#include <cstdint>

namespace cdcp {

// Deterministic, platform-independent RNG stream. One stream per simulated
// path, derived from (master seed, path index), so serial and parallel runs
// produce bit-identical results regardless of worker count.
//
// Core generator is xoshiro256**; seeding goes through splitmix64. Samplers
// are implemented here rather than via std::<random> distributions because
// the draw sequence is part of the reproducibility contract.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::uint64_t x = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
        for (auto& si : s_) si = splitmix64(x);
        // discard a few outputs so nearby stream indices decorrelate
        for (int i = 0; i < 8; ++i) next_u64();
    }

    explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on (0,1): never returns 0 or 1, safe under log()
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal() {
        // Marsaglia polar method; second deviate deliberately discarded to
        // keep the per-call draw count state-free.
        for (;;) {
            double u = 2.0 * uniform() - 1.0;
            double v = 2.0 * uniform() - 1.0;
            double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    // Marsaglia-Tsang; requires shape >= 1
    double gamma(double shape, double rate) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = uniform();
            double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    // Knuth product method, chunked so the running product never underflows.
    std::uint64_t poisson(double mean) {
        std::uint64_t n = 0;
        while (mean > 60.0) {
            n += poisson_small(60.0);
            mean -= 60.0;
        }
        return n + poisson_small(mean);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t s_[4];
};

}  // namespace cdcp
