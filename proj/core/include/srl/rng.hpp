#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace srl {

// Seeded random stream. Distributions are implemented directly on top of
// the mt19937_64 bit stream so that draws are identical across standard
// library implementations. split() derives an independent child stream;
// child sequences do not overlap the parent's future draws in practice
// because the derivation hashes the parent's next output.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1): never returns exactly zero (safe for logs).
    double uniform_open() {
        double u = uniform();
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Modulo bias is below 2^-40 for the ranges used here.
        return engine_() % n;
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return mean + stddev * radius * std::cos(angle);
    }

    // Standard Gumbel: -log(-log(u)), u ~ Uniform(0,1).
    double gumbel() { return -std::log(-std::log(uniform_open())); }

    bool bernoulli(double p) { return uniform() < p; }

    Rng split() {
        std::uint64_t s = engine_();
        // SplitMix64 finalizer decorrelates the child from the raw output.
        s += 0x9e3779b97f4a7c15ULL;
        s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
        s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
        return Rng(s ^ (s >> 31));
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace srl
