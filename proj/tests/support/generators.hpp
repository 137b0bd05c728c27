#pragma once

// Hand-rolled generators for property tests. Every generator is a pure
// function of the engine state, so a failing case reproduces from its seed.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Source {
public:
    explicit Source(std::uint64_t seed) : engine_(seed) {}

    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    std::size_t size(std::size_t lo, std::size_t hi)
    {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    bool coin() { return unit() < 0.5; }

    /// Positive samples, log-uniform over [lo, hi], sometimes with repeats.
    std::vector<double> positives(std::size_t min_len, std::size_t max_len, double lo = 1e-2, double hi = 1e2)
    {
        std::vector<double> v(size(min_len, max_len));
        for (auto& x : v) x = log_uniform(lo, hi);
        if (v.size() > 2 && unit() < 0.1) v[1] = v[0];
        return v;
    }

    std::vector<double> constant(std::size_t min_len, std::size_t max_len, double lo = 1e-2, double hi = 1e2)
    {
        return std::vector<double>(size(min_len, max_len), log_uniform(lo, hi));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace gen
