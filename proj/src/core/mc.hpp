#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "core/configspace.hpp"

namespace knotmc {

/// Monte Carlo estimate: value, plain sample standard error, sample count,
/// seed and a strategy descriptor. stderr is sample stddev / sqrt(n).
struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long long n = 0;
    uint64_t seed = 0;
    std::string strategy;
    long long nonfinite = 0;

    static Estimate exact(double v) {
        Estimate e;
        e.value = v;
        e.n = 1;
        e.strategy = "exact";
        return e;
    }
};

/// Non-finite samples exceeded the abort threshold (0.01% of n).
class NumericAbort : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Generic driver: averages weighted_value(seed, index) over index
/// 0..n-1. Samples are accumulated Kahan-compensated in fixed chunks of
/// 4096, chunk sums are reduced by a fixed-shape pairwise binary tree, so
/// the result is bit-identical for any worker count. Non-finite values are
/// excluded from the sum, counted, and abort the run beyond 0.01% of n.
Estimate run_mc(long long n, uint64_t seed, int workers,
                const std::function<double(uint64_t, uint64_t)>& weighted_value);

/// The integration domain of an invariant term.
struct Domain {
    int s = 0;
    int t = 0;
    int m = 4;
    const LongKnot* knot = nullptr;
};

/// Unbiased importance-sampled integral of the integrand over C_{s,t}(f)
/// under the proposal. With antithetic=true every sample is averaged with
/// its reflection through the proposal anchors.
Estimate integrate(const std::function<double(const ConfigurationPoint&)>& integrand, const Domain& domain,
                   const ProposalSpec& spec, long long n, uint64_t seed, bool antithetic = false,
                   int workers = 1);

}  // namespace knotmc
