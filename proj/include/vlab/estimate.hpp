#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace vlab {

struct Estimate {
    double mean = 0;
    double std_error = 0;
    long long replicates = 0;
    std::uint64_t master_seed = 0;
    double certified_fraction = 1.0;

    // |mean - target| in units of the standard error
    double z(double target) const { return std_error > 0 ? std::abs(mean - target) / std_error : (mean == target ? 0 : INFINITY); }
    bool within(double target, double n_se) const { return std::abs(mean - target) <= n_se * std_error; }
};

// running mean/variance (Welford), folded in replicate order
struct Accumulator {
    long long count = 0;
    double mean = 0;
    double m2 = 0;

    void add(double x)
    {
        ++count;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }
    double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
    double std_error() const { return count > 1 ? std::sqrt(variance() / count) : INFINITY; }
};

inline Estimate summarize(const std::vector<double>& xs, std::uint64_t seed)
{
    Accumulator a;
    for (double x : xs) a.add(x);
    Estimate e;
    e.mean = a.mean;
    e.std_error = a.std_error();
    e.replicates = a.count;
    e.master_seed = seed;
    return e;
}

}  // namespace vlab
