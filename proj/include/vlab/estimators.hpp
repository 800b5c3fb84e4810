#pragma once

#include "vlab/estimate.hpp"
#include "vlab/sampling.hpp"
#include "vlab/tessellation.hpp"

#include <functional>
#include <vector>

namespace vlab {

enum class Sampling {
    // nuclei revealed in order of distance from x0 until the cell is provably final
    RadialSweep,
    // Poisson process on a fixed window (ball sized for eps = 1e-9, whole sphere, torus)
    FixedWindow,
};

struct RunOptions {
    int threads = 0;  // 0: VORONOI_LAB_THREADS, else hardware concurrency
    Sampling sampling = Sampling::RadialSweep;
    int k_candidates = 0;
};

int resolve_threads(int requested);

// Runs fn(index, rng) for every replicate on a worker pool and folds the results in index order.
// A replicate that throws DegenerateInput/DegeneratePosition is redrawn from a fresh sub-stream.
struct ReplicateLog {
    long long resampled = 0;
};

template <typename R>
using ReplicateFn = std::function<R(long long, RngStream&)>;

void run_replicates(long long replicates, std::uint64_t seed, int threads, const ReplicateFn<double>& fn,
                    const std::function<void(long long, double)>& fold, ReplicateLog* log = nullptr);
void run_replicates(long long replicates, std::uint64_t seed, int threads, const ReplicateFn<std::vector<double>>& fn,
                    const std::function<void(long long, const std::vector<double>&)>& fold,
                    ReplicateLog* log = nullptr);

// cell of x0 = base point in a planar chart (n = 2), built from a radial sweep
struct TypicalCell2d {
    PlanarCell cell;
    std::vector<double> vertex_radii;
    int nuclei = 0;
};
// false when the chart cannot hold the cell (sphere at very low intensity)
bool sweep_typical_cell_2d(const Space& sp, double lambda, RngStream& rng, TypicalCell2d& out);
double typical_cell_area_2d(const Space& sp, const TypicalCell2d& c);

// generic cell of x0 = base point, with the nuclei that determine it
struct TypicalCell {
    Vec x0;
    std::vector<Vec> nuclei;
    CellSummary cell;
};
TypicalCell sample_typical_cell(const Space& sp, double lambda, RngStream& rng, const RunOptions& opt = {});

Estimate estimate_mean_volume(const Space& sp, double lambda, long long replicates, long long point_budget,
                              std::uint64_t seed, const RunOptions& opt = {});
Estimate estimate_mean_N(const Space& sp, double lambda, long long replicates, std::uint64_t seed,
                         const RunOptions& opt = {});

struct DensityHistogram {
    std::vector<double> r_edges;
    std::vector<double> mass;  // mean vertices per replicate in each bin
    std::vector<double> se;
    double overflow = 0;  // mass beyond the last edge
    Estimate mean_N;      // from the same replicates
    double total_mass() const;
};
DensityHistogram estimate_vertex_density(const Space& sp, double lambda, long long replicates,
                                         const std::vector<double>& r_edges, std::uint64_t seed,
                                         const RunOptions& opt = {});

Estimate estimate_scalar_curvature(const Space& sp, double lambda, long long replicates, std::uint64_t seed,
                                   const RunOptions& opt = {});

struct SectionStats {
    Estimate volume;
    Estimate N;
};
SectionStats estimate_section_stats(const Space& sp, int s, double lambda, long long replicates, std::uint64_t seed,
                                    long long point_budget = 4000, const RunOptions& opt = {});

struct GaussBonnetReport {
    std::vector<TessellationCounts> rows;
    long long resampled = 0;
    bool euler_constant = true;
    long long euler_value = 0;
    bool two_e_equals_three_v = true;
    Estimate f_minus_half_v;        // per realization F - V/2
    Estimate lambda_vol_minus_half_v;  // lambda vol(S) - V/2
    double curvature_reading = 0;   // (1/2pi) * (Scal/2) * vol(S)
};
GaussBonnetReport gauss_bonnet_experiment(const Space& sp, double lambda, long long replicates, std::uint64_t seed,
                                          const RunOptions& opt = {});

}  // namespace vlab
