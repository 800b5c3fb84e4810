#pragma once

#include "vlab/estimate.hpp"
#include "vlab/quadrature.hpp"
#include "vlab/spaces.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace vlab {

double mean_volume_exact(const Space& sp, double lambda);
// n = 2 only
double mean_N_2d_exact(const Space& sp, double lambda);

// density of normalized vertices in normalized radius r (per unit direction).
// On the sphere this is the two-exponential form, folded onto the smaller circumradius.
double vertex_density_exact(const Space& sp, double lambda, double r);
// single-term density over the whole normalized range (histogram target)
double vertex_density_physical(const Space& sp, double lambda, double r);

double mean_N_quadrature(const Space& sp, double lambda, const QuadratureSpec& q = {});
double section_mean_volume_exact(const Space& sp, int s, double lambda, const QuadratureSpec& q = {});
double section_mean_N_exact(const Space& sp, int s, double lambda, const QuadratureSpec& q = {});

double asymptotic_mean_N(int n, double scal, double lambda);
double asymptotic_density_const_curv(const Space& sp, double lambda, double r);

// upper end of the normalized radial range where exp(-lambda vol B) is still above e^{-40}
double normalized_radial_cutoff(const Space& sp, double lambda);

// weight(u, u_1..u_k) multiplies the simplex volume inside the direction integral
using DirectionWeight = std::function<double(const Vec& u, const std::vector<Vec>& us)>;

// Monte Carlo value of the direction integral of the simplex volume times weight.
// Without s: u fixed, integral over u_1..u_n in S^{n-1}. With s: integral over u in S^{s-1}
// and u_1..u_s in S^{n-1}, projected onto the first s coordinates.
Estimate mc_simplex_moment(int n, std::optional<int> s, const DirectionWeight& weight, long long sample_count,
                           std::uint64_t seed);

}  // namespace vlab
