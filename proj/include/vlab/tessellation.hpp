#pragma once

#include "vlab/estimate.hpp"
#include "vlab/sampling.hpp"
#include "vlab/spaces.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace vlab {

struct DegenerateInput : GeometryError {
    using GeometryError::GeometryError;
};
struct DegeneratePosition : GeometryError {
    using GeometryError::GeometryError;
};
struct UncertifiedCell : GeometryError {
    using GeometryError::GeometryError;
};

struct VoronoiVertex {
    Vec point;
    std::vector<int> generators;  // cloud indices, x0 implicit
    double r = 0;
    double r_norm = 0;  // lambda^{1/n} r, set by normalize_vertex
    Vec u;              // unit direction in T_{x0}M (ambient), empty if undefined
};

struct CellSummary {
    std::vector<VoronoiVertex> vertices;
    int vertex_count = 0;
    std::optional<Estimate> volume;
    // every edge of the found vertex set has both endpoints found
    bool closed = false;
    bool certified = false;
    int candidates_used = 0;
};

// centers equidistant from the n+1 points, with radius
std::vector<std::pair<Vec, double>> circumcenters(const Space& sp, const std::vector<Vec>& points);

bool cell_contains(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const Vec& x);

// k_candidates <= 0 uses max(4n, 30); escalates by doubling.
// window (optional) clears `certified` when a circumball leaves it.
CellSummary enumerate_cell_vertices(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, int k_candidates = 0,
                                    const Window* window = nullptr);
// all n-subsets of the cloud, emptiness checked against every point
CellSummary enumerate_cell_vertices_brute(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud);

void normalize_vertex(const Space& sp, const Vec& x0, double lambda, VoronoiVertex& v);

Estimate cell_volume_mc(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const CellSummary& cell,
                        long long point_budget, RngStream& rng);

// geodesic polygon ordered counterclockwise around x0; plane = 2 orthonormal tangent columns at x0
// (defaults to tangent_frame when n = 2)
double polygon_area_2d(const Space& sp, const Vec& x0, const std::vector<Vec>& vertices, const Mat& plane = Mat());

// cell vertices ordered by angle around x0 in the given tangent plane
std::vector<Vec> order_around(const Space& sp, const Vec& x0, const std::vector<VoronoiVertex>& vertices,
                              const Mat& plane);

struct TessellationCounts {
    long long F = 0, E = 0, V = 0, euler = 0;
};

// sphere (n = 2) or flat torus
TessellationCounts full_tessellation_counts(const Space& sp, const std::vector<Vec>& cloud);

// basis: s orthonormal ambient tangent vectors at x0 (columns)
CellSummary section_cell_vertices(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const Mat& basis,
                                  int k_candidates = 0);
Estimate section_cell_volume_mc(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const Mat& basis,
                                long long point_budget, RngStream& rng);

// Planar chart of a 2-D cell. The bisector of x0 and a nucleus at distance d in
// direction w is the line w.p = chart_offset(d / 2): gnomonic (sphere), Klein (hyperbolic), identity (flat).
double chart_offset(const Space& sp, double d);
double chart_distance(const Space& sp, double rho);
Vec chart_to_point(const Space& sp, const Vec& x0, const Mat& frame, const Eigen::Vector2d& p);

struct PlanarCell {
    std::vector<Eigen::Vector2d> vertices;  // counterclockwise
    std::vector<std::array<int, 2>> generators;
    bool bounded = false;
    double max_norm = 0;
};

// intersection of the half-planes dirs[i].p <= offsets[i] (offsets > 0)
PlanarCell halfplane_cell(const std::vector<Eigen::Vector2d>& dirs, const std::vector<double>& offsets);

}  // namespace vlab
