#pragma once

#include "vlab/spaces.hpp"

#include <vector>

namespace vlab {

class RngStream;

// Circumscribed-ball coordinates of an n-tuple around x0.
// u and us are coordinates in R^n: u in the frame at x0, us in that frame
// transported to z = exp_{x0}(r u).
struct BPConfiguration {
    Space space;
    Vec x0;
    Mat frame;  // orthonormal frame of T_{x0}M (columns); empty = tangent_frame(x0)
    double r = 0;
    Vec u;
    std::vector<Vec> us;
};

BPConfiguration random_bp_configuration(const Space& sp, double r, RngStream& rng);

// z = exp_{x0}(r u), and x_i = exp_z(r u_i)
Vec bp_center(const BPConfiguration& c);
std::vector<Vec> phi_map(const BPConfiguration& c);

// |det[u_1 + u, ..., u_q + u]| / q!, the simplex spanned by -u, u_1, ..., u_q
double simplex_volume(const Vec& u, const std::vector<Vec>& us);

double bp_jacobian_exact(const Space& sp, double r, double delta);

struct FdJacobian {
    double value = 0;
    double condition = 0;
    double step = 0;
    bool ill_conditioned = false;
};

// central differences of phi_map in the chart (r, angles of u, angles of each u_i),
// differentials measured in orthonormal frames at each x_i
FdJacobian bp_jacobian_fd(const BPConfiguration& c, double step);
// picks the step whose Richardson pair agrees best
FdJacobian bp_jacobian_fd_auto(const BPConfiguration& c);

double bp_expansion(int n, double delta, double L, double r);

// (exact - expansion) / (n! delta r^{n^2+1}) on a constant-curvature space, L = (n^2 - 1) K,
// evaluated without cancellation (series for sin(x)/x - 1, log1p/expm1)
double bp_expansion_residual_ratio(const Space& sp, double r);

}  // namespace vlab
