#include "vlab/bp_check.hpp"

#include "vlab/sampling.hpp"

#include <cmath>
#include <limits>

namespace vlab {

namespace {

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

Mat frame_at_x0(const BPConfiguration& c)
{
    return c.frame.size() ? c.frame : tangent_frame(c.space, c.x0);
}

// orthonormal complement of a unit vector w in R^n (columns)
Mat complement_basis(const Vec& w)
{
    const int n = static_cast<int>(w.size());
    Mat q = Eigen::HouseholderQR<Mat>(w).householderQ() * Mat::Identity(n, n);
    return q.rightCols(n - 1);
}

// points of phi_map for chart offsets theta around c
std::vector<Vec> phi_chart(const BPConfiguration& c, const Mat& E, const std::vector<Mat>& tangents, const Vec& theta)
{
    const int n = c.space.n;
    BPConfiguration d = c;
    d.frame = E;
    d.r = c.r + theta(0);
    d.u = (c.u + tangents[0] * theta.segment(1, n - 1)).normalized();
    for (int i = 0; i < n; ++i)
        d.us[i] = (c.us[i] + tangents[i + 1] * theta.segment(n + i * (n - 1), n - 1)).normalized();
    return phi_map(d);
}

}  // namespace

BPConfiguration random_bp_configuration(const Space& sp, double r, RngStream& rng)
{
    BPConfiguration c;
    c.space = sp;
    c.r = r;
    Vec x0 = base_point(sp);
    if (sp.curved()) {
        // move off the base point so the frames are not axis-aligned
        const Mat E = tangent_frame(sp, x0);
        x0 = exp_map(sp, x0, (E * rng.unit_vector(sp.n) * (0.7 * rng.uniform() / sp.k)).eval());
    } else {
        for (int i = 0; i < x0.size(); ++i) x0(i) = rng.uniform();
    }
    c.x0 = x0;
    c.u = rng.unit_vector(sp.n);
    for (int i = 0; i < sp.n; ++i) c.us.push_back(rng.unit_vector(sp.n));
    return c;
}

Vec bp_center(const BPConfiguration& c)
{
    const Mat E = frame_at_x0(c);
    return exp_map(c.space, c.x0, (E * c.u * c.r).eval());
}

std::vector<Vec> phi_map(const BPConfiguration& c)
{
    const Space& sp = c.space;
    if (!(c.r > 0)) throw DomainError("phi_map: r must be positive");
    if (sp.model == Model::Spherical && c.r >= M_PI / sp.k) throw DomainError("phi_map: r must be < pi/k");
    const Mat E = frame_at_x0(c);
    const Vec z = exp_map(sp, c.x0, (E * c.u * c.r).eval());
    Mat F(E.rows(), E.cols());
    for (int j = 0; j < E.cols(); ++j) F.col(j) = parallel_transport(sp, c.x0, z, E.col(j));
    std::vector<Vec> xs;
    xs.reserve(c.us.size());
    for (const auto& ui : c.us) xs.push_back(exp_map(sp, z, (F * ui * c.r).eval()));
    return xs;
}

double simplex_volume(const Vec& u, const std::vector<Vec>& us)
{
    const int q = static_cast<int>(us.size());
    Mat m(u.size(), q);
    for (int i = 0; i < q; ++i) m.col(i) = us[i] + u;
    return std::abs(m.determinant()) / factorial(q);
}

double bp_jacobian_exact(const Space& sp, double r, double delta)
{
    const int n = sp.n;
    if (r < 0 || (sp.model == Model::Spherical && r > M_PI / sp.k)) throw DomainError("bp_jacobian_exact: r out of range");
    return factorial(n) * delta * std::pow(s_alpha(sp.alpha(), r), n * n - 1);
}

FdJacobian bp_jacobian_fd(const BPConfiguration& c, double step)
{
    const Space& sp = c.space;
    const int n = sp.n;
    if (sp.model == Model::FlatTorus2) throw DomainError("bp_jacobian_fd: use the Euclidean plane");
    if (static_cast<int>(c.us.size()) != n || c.u.size() != n) throw DomainError("bp_jacobian_fd: bad configuration");
    const double scale = std::max(c.r, 0.1);
    if (!(step >= 1e-6 * scale && step <= 1e-3 * scale)) throw DomainError("bp_jacobian_fd: step out of range");

    const Mat E = frame_at_x0(c);
    std::vector<Mat> tangents{complement_basis(c.u)};
    for (const auto& ui : c.us) tangents.push_back(complement_basis(ui));

    const std::vector<Vec> xs = phi_map(c);
    std::vector<Mat> frames;
    for (const auto& x : xs) frames.push_back(tangent_frame(sp, x));

    const int dim = n * n;
    Mat J(dim, dim);
    for (int col = 0; col < dim; ++col) {
        Vec th = Vec::Zero(dim);
        th(col) = step;
        const auto plus = phi_chart(c, E, tangents, th);
        const auto minus = phi_chart(c, E, tangents, -th);
        for (int i = 0; i < n; ++i) {
            const Vec dx = (plus[i] - minus[i]) / (2 * step);
            for (int j = 0; j < n; ++j) J(i * n + j, col) = form(sp, frames[i].col(j), dx);
        }
    }
    FdJacobian out;
    out.step = step;
    out.value = std::abs(J.determinant());
    Eigen::JacobiSVD<Mat> svd(J);
    const auto& sv = svd.singularValues();
    out.condition = sv(dim - 1) > 0 ? sv(0) / sv(dim - 1) : std::numeric_limits<double>::infinity();
    out.ill_conditioned = out.condition > 1e10;
    return out;
}

FdJacobian bp_jacobian_fd_auto(const BPConfiguration& c)
{
    const double scale = std::max(c.r, 0.1);
    FdJacobian best;
    double best_res = std::numeric_limits<double>::infinity();
    for (double f : {1e-3, 4e-4, 2e-4, 1e-4, 4e-5}) {
        const FdJacobian a = bp_jacobian_fd(c, f * scale);
        const FdJacobian b = bp_jacobian_fd(c, f * scale / 2);
        const double res = std::abs(a.value - b.value);
        if (res < best_res) {
            best_res = res;
            best = b;
            // second-order Richardson extrapolation
            best.value = (4 * b.value - a.value) / 3;
        }
    }
    return best;
}

double bp_expansion(int n, double delta, double L, double r)
{
    const int m = n * n;
    return factorial(n) * delta * (std::pow(r, m - 1) - L * std::pow(r, m + 1) / 6);
}

double bp_expansion_residual_ratio(const Space& sp, double r)
{
    const int m = sp.n * sp.n;
    const double K = sp.sectional();
    const double x2 = K * r * r;  // +(kr)^2 sphere, -(kr)^2 hyperbolic
    // s_alpha(r)/r - 1 = -x2/6 + x2^2/120 - x2^3/5040 + ...
    double g1 = 0, term = 1;
    for (int j = 1; j < 12; ++j) {
        term *= -x2 / ((2 * j) * (2 * j + 1));
        g1 += term;
    }
    const double bracket = std::expm1((m - 1) * std::log1p(g1)) + (m - 1) * x2 / 6;
    return bracket / (r * r);
}

}  // namespace vlab
