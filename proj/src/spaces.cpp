#include "vlab/spaces.hpp"

#include "vlab/constants.hpp"
#include "vlab/quadrature.hpp"

#include <algorithm>

namespace vlab {

Space Space::euclidean(int n)
{
    if (n < 2) throw DomainError("dimension must be >= 2");
    return {Model::Euclidean, n, 0.0, 0.0};
}

Space Space::sphere(int n, double k)
{
    if (n < 2 || !(k > 0)) throw DomainError("sphere needs n >= 2 and k > 0");
    return {Model::Spherical, n, k, 0.0};
}

Space Space::hyperbolic(int n, double k)
{
    if (n < 2 || !(k > 0)) throw DomainError("hyperbolic space needs n >= 2 and k > 0");
    return {Model::Hyperbolic, n, k, 0.0};
}

Space Space::torus(double period)
{
    if (!(period > 0)) throw DomainError("torus period must be positive");
    return {Model::FlatTorus2, 2, 0.0, period};
}

double Space::alpha() const
{
    if (model == Model::Spherical) return k;
    if (model == Model::Hyperbolic) return -k;
    return 0.0;
}

double Space::sectional() const
{
    return model == Model::Spherical ? k * k : model == Model::Hyperbolic ? -k * k : 0.0;
}

double Space::injectivity_radius() const
{
    if (model == Model::Spherical) return M_PI / k;
    if (model == Model::FlatTorus2) return period / 2;
    return std::numeric_limits<double>::infinity();
}

double Space::total_volume() const
{
    if (model == Model::Spherical) return sigma(n) / std::pow(k, n);
    if (model == Model::FlatTorus2) return period * period;
    return std::numeric_limits<double>::infinity();
}

std::string model_name(Model m)
{
    switch (m) {
    case Model::Spherical: return "sphere";
    case Model::Hyperbolic: return "hyperbolic";
    case Model::FlatTorus2: return "torus";
    default: return "euclidean";
    }
}

std::string Space::name() const { return model_name(model); }

Model parse_model(const std::string& s)
{
    if (s == "sphere" || s == "spherical") return Model::Spherical;
    if (s == "hyperbolic") return Model::Hyperbolic;
    if (s == "torus") return Model::FlatTorus2;
    if (s == "euclidean") return Model::Euclidean;
    throw DomainError("unknown model '" + s + "'");
}

Vec base_point(const Space& sp)
{
    Vec x = Vec::Zero(sp.ambient_dim());
    if (sp.curved()) x(sp.n) = 1.0 / sp.k;
    return x;
}

Mat tangent_frame(const Space& sp, const Vec& x)
{
    const int N = sp.ambient_dim();
    Mat frame(N, sp.n);
    if (!sp.curved()) return Mat::Identity(N, sp.n);
    int found = 0;
    for (int i = 0; i < N && found < sp.n; ++i) {
        Vec w = to_tangent(sp, x, Vec::Unit(N, i));
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < found; ++j) w -= form(sp, w, frame.col(j)) * frame.col(j);
        const double nw = tangent_norm(sp, w);
        if (nw < 1e-6) continue;
        frame.col(found++) = w / nw;
    }
    if (found < sp.n) throw GeometryError("tangent_frame: degenerate point");
    return frame;
}

double s_alpha(double alpha, double t)
{
    const double z = alpha * t;
    if (std::abs(z) < 1e-4) {
        // sin(z)/z and sinh(z)/z share the series in z^2 up to sign
        const double z2 = (alpha > 0 ? 1.0 : -1.0) * z * z;
        return t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    }
    if (alpha > 0) return std::sin(z) / alpha;
    return std::sinh(-z) / (-alpha);
}

double radial_jacobian(const Space& sp, double r)
{
    if (r < 0 || (sp.model == Model::Spherical && r > M_PI / sp.k * (1 + 1e-12)))
        throw DomainError("radial_jacobian: r out of range");
    return std::pow(s_alpha(sp.alpha(), r), sp.n - 1);
}

namespace {

// y - sin y and sinh y - y without cancellation
double y_minus_sin(double y)
{
    if (std::abs(y) > 0.5) return y - std::sin(y);
    double term = y * y * y / 6, sum = 0;
    for (int j = 0; j < 12; ++j) {
        sum += term;
        term *= -y * y / ((2 * j + 4) * (2 * j + 5));
    }
    return sum;
}

double sinh_minus_y(double y)
{
    if (std::abs(y) > 0.5) return std::sinh(y) - y;
    double term = y * y * y / 6, sum = 0;
    for (int j = 0; j < 12; ++j) {
        sum += term;
        term *= y * y / ((2 * j + 4) * (2 * j + 5));
    }
    return sum;
}

}  // namespace

double ball_volume(const Space& sp, double r)
{
    if (r < 0) throw DomainError("ball_volume: negative radius");
    const int n = sp.n;
    switch (sp.model) {
    case Model::Euclidean:
        return kappa(n) * std::pow(r, n);
    case Model::FlatTorus2:
        if (r > sp.period / 2 * (1 + 1e-12)) throw DomainError("ball_volume: radius beyond half period");
        return M_PI * r * r;
    default:
        break;
    }
    const double k = sp.k;
    const bool sph = sp.model == Model::Spherical;
    if (sph && r > M_PI / k * (1 + 1e-12)) throw DomainError("ball_volume: radius beyond pi/k");
    if (sph) r = std::min(r, M_PI / k);
    const double x = k * r;
    if (n == 1) return 2 * r;
    if (n == 2) {
        const double h = sph ? std::sin(x / 2) : std::sinh(x / 2);
        return 4 * M_PI / (k * k) * h * h;
    }
    if (n == 3) return M_PI / (k * k * k) * (sph ? y_minus_sin(2 * x) : sinh_minus_y(2 * x));
    const double a = sp.alpha();
    QuadratureSpec q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-13;
    return sigma(n - 1) * integrate([&](double t) { return std::pow(s_alpha(a, t), n - 1); }, 0.0, r, q);
}

double ball_volume_expansion(int n, double scal, double r)
{
    const double kn = kappa(n);
    return kn * std::pow(r, n) - kn * scal * std::pow(r, n + 2) / (6.0 * (n + 2));
}

double ball_radius_for_volume(const Space& sp, double v)
{
    if (v < 0) throw DomainError("ball_radius_for_volume: negative volume");
    if (v == 0) return 0;
    const int n = sp.n;
    switch (sp.model) {
    case Model::Euclidean:
        return std::pow(v / kappa(n), 1.0 / n);
    case Model::FlatTorus2:
        return std::sqrt(v / M_PI);
    default:
        break;
    }
    const double k = sp.k;
    if (sp.model == Model::Spherical && v >= sp.total_volume()) return M_PI / k;
    if (n == 2) {
        const double s = std::sqrt(v * k * k / (4 * M_PI));
        return 2 / k * (sp.model == Model::Spherical ? std::asin(std::min(1.0, s)) : std::asinh(s));
    }
    // safeguarded Newton
    double lo = 0, hi = sp.model == Model::Spherical ? M_PI / k : 1.0;
    if (sp.model == Model::Hyperbolic)
        while (ball_volume(sp, hi) < v) hi *= 2;
    double r = std::min(std::pow(v / kappa(n), 1.0 / n), hi);
    for (int it = 0; it < 200; ++it) {
        const double f = ball_volume(sp, r) - v;
        if (f > 0) hi = r; else lo = r;
        const double dv = sigma(n - 1) * radial_jacobian(sp, r);
        double next = dv > 0 ? r - f / dv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-12 * std::max(1.0, r) || hi - lo <= 1e-15 * std::max(1.0, r)) return next;
        r = next;
    }
    return r;
}

}  // namespace vlab
