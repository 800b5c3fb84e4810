#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlab {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Vec = VecX<double>;
using Mat = Eigen::MatrixXd;

enum class Model { Euclidean, Spherical, Hyperbolic, FlatTorus2 };

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AntipodalError : GeometryError {
    using GeometryError::GeometryError;
};
struct DomainError : GeometryError {
    using GeometryError::GeometryError;
};

struct Space {
    Model model = Model::Euclidean;
    int n = 2;
    double k = 0.0;
    double period = 0.0;

    static Space euclidean(int n);
    static Space sphere(int n, double k = 1.0);
    static Space hyperbolic(int n, double k = 1.0);
    static Space torus(double period = 1.0);

    int ambient_dim() const { return curved() ? n + 1 : n; }
    bool curved() const { return model == Model::Spherical || model == Model::Hyperbolic; }
    // signed scale: +k sphere, -k hyperbolic, 0 flat
    double alpha() const;
    double sectional() const;
    double ric() const { return (n - 1) * sectional(); }
    double scal() const { return n * (n - 1) * sectional(); }
    double injectivity_radius() const;
    // sphere volume, +inf otherwise (torus: period^2)
    double total_volume() const;
    std::string name() const;
};

Model parse_model(const std::string& s);
std::string model_name(Model m);

// canonical base point: origin, or the "north pole" (0,...,0,1/k)
Vec base_point(const Space& sp);

// bilinear form of the model (Minkowski on the hyperboloid)
template <typename DA, typename DB>
typename DA::Scalar form(const Space& sp, const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b)
{
    auto s = a.dot(b);
    if (sp.model == Model::Hyperbolic) {
        const auto m = a.size() - 1;
        s -= 2 * a(m) * b(m);
    }
    return s;
}

template <typename D>
typename D::Scalar tangent_norm(const Space& sp, const Eigen::MatrixBase<D>& v)
{
    using std::sqrt;
    auto q = form(sp, v, v);
    return sqrt(q > 0 ? q : typename D::Scalar(0));
}

template <typename D>
VecX<typename D::Scalar> torus_reduce(const Space& sp, const Eigen::MatrixBase<D>& x)
{
    VecX<typename D::Scalar> y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y(i) = y(i) - sp.period * std::floor(y(i) / sp.period);
        if (y(i) >= sp.period) y(i) -= sp.period;
    }
    return y;
}

// shortest periodic displacement b - a
template <typename DA, typename DB>
VecX<typename DA::Scalar> torus_delta(const Space& sp, const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b)
{
    VecX<typename DA::Scalar> d = b - a;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d(i) -= sp.period * std::round(d(i) / sp.period);
    return d;
}

// push a point back onto the constraint surface
template <typename D>
VecX<typename D::Scalar> project(const Space& sp, const Eigen::MatrixBase<D>& x)
{
    using std::sqrt;
    using std::abs;
    VecX<typename D::Scalar> y = x;
    switch (sp.model) {
    case Model::Spherical:
        y /= y.norm() * sp.k;
        break;
    case Model::Hyperbolic: {
        const auto m = y.size() - 1;
        y(m) = sqrt(1.0 / (sp.k * sp.k) + y.head(m).squaredNorm());
        break;
    }
    case Model::FlatTorus2:
        y = torus_reduce(sp, y);
        break;
    default:
        break;
    }
    return y;
}

template <typename D>
void validate_point(const Space& sp, const Eigen::MatrixBase<D>& x, double tol = 1e-9)
{
    if (x.size() != sp.ambient_dim()) throw GeometryError("dimension mismatch");
    if (sp.model == Model::Spherical) {
        if (std::abs(sp.k * sp.k * x.squaredNorm() - 1.0) > tol) throw GeometryError("point off the sphere");
    } else if (sp.model == Model::Hyperbolic) {
        if (std::abs(sp.k * sp.k * form(sp, x, x) + 1.0) > tol || x(x.size() - 1) <= 0)
            throw GeometryError("point off the hyperboloid");
    }
}

template <typename DA, typename DB>
typename DA::Scalar distance(const Space& sp, const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b)
{
    using std::asinh;
    using std::atan2;
    using std::sqrt;
    using S = typename DA::Scalar;
    if (a.size() != b.size()) throw GeometryError("dimension mismatch");
    switch (sp.model) {
    case Model::Spherical:
        return S(2) * atan2((a - b).norm(), (a + b).norm()) / sp.k;
    case Model::Hyperbolic: {
        VecX<S> d = a - b;
        S q = form(sp, d, d);
        if (q < 0) q = 0;
        return S(2) / sp.k * asinh(sp.k * sqrt(q) / 2);
    }
    case Model::FlatTorus2:
        return torus_delta(sp, a, b).norm();
    default:
        return (a - b).norm();
    }
}

// tangent projection at x (removes the normal component)
template <typename DX, typename DV>
VecX<typename DX::Scalar> to_tangent(const Space& sp, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DV>& v)
{
    const double k2 = sp.k * sp.k;
    if (sp.model == Model::Spherical) return v - k2 * x.dot(v) * x;
    if (sp.model == Model::Hyperbolic) return v + k2 * form(sp, x, v) * x;
    return v;
}

template <typename DX, typename DV>
VecX<typename DX::Scalar> exp_map(const Space& sp, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DV>& v)
{
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    using S = typename DX::Scalar;
    const S t = tangent_norm(sp, v);
    if (t == S(0)) return x;
    const S kt = sp.k * t;
    switch (sp.model) {
    case Model::Spherical:
        return project(sp, (cos(kt) * x + sin(kt) / kt * v).eval());
    case Model::Hyperbolic:
        return project(sp, (cosh(kt) * x + sinh(kt) / kt * v).eval());
    case Model::FlatTorus2:
        return torus_reduce(sp, (x + v).eval());
    default:
        return x + v;
    }
}

template <typename DX, typename DY>
VecX<typename DX::Scalar> log_map(const Space& sp, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y)
{
    using S = typename DX::Scalar;
    switch (sp.model) {
    case Model::Spherical: {
        const S d = distance(sp, x, y);
        const double tol_antipodal = 1e-8 * M_PI / sp.k;
        if (d >= M_PI / sp.k - tol_antipodal) throw AntipodalError("log_map: antipodal points");
        VecX<S> w = to_tangent(sp, x, y);
        const S wn = w.norm();
        if (wn == S(0)) return VecX<S>::Zero(x.size());
        return w * (d / wn);
    }
    case Model::Hyperbolic: {
        const S d = distance(sp, x, y);
        VecX<S> w = to_tangent(sp, x, y);
        const S wn = tangent_norm(sp, w);
        if (wn == S(0)) return VecX<S>::Zero(x.size());
        return w * (d / wn);
    }
    case Model::FlatTorus2:
        return torus_delta(sp, x, y);
    default:
        return y - x;
    }
}

// transport along the minimizing geodesic from x to y
template <typename DX, typename DY, typename DV>
VecX<typename DX::Scalar> parallel_transport(const Space& sp, const Eigen::MatrixBase<DX>& x,
                                             const Eigen::MatrixBase<DY>& y, const Eigen::MatrixBase<DV>& v)
{
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    using S = typename DX::Scalar;
    if (!sp.curved()) return v;
    VecX<S> w = log_map(sp, x, y);
    const S d = tangent_norm(sp, w);
    if (d == S(0)) return v;
    VecX<S> u = w / d;
    const S a = form(sp, v, u);
    const S kd = sp.k * d;
    VecX<S> tangent_end;
    if (sp.model == Model::Spherical)
        tangent_end = -sp.k * sin(kd) * x + cos(kd) * u;
    else
        tangent_end = sp.k * sinh(kd) * x + cosh(kd) * u;
    VecX<S> out = v - a * u + a * tangent_end;
    return to_tangent(sp, y, out);
}

// orthonormal basis of T_x M (columns), Gram-Schmidt on the ambient axes
Mat tangent_frame(const Space& sp, const Vec& x);

// sin(at)/a, t, sinh(-at)/(-a)
double s_alpha(double alpha, double t);
double radial_jacobian(const Space& sp, double r);
double ball_volume(const Space& sp, double r);
double ball_volume_expansion(int n, double scal, double r);
// inverse of ball_volume on [0, injectivity radius]
double ball_radius_for_volume(const Space& sp, double v);

}  // namespace vlab
