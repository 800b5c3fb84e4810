#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace vlab {

struct QuadratureSpec {
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    unsigned max_depth = 15;
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// adaptive G7K15; throws when the error estimate misses both tolerances
template <typename F>
double integrate(F&& f, double a, double b, const QuadratureSpec& q = {})
{
    double err = 0, l1 = 0;
    // ask Boost for a little more than requested, its estimate is pessimistic on smooth panels
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, q.max_depth, q.rel_tol * 0.1,
                                                                                    &err, &l1);
    if (!(err <= q.abs_tol || err <= q.rel_tol * std::abs(v)) || !std::isfinite(v))
        throw QuadratureError("quadrature did not converge");
    return v;
}

}  // namespace vlab
