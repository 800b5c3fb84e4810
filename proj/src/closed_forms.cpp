#include "vlab/closed_forms.hpp"

#include "vlab/bp_check.hpp"
#include "vlab/constants.hpp"
#include "vlab/sampling.hpp"

#include <algorithm>

namespace vlab {

namespace {

void require_lambda(double lambda)
{
    if (!(lambda > 0)) throw DomainError("lambda must be positive");
}

void require_modelled(const Space& sp)
{
    if (sp.model == Model::FlatTorus2) throw DomainError("formula not available on the flat torus");
}

// lambda * vol B(lambda^{-1/n} rho)
double scaled_ball_volume(const Space& sp, double lambda, double rho)
{
    const double t = rho * std::pow(lambda, -1.0 / sp.n);
    if (sp.model == Model::Spherical) return lambda * ball_volume(sp, std::min(t, M_PI / sp.k));
    return lambda * ball_volume(sp, t);
}

// lambda * vol of the ball complementary to B(lambda^{-1/n} rho) on the sphere
double scaled_complement_volume(const Space& sp, double lambda, double rho)
{
    const double t = rho * std::pow(lambda, -1.0 / sp.n);
    return lambda * ball_volume(sp, std::max(0.0, M_PI / sp.k - t));
}

double scaled_s(const Space& sp, double lambda, double rho)
{
    return s_alpha(sp.alpha() * std::pow(lambda, -1.0 / sp.n), rho);
}

double normalized_range(const Space& sp, double lambda)
{
    if (sp.model == Model::Spherical) return std::pow(lambda, 1.0 / sp.n) * M_PI / sp.k;
    return std::numeric_limits<double>::infinity();
}

// integrate over [0, b] in panels that double in width
template <typename F>
double radial_integral(F&& f, double b, const QuadratureSpec& q)
{
    double total = 0, lo = 0, hi = 0.25;
    while (lo < b) {
        hi = std::min(hi, b);
        total += integrate(f, lo, hi, q);
        lo = hi;
        hi *= 2;
    }
    return total;
}

}  // namespace

double normalized_radial_cutoff(const Space& sp, double lambda)
{
    require_lambda(lambda);
    const double target = 40.0;
    const double range = normalized_range(sp, lambda);
    if (sp.model == Model::Spherical && lambda * sp.total_volume() <= target) return range;
    Space s2 = sp;
    if (sp.model == Model::FlatTorus2) s2 = Space::euclidean(2);
    const double t = ball_radius_for_volume(s2, target / lambda);
    return std::min(range, t * std::pow(lambda, 1.0 / sp.n));
}

double mean_volume_exact(const Space& sp, double lambda)
{
    require_lambda(lambda);
    require_modelled(sp);
    if (sp.model == Model::Spherical) {
        const int n = sp.n;
        return (1.0 - std::exp(-2 * sigma(n - 1) * wallis(n - 1) * lambda / std::pow(sp.k, n))) / lambda;
    }
    return 1.0 / lambda;
}

double mean_N_2d_exact(const Space& sp, double lambda)
{
    require_lambda(lambda);
    require_modelled(sp);
    if (sp.n != 2) throw DomainError("mean_N_2d_exact needs n = 2");
    const double k2 = sp.k * sp.k;
    switch (sp.model) {
    case Model::Spherical:
        return 6 - 3 * k2 / (M_PI * lambda) + std::exp(-4 * M_PI * lambda / k2) * (6 + 3 * k2 / (M_PI * lambda));
    case Model::Hyperbolic:
        return 6 + 3 * k2 / (M_PI * lambda);
    default:
        return 6;
    }
}

double vertex_density_exact(const Space& sp, double lambda, double r)
{
    require_lambda(lambda);
    require_modelled(sp);
    const int n = sp.n;
    if (r < 0 || r > normalized_range(sp, lambda) * (1 + 1e-12)) throw DomainError("vertex_density_exact: r out of range");
    const double p = std::pow(scaled_s(sp, lambda, r), n * n - 1);
    double w = std::exp(-scaled_ball_volume(sp, lambda, r));
    if (sp.model == Model::Spherical) w += std::exp(-scaled_complement_volume(sp, lambda, r));
    return a_n(n) * w * p;
}

double vertex_density_physical(const Space& sp, double lambda, double r)
{
    require_lambda(lambda);
    require_modelled(sp);
    const int n = sp.n;
    if (r < 0 || r > normalized_range(sp, lambda) * (1 + 1e-12))
        throw DomainError("vertex_density_physical: r out of range");
    return a_n(n) * std::exp(-scaled_ball_volume(sp, lambda, r)) * std::pow(scaled_s(sp, lambda, r), n * n - 1);
}

double mean_N_quadrature(const Space& sp, double lambda, const QuadratureSpec& q)
{
    require_lambda(lambda);
    require_modelled(sp);
    double b = normalized_radial_cutoff(sp, lambda);
    if (sp.model == Model::Spherical) b = std::min(b, normalized_range(sp, lambda) / 2);
    const double sg = sigma(sp.n - 1);
    return sg * radial_integral([&](double r) { return vertex_density_exact(sp, lambda, r); }, b, q);
}

double section_mean_volume_exact(const Space& sp, int s, double lambda, const QuadratureSpec& q)
{
    require_lambda(lambda);
    require_modelled(sp);
    if (s < 1 || s > sp.n) throw DomainError("section dimension out of range");
    const double b = normalized_radial_cutoff(sp, lambda);
    const double I = radial_integral(
        [&](double r) { return std::exp(-scaled_ball_volume(sp, lambda, r)) * std::pow(scaled_s(sp, lambda, r), s - 1); },
        b, q);
    return sigma(s - 1) * std::pow(lambda, -double(s) / sp.n) * I;
}

double section_mean_N_exact(const Space& sp, int s, double lambda, const QuadratureSpec& q)
{
    require_lambda(lambda);
    require_modelled(sp);
    if (s < 1 || s > sp.n) throw DomainError("section dimension out of range");
    const int n = sp.n;
    double b = normalized_radial_cutoff(sp, lambda);
    if (sp.model == Model::Spherical) b = std::min(b, normalized_range(sp, lambda) / 2);
    const double I = radial_integral(
        [&](double r) {
            double w = std::exp(-scaled_ball_volume(sp, lambda, r));
            if (sp.model == Model::Spherical) w += std::exp(-scaled_complement_volume(sp, lambda, r));
            return w * std::pow(scaled_s(sp, lambda, r), s * n - 1);
        },
        b, q);
    return delta_ns(n, s) * I;
}

double asymptotic_mean_N(int n, double scal, double lambda)
{
    require_lambda(lambda);
    return e_n(n) - d_n(n) * scal * std::pow(lambda, -2.0 / n);
}

double asymptotic_density_const_curv(const Space& sp, double lambda, double r)
{
    require_lambda(lambda);
    const int n = sp.n;
    const double K = sp.sectional();
    const double an = a_n(n), bn = b_n(n);
    const int m = n * n;
    const double second = (m - 1) * K * an / 6 * std::pow(r, m + 1) - bn * n * (n - 1) * K * std::pow(r, m + n + 1);
    return std::exp(-kappa(n) * std::pow(r, n)) * (an * std::pow(r, m - 1) - second * std::pow(lambda, -2.0 / n));
}

Estimate mc_simplex_moment(int n, std::optional<int> s, const DirectionWeight& weight, long long sample_count,
                           std::uint64_t seed)
{
    if (sample_count < 100) throw DomainError("mc_simplex_moment: sample_count must be >= 100");
    if (n < 2 || (s && (*s < 1 || *s > n))) throw DomainError("mc_simplex_moment: bad dimensions");
    RngStream rng(seed, 0);
    Accumulator acc;
    const int q = s.value_or(n);
    const double norm = s ? sigma(q - 1) * std::pow(sigma(n - 1), q) : std::pow(sigma(n - 1), n);
    Vec u = Vec::Unit(q, 0);
    std::vector<Vec> us(q), proj(q);
    for (long long i = 0; i < sample_count; ++i) {
        if (s) u = rng.unit_vector(q);
        for (int j = 0; j < q; ++j) {
            us[j] = rng.unit_vector(n);
            proj[j] = us[j].head(q);
        }
        acc.add(norm * simplex_volume(u, proj) * weight(u, us));
    }
    Estimate e;
    e.mean = acc.mean;
    e.std_error = acc.std_error();
    e.replicates = acc.count;
    e.master_seed = seed;
    return e;
}

}  // namespace vlab
