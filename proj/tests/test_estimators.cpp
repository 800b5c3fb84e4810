#include "vlab/closed_forms.hpp"
#include "vlab/constants.hpp"
#include "vlab/estimators.hpp"

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

using namespace vlab;

namespace {

RunOptions window_opts()
{
    RunOptions o;
    o.sampling = Sampling::FixedWindow;
    return o;
}

bool combined_within(const Estimate& a, const Estimate& b, double n_se)
{
    return std::abs(a.mean - b.mean) <= n_se * std::hypot(a.std_error, b.std_error);
}

}  // namespace

TEST_SUITE("estimators")
{
    TEST_CASE("mean cell volume")
    {
        CHECK(estimate_mean_volume(Space::hyperbolic(2), 20, 2000, 4000, 101).within(1.0 / 20, 4));
        CHECK(estimate_mean_volume(Space::sphere(2), 20, 2000, 4000, 102).within(mean_volume_exact(Space::sphere(2), 20), 4));
        CHECK(estimate_mean_volume(Space::euclidean(2), 20, 2000, 4000, 103, window_opts()).within(1.0 / 20, 4));
        CHECK(estimate_mean_volume(Space::hyperbolic(3), 20, 200, 4000, 104).within(1.0 / 20, 4));
    }

    TEST_CASE("mean vertex count")
    {
        CHECK(estimate_mean_N(Space::sphere(2), 50, 5000, 111).within(5.98090, 4));
        CHECK(estimate_mean_N(Space::hyperbolic(2), 10, 5000, 112).within(6.09549, 4));
        CHECK(estimate_mean_N(Space::euclidean(3), 100, 150, 113, window_opts()).within(e_n(3), 4));
        CHECK(estimate_mean_N(Space::sphere(3), 30, 150, 114).within(mean_N_quadrature(Space::sphere(3), 30), 4));
    }

    TEST_CASE("results do not depend on the thread count")
    {
        RunOptions one, many;
        one.threads = 1;
        many.threads = 5;
        const Estimate a = estimate_mean_N(Space::hyperbolic(2), 10, 3000, 121, one);
        const Estimate b = estimate_mean_N(Space::hyperbolic(2), 10, 3000, 121, many);
        CHECK(a.mean == b.mean);
        CHECK(a.std_error == b.std_error);
        const Estimate c = estimate_mean_volume(Space::sphere(3), 40, 40, 500, 122, one);
        const Estimate d = estimate_mean_volume(Space::sphere(3), 40, 40, 500, 122, many);
        CHECK(c.mean == d.mean);
    }

    TEST_CASE("standard error scales as one over root replicates")
    {
        const Estimate a = estimate_mean_N(Space::hyperbolic(2), 10, 4000, 131);
        const Estimate b = estimate_mean_N(Space::hyperbolic(2), 10, 16000, 132);
        CHECK(a.std_error / b.std_error == doctest::Approx(2).epsilon(0.2));
    }

    TEST_CASE("vertex density histogram")
    {
        const Space e2 = Space::euclidean(2);
        std::vector<double> edges;
        for (int i = 0; i <= 10; ++i) edges.push_back(0.25 * i);
        const DensityHistogram h = estimate_vertex_density(e2, 20, 3000, edges, 141, window_opts());
        for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
            const double exact =
                2 * M_PI * integrate([&](double r) { return vertex_density_exact(e2, 20, r); }, edges[b], edges[b + 1]);
            // empty tail bins have zero sample SE; fall back to the Poisson SE of the expected mass
            const double se = std::max(h.se[b], std::sqrt(exact / 3000));
            CHECK(std::abs(h.mass[b] - exact) <= 4 * se);
        }
        CHECK(h.total_mass() == doctest::Approx(h.mean_N.mean).epsilon(1e-12));

        // chi-square against the sphere density
        const Space s2 = Space::sphere(2);
        const std::vector<double> grid{0, 0.4, 0.7, 1.0, 1.3, 1.7, 2.5};
        const DensityHistogram hs = estimate_vertex_density(s2, 50, 5000, grid, 142);
        double chi2 = 0;
        int dof = 0;
        for (std::size_t b = 0; b + 1 < grid.size(); ++b) {
            if (!(hs.se[b] > 0)) continue;
            const double exact =
                2 * M_PI * integrate([&](double r) { return vertex_density_physical(s2, 50, r); }, grid[b], grid[b + 1]);
            chi2 += std::pow((hs.mass[b] - exact) / hs.se[b], 2);
            ++dof;
        }
        CHECK(chi2 < boost::math::quantile(boost::math::chi_squared(dof), 0.99));
    }

    TEST_CASE("scalar curvature read from vertex counts")
    {
        CHECK(estimate_scalar_curvature(Space::sphere(2), 200, 200000, 151).within(2, 4));
        CHECK(estimate_scalar_curvature(Space::hyperbolic(2), 200, 200000, 152).within(-2, 4));
        CHECK(estimate_scalar_curvature(Space::euclidean(2), 200, 20000, 153, window_opts()).within(0, 4));
    }

    TEST_CASE("section statistics")
    {
        const Space s2 = Space::sphere(2);
        const SectionStats full = estimate_section_stats(s2, 2, 20, 2000, 161);
        CHECK(combined_within(full.volume, estimate_mean_volume(s2, 20, 2000, 4000, 162), 4));
        CHECK(combined_within(full.N, estimate_mean_N(s2, 20, 2000, 163), 4));

        const Space h3 = Space::hyperbolic(3);
        const SectionStats sec = estimate_section_stats(h3, 2, 200, 1000, 164);
        CHECK(sec.volume.within(section_mean_volume_exact(h3, 2, 200), 4));
        CHECK(sec.N.within(section_mean_N_exact(h3, 2, 200), 4));

        const SectionStats line = estimate_section_stats(Space::hyperbolic(2), 1, 20, 2000, 165);
        CHECK(line.volume.within(section_mean_volume_exact(Space::hyperbolic(2), 1, 20), 4));
        CHECK(line.N.mean == 2);
    }

    TEST_CASE("Gauss-Bonnet per realization")
    {
        const GaussBonnetReport s = gauss_bonnet_experiment(Space::sphere(2), 5, 100, 171);
        CHECK(s.rows.size() == 100);
        CHECK(s.euler_constant);
        CHECK(s.euler_value == 2);
        CHECK(s.two_e_equals_three_v);
        CHECK(s.f_minus_half_v.mean == 2);
        CHECK(s.f_minus_half_v.std_error == 0);
        for (const auto& r : s.rows) CHECK(r.euler == 2);

        const GaussBonnetReport t = gauss_bonnet_experiment(Space::torus(1), 100, 30, 172);
        CHECK(t.euler_constant);
        CHECK(t.euler_value == 0);
        for (const auto& r : t.rows) CHECK(2 * r.E == 3 * r.V);
        CHECK_THROWS(gauss_bonnet_experiment(Space::hyperbolic(2), 5, 10, 1));
    }
}
