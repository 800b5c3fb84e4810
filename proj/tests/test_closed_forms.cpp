#include "vlab/closed_forms.hpp"
#include "vlab/constants.hpp"

#include <doctest.h>

using namespace vlab;

TEST_SUITE("closed_forms")
{
    TEST_CASE("mean cell volume")
    {
        for (double lam : {0.5, 3.0, 40.0}) {
            CHECK(mean_volume_exact(Space::hyperbolic(2), lam) == 1 / lam);
            CHECK(mean_volume_exact(Space::hyperbolic(3, 2.0), lam) == 1 / lam);
            CHECK(mean_volume_exact(Space::sphere(2), lam) ==
                  doctest::Approx(-std::expm1(-4 * M_PI * lam) / lam).epsilon(1e-14));
        }
        CHECK(100 * mean_volume_exact(Space::sphere(2), 100) == doctest::Approx(1).epsilon(1e-15));
        CHECK_THROWS(mean_volume_exact(Space::torus(1), 10));
    }

    TEST_CASE("two-dimensional vertex count")
    {
        CHECK(mean_N_2d_exact(Space::euclidean(2), 7) == 6);
        CHECK(mean_N_2d_exact(Space::hyperbolic(2), 10) == doctest::Approx(6 + 3 / (10 * M_PI)).epsilon(1e-14));
        CHECK(mean_N_2d_exact(Space::hyperbolic(2), 10) == doctest::Approx(6.0954930).epsilon(1e-8));
        CHECK(mean_N_2d_exact(Space::sphere(2), 50) == doctest::Approx(5.9809014).epsilon(1e-8));
    }

    TEST_CASE("Euclidean vertex density")
    {
        for (double r : {0.1, 0.8, 2.0})
            CHECK(vertex_density_exact(Space::euclidean(2), 13, r) ==
                  doctest::Approx(6 * M_PI * r * r * r * std::exp(-M_PI * r * r)).epsilon(1e-13));
    }

    TEST_CASE("sphere density has two equal terms at the equator")
    {
        const Space s2 = Space::sphere(2);
        for (double lam : {2.0, 50.0}) {
            const double mid = std::sqrt(lam) * M_PI / 2;
            CHECK(vertex_density_exact(s2, lam, mid) ==
                  doctest::Approx(2 * vertex_density_physical(s2, lam, mid)).epsilon(1e-13));
        }
        // away from the equator the antipodal term is present but smaller
        const double mid = std::sqrt(2.0) * M_PI / 2;
        const double both = vertex_density_exact(s2, 2, 0.5 * mid), one = vertex_density_physical(s2, 2, 0.5 * mid);
        CHECK(both > one);
        CHECK(both < 2 * one);
    }

    TEST_CASE("quadrature agrees with the 2-D closed forms")
    {
        for (double lam : {1.0, 10.0, 100.0}) {
            CHECK(std::abs(mean_N_quadrature(Space::sphere(2), lam) - mean_N_2d_exact(Space::sphere(2), lam)) < 1e-8);
            CHECK(std::abs(mean_N_quadrature(Space::hyperbolic(2), lam) - mean_N_2d_exact(Space::hyperbolic(2), lam)) < 1e-8);
        }
        CHECK(std::abs(mean_N_quadrature(Space::hyperbolic(2), 10) - (6 + 3 / (10 * M_PI))) < 1e-8);
        CHECK(std::abs(mean_N_quadrature(Space::euclidean(3), 5) - e_n(3)) < 1e-8);
    }

    TEST_CASE("flat limit of the sphere")
    {
        CHECK(std::abs(mean_N_quadrature(Space::sphere(3, 1e-4), 10) - e_n(3)) < 1e-6);
    }

    TEST_CASE("full-dimensional section is the cell")
    {
        for (double lam : {2.0, 20.0}) {
            CHECK(std::abs(section_mean_volume_exact(Space::sphere(2), 2, lam) - mean_volume_exact(Space::sphere(2), lam)) < 1e-9);
            CHECK(std::abs(section_mean_volume_exact(Space::hyperbolic(2), 2, lam) - 1 / lam) < 1e-9);
            CHECK(std::abs(section_mean_N_exact(Space::sphere(2), 2, lam) - mean_N_quadrature(Space::sphere(2), lam)) < 1e-7);
        }
    }

    TEST_CASE("section scaling limits")
    {
        // lambda^{s/n} E[vol] -> v_{n,s} and E[N] -> e_{n,s}; compare two-point extrapolations in lambda^{-2/n}
        for (const Space& sp : {Space::sphere(3), Space::hyperbolic(3)}) {
            const int n = 3, s = 2;
            auto vol = [&](double lam) { return std::pow(lam, double(s) / n) * section_mean_volume_exact(sp, s, lam); };
            auto N = [&](double lam) { return section_mean_N_exact(sp, s, lam); };
            const double l1 = 1e4, l2 = 1e5, q = std::pow(l1 / l2, 2.0 / n);
            const double v_ext = (vol(l2) - q * vol(l1)) / (1 - q);
            const double n_ext = (N(l2) - q * N(l1)) / (1 - q);
            CHECK(std::abs(vol(1e3) / v_ns(n, s) - 1) < 1e-2);
            CHECK(std::abs(v_ext / v_ns(n, s) - 1) < 1e-4);
            CHECK(std::abs(n_ext / e_ns(n, s) - 1) < 1e-4);
        }
    }

    TEST_CASE("hyperbolic 1-D section vertex count")
    {
        const Space h2 = Space::hyperbolic(2);
        double prev = INFINITY;
        for (double lam : {20.0, 40.0, 80.0}) {
            const double v = section_mean_N_exact(h2, 1, lam);
            CHECK(std::isfinite(v));
            CHECK(v > 0);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
        CHECK(prev >= e_ns(2, 1) - 1e-12);
    }

    TEST_CASE("asymptotic vertex count")
    {
        CHECK(asymptotic_mean_N(2, 0, 3) == 6);
        for (double k : {0.5, 1.0, 2.0})
            CHECK(asymptotic_mean_N(2, 2 * k * k, 30) == doctest::Approx(6 - 3 * k * k / (M_PI * 30)).epsilon(1e-14));
        CHECK(asymptotic_mean_N(2, -2, 10) == doctest::Approx(6 + 3 / (10 * M_PI)).epsilon(1e-14));
    }

    TEST_CASE("asymptotic density")
    {
        for (double r : {0.3, 1.1})
            CHECK(asymptotic_density_const_curv(Space::euclidean(2), 9, r) ==
                  doctest::Approx(vertex_density_exact(Space::euclidean(2), 9, r)).epsilon(1e-13));
        const Space s2 = Space::sphere(2);
        const double lam = 50;
        QuadratureSpec q;
        q.rel_tol = 1e-12;
        const double total = sigma(1) * integrate([&](double r) { return asymptotic_density_const_curv(s2, lam, r); }, 0, 8, q);
        CHECK(std::abs(total - asymptotic_mean_N(2, 2, lam)) < 1e-8);
        // the exact density departs from the asymptotic one by O(lambda^{-4/n})
        double prev = INFINITY;
        for (double L : {1e2, 1e3, 1e4}) {
            double worst = 0;
            for (double r : {0.5, 1.0, 1.5})
                worst = std::max(worst, std::abs(vertex_density_exact(s2, L, r) - asymptotic_density_const_curv(s2, L, r)));
            CHECK(worst * L < prev);
            prev = worst * L;
        }
    }

    TEST_CASE("simplex moment")
    {
        auto one = [](const Vec&, const std::vector<Vec>&) { return 1.0; };
        const Estimate e = mc_simplex_moment(2, std::nullopt, one, 100000, 21);
        CHECK(e.within(k_n(2) / sigma(1), 3));
        const Estimate c = mc_simplex_moment(2, std::nullopt, [](const Vec&, const std::vector<Vec>&) { return 2.5; }, 100000, 21);
        CHECK(c.mean == doctest::Approx(2.5 * e.mean).epsilon(1e-13));
        // the reflection fixing u flips the component orthogonal to u
        Vec axis = Vec::Unit(2, 1);
        const Estimate odd = mc_simplex_moment(
            2, std::nullopt, [&](const Vec&, const std::vector<Vec>& us) { return us[0].dot(axis); }, 100000, 22);
        CHECK(odd.within(0, 3));
        CHECK_THROWS(mc_simplex_moment(2, std::nullopt, one, 10, 1));
    }
}
