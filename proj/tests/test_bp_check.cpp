#include "vlab/bp_check.hpp"
#include "vlab/sampling.hpp"

#include <doctest.h>

using namespace vlab;

TEST_SUITE("bp_check")
{
    TEST_CASE("retracing the centre direction returns to x0")
    {
        for (const Space& sp : {Space::sphere(3), Space::hyperbolic(2), Space::euclidean(3)}) {
            RngStream rng(201, sp.n);
            BPConfiguration c = random_bp_configuration(sp, 0.4, rng);
            for (auto& ui : c.us) ui = -c.u;
            for (const auto& x : phi_map(c)) CHECK(distance(sp, x, c.x0) < 1e-10);
        }
    }

    TEST_CASE("points lie on the circumscribed sphere")
    {
        for (const Space& sp : {Space::sphere(2), Space::hyperbolic(3), Space::sphere(3, 2.0)}) {
            RngStream rng(202, sp.n);
            for (int t = 0; t < 20; ++t) {
                const BPConfiguration c = random_bp_configuration(sp, 0.5, rng);
                const Vec z = bp_center(c);
                CHECK(std::abs(distance(sp, z, c.x0) - 0.5) < 1e-10);
                for (const auto& x : phi_map(c)) CHECK(std::abs(distance(sp, z, x) - 0.5) < 1e-10);
            }
        }
    }

    TEST_CASE("Euclidean map is affine")
    {
        const Space e2 = Space::euclidean(2);
        RngStream rng(203, 0);
        const BPConfiguration c = random_bp_configuration(e2, 0.7, rng);
        const auto xs = phi_map(c);
        for (int i = 0; i < 2; ++i) CHECK((xs[i] - (c.x0 + 0.7 * c.u + 0.7 * c.us[i])).norm() < 1e-14);
    }

    TEST_CASE("simplex volume")
    {
        Vec u(2), a(2), b(2);
        u << 0, 1;
        a << 1, 0;
        b << 0, 1;
        CHECK(simplex_volume(u, {a, b}) == doctest::Approx(1).epsilon(1e-15));
        CHECK(simplex_volume(u, {a, a}) == 0);
    }

    TEST_CASE("exact Jacobians")
    {
        const double d = 0.3, r = 0.4;
        CHECK(bp_jacobian_exact(Space::euclidean(2), r, d) == doctest::Approx(2 * d * std::pow(r, 3)).epsilon(1e-15));
        CHECK(bp_jacobian_exact(Space::sphere(3, 2.0), r, d) ==
              doctest::Approx(6 * d * std::pow(std::sin(2 * r) / 2, 8)).epsilon(1e-14));
        CHECK(bp_jacobian_exact(Space::hyperbolic(2), r, d) == doctest::Approx(2 * d * std::pow(std::sinh(r), 3)).epsilon(1e-14));
        CHECK_THROWS_AS(bp_jacobian_exact(Space::sphere(2), 4.0, d), DomainError);
    }

    TEST_CASE("finite differences match the exact Jacobian")
    {
        RngStream rng(204, 0);
        const BPConfiguration e = random_bp_configuration(Space::euclidean(2), 0.5, rng);
        const FdJacobian fe = bp_jacobian_fd(e, 1e-4);
        const double exact_e = bp_jacobian_exact(e.space, 0.5, simplex_volume(e.u, e.us));
        CHECK(std::abs(fe.value - exact_e) / exact_e < 1e-6);
        for (const Space& sp : {Space::sphere(2), Space::hyperbolic(2), Space::sphere(3), Space::hyperbolic(3)}) {
            for (int t = 0; t < 5; ++t) {
                const BPConfiguration c = random_bp_configuration(sp, 0.3, rng);
                const double exact = bp_jacobian_exact(sp, 0.3, simplex_volume(c.u, c.us));
                const FdJacobian fd = bp_jacobian_fd_auto(c);
                CHECK_FALSE(fd.ill_conditioned);
                CHECK(std::abs(fd.value - exact) / exact < 1e-5);
            }
        }
        CHECK_THROWS_AS(bp_jacobian_fd(e, 1.0), DomainError);
    }

    TEST_CASE("small-radius expansion")
    {
        const double d = 0.2;
        for (double r : {0.1, 0.01}) CHECK(bp_expansion(2, d, 0, r) == bp_jacobian_exact(Space::euclidean(2), r, d));
        for (const Space& sp : {Space::sphere(2), Space::hyperbolic(2), Space::sphere(3), Space::hyperbolic(3)}) {
            const double q1 = bp_expansion_residual_ratio(sp, 1e-2) / bp_expansion_residual_ratio(sp, 1e-3);
            const double q2 = bp_expansion_residual_ratio(sp, 1e-3) / bp_expansion_residual_ratio(sp, 1e-4);
            CHECK(q1 == doctest::Approx(100).epsilon(0.01));
            CHECK(q2 == doctest::Approx(100).epsilon(0.01));
        }
        // sin < id < sinh
        const double r = 0.05;
        CHECK(bp_jacobian_exact(Space::sphere(2), r, d) < 2 * d * std::pow(r, 3));
        CHECK(bp_jacobian_exact(Space::hyperbolic(2), r, d) > 2 * d * std::pow(r, 3));
    }
}
