#include "vlab/tessellation.hpp"

#include <doctest.h>

#include <algorithm>

using namespace vlab;

namespace {

Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

Vec v3(double a, double b, double c)
{
    Vec v(3);
    v << a, b, c;
    return v;
}

std::vector<Vec> sphere_cloud(int m, RngStream& rng)
{
    std::vector<Vec> pts;
    for (int i = 0; i < m; ++i) pts.push_back(rng.unit_vector(3));
    return pts;
}

bool same_set(const Space& sp, std::vector<VoronoiVertex> a, std::vector<VoronoiVertex> b)
{
    if (a.size() != b.size()) return false;
    auto by = [](const VoronoiVertex& x, const VoronoiVertex& y) {
        return std::tie(x.generators, x.r) < std::tie(y.generators, y.r);
    };
    std::sort(a.begin(), a.end(), by);
    std::sort(b.begin(), b.end(), by);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].generators != b[i].generators || distance(sp, a[i].point, b[i].point) > 1e-9) return false;
    return true;
}

// three nuclei at distance 2 around the origin, 120 degrees apart
std::vector<Vec> triangle_cloud()
{
    std::vector<Vec> c{v2(0, 0)};
    for (int i = 0; i < 3; ++i) c.push_back(v2(2 * std::cos(2 * M_PI * i / 3), 2 * std::sin(2 * M_PI * i / 3)));
    return c;
}

}  // namespace

TEST_SUITE("tessellation")
{
    TEST_CASE("Euclidean circumcenter")
    {
        const auto c = circumcenters(Space::euclidean(2), {v2(0, 0), v2(2, 0), v2(0, 2)});
        REQUIRE(c.size() == 1);
        CHECK((c[0].first - v2(1, 1)).norm() < 1e-14);
        CHECK(c[0].second == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK_THROWS_AS(circumcenters(Space::euclidean(2), {v2(0, 0), v2(1, 1), v2(2, 2)}), DegenerateInput);
    }

    TEST_CASE("sphere circumcenters are antipodal")
    {
        const Space s2 = Space::sphere(2);
        const Vec np = v3(0, 0, 1);
        // symmetric about the xz-plane
        const Vec a = v3(std::sin(0.5) * std::cos(0.4), std::sin(0.5) * std::sin(0.4), std::cos(0.5));
        const Vec b = v3(a(0), -a(1), a(2));
        const auto c = circumcenters(s2, {np, a, b});
        REQUIRE(c.size() == 2);
        for (const auto& [p, r] : c) CHECK(std::abs(p(1)) < 1e-14);

        RngStream rng(41, 0);
        for (int t = 0; t < 100; ++t) {
            const auto pts = sphere_cloud(3, rng);
            const auto cc = circumcenters(s2, pts);
            REQUIRE(cc.size() == 2);
            CHECK((cc[0].first + cc[1].first).norm() < 1e-12);
            CHECK(cc[0].second + cc[1].second == doctest::Approx(M_PI).epsilon(1e-12));
            for (const auto& [p, r] : cc)
                for (const auto& x : pts) CHECK(distance(s2, p, x) == doctest::Approx(r).epsilon(1e-10));
        }
    }

    TEST_CASE("hyperbolic circumcenters")
    {
        const Space h2 = Space::hyperbolic(2);
        const Vec o = base_point(h2);
        const Mat E = tangent_frame(h2, o);
        RngStream rng(42, 0);
        int found = 0;
        for (int t = 0; t < 100; ++t) {
            std::vector<Vec> pts;
            for (int i = 0; i < 3; ++i) pts.push_back(sample_in_ball(h2, o, E, 1.0, rng));
            const auto cc = circumcenters(h2, pts);
            CHECK(cc.size() <= 1);
            for (const auto& [p, r] : cc) {
                ++found;
                CHECK(p(2) > 0);
                for (const auto& x : pts) CHECK(distance(h2, p, x) == doctest::Approx(r).epsilon(1e-9));
            }
        }
        CHECK(found > 50);
    }

    TEST_CASE("cell membership")
    {
        const Space e2 = Space::euclidean(2);
        const auto cloud = triangle_cloud();
        CHECK(cell_contains(e2, cloud[0], cloud, cloud[0]));
        CHECK_FALSE(cell_contains(e2, cloud[0], cloud, cloud[1]));
        CHECK(cell_contains(e2, cloud[0], cloud, (0.5 * cloud[1]).eval()));

        const Space s2 = Space::sphere(2);
        RngStream rng(43, 0);
        const auto pts = sphere_cloud(20, rng);
        int nearest = 1;
        for (int i = 2; i < 20; ++i)
            if (distance(s2, pts[0], pts[i]) < distance(s2, pts[0], pts[nearest])) nearest = i;
        const Vec mid = exp_map(s2, pts[0], (0.5 * log_map(s2, pts[0], pts[nearest])).eval());
        CHECK(cell_contains(s2, pts[0], pts, mid));
    }

    TEST_CASE("too few nuclei give no vertices")
    {
        const CellSummary c = enumerate_cell_vertices(Space::euclidean(3), Vec::Zero(3), {Vec::Zero(3), Vec::Ones(3)});
        CHECK(c.vertices.empty());
    }

    TEST_CASE("symmetric triangle cell")
    {
        const Space e2 = Space::euclidean(2);
        const auto cloud = triangle_cloud();
        const CellSummary c = enumerate_cell_vertices(e2, cloud[0], cloud);
        REQUIRE(c.vertices.size() == 3);
        CHECK(c.closed);
        const std::vector<Vec> expect{v2(1, std::sqrt(3.0)), v2(1, -std::sqrt(3.0)), v2(-2, 0)};
        for (const auto& e : expect) {
            const bool hit = std::any_of(c.vertices.begin(), c.vertices.end(),
                                         [&](const VoronoiVertex& v) { return (v.point - e).norm() < 1e-12; });
            CHECK(hit);
        }
        for (const auto& v : c.vertices) CHECK(v.r == doctest::Approx(2).epsilon(1e-14));

        RngStream rng(44, 0);
        const Estimate a = cell_volume_mc(e2, cloud[0], cloud, c, 1000000, rng);
        CHECK(a.within(3 * std::sqrt(3.0), 4));

        const std::vector<Vec> ring = order_around(e2, cloud[0], c.vertices, Mat::Identity(2, 2));
        CHECK(polygon_area_2d(e2, cloud[0], ring) == doctest::Approx(3 * std::sqrt(3.0)).epsilon(1e-13));
    }

    TEST_CASE("Monte Carlo volume error scales as one over root budget")
    {
        const Space e2 = Space::euclidean(2);
        const auto cloud = triangle_cloud();
        const CellSummary c = enumerate_cell_vertices(e2, cloud[0], cloud);
        RngStream r1(45, 0), r2(45, 1);
        const Estimate a = cell_volume_mc(e2, cloud[0], cloud, c, 20000, r1);
        const Estimate b = cell_volume_mc(e2, cloud[0], cloud, c, 80000, r2);
        CHECK(a.std_error / b.std_error == doctest::Approx(2).epsilon(0.2));
        CHECK_THROWS_AS(cell_volume_mc(e2, cloud[0], cloud, CellSummary{}, 100, r1), UncertifiedCell);
    }

    TEST_CASE("polygon areas")
    {
        const Space s2 = Space::sphere(2);
        const Vec np = v3(0, 0, 1);
        // octant triangle with three right angles, as seen from a point inside it
        const Vec inside = v3(1, 1, 1).normalized();
        const std::vector<Vec> octant{v3(1, 0, 0), v3(0, 1, 0), np};
        CHECK(polygon_area_2d(s2, inside, octant) == doctest::Approx(M_PI / 2).epsilon(1e-12));
        const Space e2 = Space::euclidean(2);
        CHECK(polygon_area_2d(e2, v2(0.2, 0.2), {v2(0, 0), v2(1, 0), v2(0, 1)}) == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("exact polygon area agrees with Monte Carlo")
    {
        for (const Space& sp : {Space::hyperbolic(2), Space::sphere(2)}) {
            const Vec o = base_point(sp);
            const Mat E = tangent_frame(sp, o);
            RngStream rng(46, static_cast<int>(sp.model));
            for (int t = 0; t < 5; ++t) {
                std::vector<Vec> cloud{o};
                for (int i = 0; i < 60; ++i) cloud.push_back(sample_in_ball(sp, o, E, 1.2, rng));
                const CellSummary c = enumerate_cell_vertices(sp, o, cloud);
                REQUIRE(c.closed);
                double rmax = 0;
                for (const auto& v : c.vertices) rmax = std::max(rmax, v.r);
                if (2 * rmax > 1.2) continue;  // cell not determined by this sample
                const double exact = polygon_area_2d(sp, o, order_around(sp, o, c.vertices, E));
                const Estimate mc = cell_volume_mc(sp, o, cloud, c, 200000, rng);
                CHECK(mc.within(exact, 4));
            }
        }
    }

    TEST_CASE("pruned enumeration matches the brute-force oracle")
    {
        const Space s2 = Space::sphere(2);
        RngStream rng(47, 0);
        for (int t = 0; t < 500; ++t) {
            const auto cloud = sphere_cloud(5 + static_cast<int>(rng.uniform() * 36), rng);
            CHECK(same_set(s2, enumerate_cell_vertices(s2, cloud[0], cloud, 25).vertices,
                           enumerate_cell_vertices_brute(s2, cloud[0], cloud).vertices));
        }
    }

    TEST_CASE("enumeration is rotation equivariant")
    {
        const Space s2 = Space::sphere(2);
        RngStream rng(48, 0);
        for (int t = 0; t < 20; ++t) {
            const auto cloud = sphere_cloud(30, rng);
            Mat M(3, 3);
            for (int i = 0; i < 9; ++i) M(i / 3, i % 3) = rng.normal();
            const Mat Q = Eigen::HouseholderQR<Mat>(M).householderQ();
            std::vector<Vec> turned;
            for (const auto& p : cloud) turned.push_back(Q * p);
            auto a = enumerate_cell_vertices(s2, cloud[0], cloud).vertices;
            const auto b = enumerate_cell_vertices(s2, turned[0], turned).vertices;
            for (auto& v : a) v.point = Q * v.point;
            CHECK(same_set(s2, a, b));
        }
    }

    TEST_CASE("antipodal centres share generators")
    {
        const Space s2 = Space::sphere(2);
        RngStream rng(49, 0);
        const auto cloud = sphere_cloud(25, rng);
        for (const auto& v : enumerate_cell_vertices(s2, cloud[0], cloud).vertices) {
            const Vec far = -v.point;
            CHECK(distance(s2, far, cloud[0]) == doctest::Approx(M_PI - v.r).epsilon(1e-12));
            for (int g : v.generators) CHECK(distance(s2, far, cloud[g]) == doctest::Approx(M_PI - v.r).epsilon(1e-10));
        }
    }

    TEST_CASE("Euler characteristic per realization")
    {
        RngStream rng(50, 0);
        for (int t = 0; t < 20; ++t) {
            const auto cloud = sphere_cloud(12 + t, rng);
            const TessellationCounts c = full_tessellation_counts(Space::sphere(2), cloud);
            CHECK(c.euler == 2);
            CHECK(2 * c.E == 3 * c.V);
        }
        const Space torus = Space::torus(1);
        for (int t = 0; t < 20; ++t) {
            std::vector<Vec> cloud;
            for (int i = 0; i < 80; ++i) cloud.push_back(v2(rng.uniform(), rng.uniform()));
            const TessellationCounts c = full_tessellation_counts(torus, cloud);
            CHECK(c.euler == 0);
            CHECK((3 * c.V) % 2 == 0);
        }
        CHECK_THROWS_AS(full_tessellation_counts(Space::hyperbolic(2), sphere_cloud(5, rng)), DomainError);
    }

    TEST_CASE("torus cells match the unrolled plane")
    {
        const Space torus = Space::torus(1);
        RngStream rng(51, 0);
        std::vector<Vec> cloud;
        for (int i = 0; i < 40; ++i) cloud.push_back(v2(rng.uniform(), rng.uniform()));
        const CellSummary c = enumerate_cell_vertices(torus, cloud[0], cloud);
        CHECK(c.closed);
        for (const auto& v : c.vertices) {
            CHECK(distance(torus, v.point, cloud[0]) == doctest::Approx(v.r).epsilon(1e-12));
            for (int g : v.generators) CHECK(distance(torus, v.point, cloud[g]) == doctest::Approx(v.r).epsilon(1e-10));
        }
    }

    TEST_CASE("full-frame section is the cell")
    {
        const Space s3 = Space::sphere(3);
        RngStream rng(52, 0);
        std::vector<Vec> cloud;
        for (int i = 0; i < 40; ++i) cloud.push_back(rng.unit_vector(4));
        const Mat E = tangent_frame(s3, cloud[0]);
        CHECK(same_set(s3, section_cell_vertices(s3, cloud[0], cloud, E).vertices,
                       enumerate_cell_vertices(s3, cloud[0], cloud).vertices));
    }

    TEST_CASE("section vertices satisfy their constraints")
    {
        const Space s3 = Space::sphere(3);
        RngStream rng(53, 0);
        std::vector<Vec> cloud;
        for (int i = 0; i < 60; ++i) cloud.push_back(rng.unit_vector(4));
        const Vec x0 = cloud[0];
        const Mat basis = tangent_frame(s3, x0).leftCols(2);
        const CellSummary c = section_cell_vertices(s3, x0, cloud, basis);
        REQUIRE(!c.vertices.empty());
        // normal of the great 2-sphere through x0 spanned by the basis
        Mat span(4, 3);
        span << x0, basis;
        const Vec normal = Eigen::FullPivLU<Mat>(span.transpose()).kernel().col(0).normalized();
        for (const auto& v : c.vertices) {
            CHECK(std::abs(v.point.dot(normal)) < 1e-10);
            REQUIRE(v.generators.size() == 2);
            for (int g : v.generators) CHECK(std::abs(distance(s3, v.point, cloud[g]) - distance(s3, v.point, x0)) < 1e-9);
        }
    }

    TEST_CASE("reflection-symmetric nuclei give reflection-fixed section vertices")
    {
        const Space e3 = Space::euclidean(3);
        RngStream rng(54, 0);
        std::vector<Vec> cloud{Vec::Zero(3)};
        for (int i = 0; i < 15; ++i) {
            Vec p = 2 * rng.unit_vector(3) * rng.uniform() + 0.2 * rng.unit_vector(3);
            cloud.push_back(p);
            p(2) = -p(2);
            cloud.push_back(p);
        }
        const Mat basis = Mat::Identity(3, 3).leftCols(2);
        for (const auto& v : section_cell_vertices(e3, cloud[0], cloud, basis).vertices) CHECK(std::abs(v.point(2)) < 1e-12);
    }

    TEST_CASE("one-dimensional section is a chord")
    {
        const Space e2 = Space::euclidean(2);
        RngStream rng(55, 0);
        std::vector<Vec> cloud{Vec::Zero(2)};
        for (int i = 0; i < 30; ++i) cloud.push_back(rng.unit_vector(2) * (0.3 + 2 * rng.uniform()));
        const Mat basis = Mat::Identity(2, 2).leftCols(1);
        // bisector of 0 and y crosses the line t e at t = |y|^2 / (2 y.e)
        double plus = INFINITY, minus = INFINITY;
        for (std::size_t i = 1; i < cloud.size(); ++i) {
            const double d = cloud[i](0), q = cloud[i].squaredNorm();
            if (d > 0) plus = std::min(plus, q / (2 * d));
            if (d < 0) minus = std::min(minus, q / (-2 * d));
        }
        const Estimate e = section_cell_volume_mc(e2, cloud[0], cloud, basis, 200000, rng);
        CHECK(e.within(plus + minus, 4));
    }

    TEST_CASE("planar chart cell")
    {
        // unit square as the intersection of four half-planes
        std::vector<Eigen::Vector2d> dirs{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const PlanarCell c = halfplane_cell(dirs, {1, 1, 1, 1});
        CHECK(c.bounded);
        CHECK(c.vertices.size() == 4);
        CHECK(c.max_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        const PlanarCell open = halfplane_cell({{1, 0}, {0, 1}}, {1, 1});
        CHECK_FALSE(open.bounded);
        const Space s2 = Space::sphere(2), h2 = Space::hyperbolic(2);
        CHECK(chart_offset(s2, 0.3) == doctest::Approx(std::tan(0.3)).epsilon(1e-15));
        CHECK(chart_offset(h2, 0.3) == doctest::Approx(std::tanh(0.3)).epsilon(1e-15));
        CHECK(chart_distance(h2, chart_offset(h2, 0.7)) == doctest::Approx(0.7).epsilon(1e-13));
    }
}
