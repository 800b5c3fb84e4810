#include "vlab/tessellation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace vlab {

namespace {

// c_j = (-1)^j det(A without column j): spans the kernel of a full-rank m x (m+1) matrix
Vec null_vector(const Mat& A)
{
    const int m = static_cast<int>(A.rows());
    Vec c(m + 1);
    Mat minor(m, m);
    for (int j = 0; j <= m; ++j) {
        for (int col = 0, t = 0; col <= m; ++col)
            if (col != j) minor.col(t++) = A.col(col);
        c(j) = ((j % 2) ? -1.0 : 1.0) * minor.determinant();
    }
    return c;
}

double row_scale(const Mat& A)
{
    double s = 1;
    for (int i = 0; i < A.rows(); ++i) s *= A.row(i).norm();
    return s;
}

// centers of the curved model from a kernel direction c
void push_curved_centers(const Space& sp, const Vec& x0, Vec c, std::vector<std::pair<Vec, double>>& out)
{
    if (sp.model == Model::Spherical) {
        c /= sp.k * c.norm();
        out.emplace_back(c, distance(sp, c, x0));
        out.emplace_back(-c, distance(sp, (-c).eval(), x0));
        return;
    }
    const double q = form(sp, c, c);
    if (!(q < -1e-14 * c.squaredNorm())) return;
    c /= sp.k * std::sqrt(-q);
    if (c(c.size() - 1) < 0) c = -c;
    out.emplace_back(c, distance(sp, c, x0));
}

// nucleus x strictly closer to center c than the radius r (attained at x0)
bool strictly_inside(const Space& sp, const Vec& c, double r, const Vec& x0, const Vec& x)
{
    double g = 0, scale = 0;
    switch (sp.model) {
    case Model::Spherical:
        g = c.dot(x) - c.dot(x0);
        scale = 1 / (sp.k * sp.k);
        break;
    case Model::Hyperbolic:
        g = form(sp, c, x) - form(sp, c, x0);
        scale = std::abs(form(sp, c, x0));
        break;
    case Model::FlatTorus2:
        g = torus_delta(sp, c, x0).squaredNorm() - torus_delta(sp, c, x).squaredNorm();
        scale = r * r;
        break;
    default:
        g = (c - x0).squaredNorm() - (c - x).squaredNorm();
        scale = r * r;
        break;
    }
    if (std::abs(g) > 1e-7 * scale) return g > 0;
    return distance(sp, c, x) < r - 1e-9 * (1 + r);
}

struct Candidates {
    std::vector<int> order;   // cloud indices by distance from x0, x0 itself removed
    std::vector<double> dist;  // matching distances
};

Candidates sort_by_distance(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud)
{
    std::vector<double> d(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) d[i] = distance(sp, x0, cloud[i]);
    std::vector<int> idx(cloud.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
    Candidates c;
    for (int i : idx) {
        if (d[i] <= 1e-12) continue;
        c.order.push_back(i);
        c.dist.push_back(d[i]);
    }
    return c;
}

bool ball_inside_window(const Window& w, const Vec& c, double r)
{
    if (w.kind != WindowKind::GeodesicBall) return true;
    return distance(w.space, w.center, c) + r <= w.radius;
}

bool is_closed(const std::vector<VoronoiVertex>& verts, int q)
{
    std::map<std::vector<int>, int> edges;
    for (const auto& v : verts) {
        for (int drop = 0; drop < q; ++drop) {
            std::vector<int> e;
            for (int j = 0; j < q; ++j)
                if (j != drop) e.push_back(v.generators[j]);
            ++edges[e];
        }
    }
    if (verts.empty()) return false;
    for (const auto& [e, cnt] : edges)
        if (cnt != 2) return false;
    return true;
}

// enumerate q-subsets of the k nearest candidates, escalating k until the result is stable
template <typename CentersFn>
CellSummary enumerate_impl(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, int q, int k_candidates,
                           bool escalate, const Window* window, CentersFn&& centers_of)
{
    CellSummary out;
    const Candidates cand = sort_by_distance(sp, x0, cloud);
    const int m = static_cast<int>(cand.order.size());
    if (m < q) return out;
    int k = std::min(m, std::max(q, k_candidates));
    std::vector<Vec> pts(q);
    std::vector<int> gen(q);
    for (;;) {
        out.vertices.clear();
        std::vector<int> pick(q);
        std::iota(pick.begin(), pick.end(), 0);
        for (;;) {
            for (int j = 0; j < q; ++j) {
                gen[j] = cand.order[pick[j]];
                pts[j] = cloud[gen[j]];
            }
            std::vector<std::pair<Vec, double>> centers;
            try {
                centers = centers_of(pts);
            } catch (const DegenerateInput&) {
                centers.clear();
            }
            for (const auto& [c, r] : centers) {
                bool empty = true;
                const double reach = 2 * r + 1e-9 * (1 + r);
                for (int t = 0; t < m && cand.dist[t] <= reach; ++t) {
                    const int j = cand.order[t];
                    if (std::find(gen.begin(), gen.end(), j) != gen.end()) continue;
                    if (strictly_inside(sp, c, r, x0, cloud[j])) {
                        empty = false;
                        break;
                    }
                }
                if (!empty) continue;
                VoronoiVertex v;
                v.point = c;
                v.r = r;
                v.r_norm = r;
                v.generators = gen;
                std::sort(v.generators.begin(), v.generators.end());
                out.vertices.push_back(std::move(v));
            }
            // next combination
            int i = q - 1;
            while (i >= 0 && pick[i] == k - q + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int j = i + 1; j < q; ++j) pick[j] = pick[j - 1] + 1;
        }
        out.closed = is_closed(out.vertices, q);
        double rmax = 0;
        for (const auto& v : out.vertices) rmax = std::max(rmax, v.r);
        if (!escalate || k >= m) break;
        if (out.closed && rmax <= cand.dist[k - 1] / 2) break;
        k = std::min(m, 2 * k);
    }
    out.candidates_used = k;
    out.vertex_count = static_cast<int>(out.vertices.size());
    out.certified = out.closed;
    if (window)
        for (const auto& v : out.vertices)
            if (!ball_inside_window(*window, v.point, v.r)) out.certified = false;
    return out;
}

int default_candidates(int n)
{
    return std::max(4 * n, 30);
}

}  // namespace

std::vector<std::pair<Vec, double>> circumcenters(const Space& sp, const std::vector<Vec>& points)
{
    const int n = sp.n;
    if (static_cast<int>(points.size()) != n + 1) throw DomainError("circumcenters: need n + 1 points");
    const Vec& x0 = points[0];
    std::vector<std::pair<Vec, double>> out;
    if (!sp.curved()) {
        Mat A(n, n);
        Vec b(n);
        for (int i = 0; i < n; ++i) {
            const Vec d = sp.model == Model::FlatTorus2 ? torus_delta(sp, x0, points[i + 1]) : Vec(points[i + 1] - x0);
            A.row(i) = 2 * d.transpose();
            b(i) = d.squaredNorm();
        }
        const double det = A.determinant();
        if (std::abs(det) <= 1e-12 * row_scale(A)) throw DegenerateInput("circumcenters: degenerate points");
        Vec c = x0 + A.partialPivLu().solve(b);
        if (sp.model == Model::FlatTorus2) c = torus_reduce(sp, c);
        out.emplace_back(c, distance(sp, c, x0));
        return out;
    }
    Mat A(n, n + 1);
    for (int i = 0; i < n; ++i) {
        Vec a = points[i + 1] - x0;
        if (sp.model == Model::Hyperbolic) a(n) = -a(n);
        A.row(i) = a.transpose();
    }
    const Vec c = null_vector(A);
    if (c.norm() <= 1e-12 * row_scale(A)) throw DegenerateInput("circumcenters: degenerate points");
    push_curved_centers(sp, x0, c, out);
    return out;
}

bool cell_contains(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const Vec& x)
{
    const double d0 = distance(sp, x, x0);
    for (const auto& y : cloud)
        if (distance(sp, x, y) < d0) return false;
    return true;
}

namespace {

// nine lattice copies of the cloud around x0; origin[i] is the source index
struct Unrolled {
    std::vector<Vec> points;
    std::vector<int> origin;
};

Unrolled unroll_around(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud)
{
    Unrolled u;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (std::size_t j = 0; j < cloud.size(); ++j) {
                Vec p = x0 + torus_delta(sp, x0, cloud[j]);
                p(0) += a * sp.period;
                p(1) += b * sp.period;
                u.points.push_back(p);
                u.origin.push_back(static_cast<int>(j));
            }
    return u;
}

// the torus cell of x0 is the planar cell among the lattice images; exact while 2 r_max < period
CellSummary torus_cell(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, int k_candidates, bool brute)
{
    const Space plane = Space::euclidean(2);
    const Vec c = torus_reduce(sp, x0);
    const Unrolled u = unroll_around(sp, c, cloud);
    CellSummary cell = brute ? enumerate_cell_vertices_brute(plane, c, u.points)
                             : enumerate_cell_vertices(plane, c, u.points, k_candidates);
    for (auto& v : cell.vertices) {
        for (int& g : v.generators) g = u.origin[g];
        std::sort(v.generators.begin(), v.generators.end());
        v.point = torus_reduce(sp, v.point);
        if (v.r >= sp.period / 2) cell.certified = false;
    }
    return cell;
}

}  // namespace

CellSummary enumerate_cell_vertices(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, int k_candidates,
                                    const Window* window)
{
    if (k_candidates <= 0) k_candidates = default_candidates(sp.n);
    if (sp.model == Model::FlatTorus2) return torus_cell(sp, x0, cloud, k_candidates, false);
    std::vector<Vec> pts(sp.n + 1);
    pts[0] = x0;
    return enumerate_impl(sp, x0, cloud, sp.n, k_candidates, true, window, [&](const std::vector<Vec>& sub) {
        std::copy(sub.begin(), sub.end(), pts.begin() + 1);
        return circumcenters(sp, pts);
    });
}

CellSummary enumerate_cell_vertices_brute(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud)
{
    if (sp.model == Model::FlatTorus2) return torus_cell(sp, x0, cloud, 0, true);
    std::vector<Vec> pts(sp.n + 1);
    pts[0] = x0;
    return enumerate_impl(sp, x0, cloud, sp.n, static_cast<int>(cloud.size()), false, nullptr,
                          [&](const std::vector<Vec>& sub) {
                              std::copy(sub.begin(), sub.end(), pts.begin() + 1);
                              return circumcenters(sp, pts);
                          });
}

void normalize_vertex(const Space& sp, const Vec& x0, double lambda, VoronoiVertex& v)
{
    v.r_norm = std::pow(lambda, 1.0 / sp.n) * v.r;
    try {
        const Vec w = log_map(sp, x0, v.point);
        const double t = tangent_norm(sp, w);
        v.u = t > 0 ? Vec(w / t) : Vec();
    } catch (const AntipodalError&) {
        v.u = Vec();
    }
}

namespace {

std::vector<Vec> nuclei_within(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, double reach)
{
    std::vector<Vec> near;
    for (const auto& y : cloud)
        if (distance(sp, x0, y) <= reach) near.push_back(y);
    return near;
}

Estimate hit_or_miss(double vol, long long hits, long long total)
{
    Estimate e;
    const double p = double(hits) / total;
    e.mean = vol * p;
    e.std_error = vol * std::sqrt(p * (1 - p) / total);
    e.replicates = total;
    return e;
}

}  // namespace

Estimate cell_volume_mc(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const CellSummary& cell,
                        long long point_budget, RngStream& rng)
{
    if (cell.vertices.empty()) throw UncertifiedCell("cell_volume_mc: no vertices");
    if (!cell.certified) throw UncertifiedCell("cell_volume_mc: cell not certified");
    if (point_budget < 2) throw DomainError("cell_volume_mc: point budget must be >= 2");
    double rmax = 0;
    for (const auto& v : cell.vertices) rmax = std::max(rmax, v.r);
    double rho = 2 * rmax;
    const bool whole = sp.model == Model::Spherical && rho >= M_PI / sp.k;
    if (whole) rho = M_PI / sp.k;
    const std::vector<Vec> near = nuclei_within(sp, x0, cloud, 2 * rho + 1e-12);
    const Mat E = tangent_frame(sp, x0);
    long long hits = 0;
    for (long long i = 0; i < point_budget; ++i) {
        const Vec y = whole ? Vec(rng.unit_vector(sp.n + 1) / sp.k) : sample_in_ball(sp, x0, E, rho, rng);
        hits += cell_contains(sp, x0, near, y);
    }
    Estimate e = hit_or_miss(whole ? sp.total_volume() : ball_volume(sp, rho), hits, point_budget);
    e.master_seed = rng.master_seed();
    return e;
}

namespace {

double corner_angle(const Space& sp, const Vec& a, const Vec& b, const Vec& c)
{
    Vec u = log_map(sp, a, b), v = log_map(sp, a, c);
    u /= tangent_norm(sp, u);
    v /= tangent_norm(sp, v);
    return 2 * std::atan2(tangent_norm(sp, (u - v).eval()), tangent_norm(sp, (u + v).eval()));
}

// Kahan's stable Heron
double heron(double a, double b, double c)
{
    if (a < b) std::swap(a, b);
    if (a < c) std::swap(a, c);
    if (b < c) std::swap(b, c);
    const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    return 0.25 * std::sqrt(std::max(0.0, p));
}

Mat default_plane(const Space& sp, const Vec& x0, const Mat& plane)
{
    if (plane.size()) return plane;
    if (sp.n != 2) throw DomainError("polygon_area_2d: plane required when n != 2");
    return tangent_frame(sp, x0);
}

double plane_angle(const Space& sp, const Vec& x0, const Mat& plane, const Vec& p)
{
    const Vec w = log_map(sp, x0, p);
    return std::atan2(form(sp, plane.col(1), w), form(sp, plane.col(0), w));
}

}  // namespace

double polygon_area_2d(const Space& sp, const Vec& x0, const std::vector<Vec>& vertices, const Mat& plane_in)
{
    const int m = static_cast<int>(vertices.size());
    if (m < 3) throw GeometryError("polygon_area_2d: fewer than 3 vertices");
    const Mat plane = default_plane(sp, x0, plane_in);
    double winding = 0;
    for (int i = 0; i < m; ++i) {
        double d = plane_angle(sp, x0, plane, vertices[(i + 1) % m]) - plane_angle(sp, x0, plane, vertices[i]);
        while (d <= -M_PI) d += 2 * M_PI;
        while (d > M_PI) d -= 2 * M_PI;
        if (d <= 0) throw GeometryError("polygon_area_2d: non-simple polygon");
        winding += d;
    }
    if (std::abs(winding - 2 * M_PI) > 1e-6) throw GeometryError("polygon_area_2d: non-simple polygon");
    const double K = sp.sectional();
    double area = 0;
    for (int i = 0; i < m; ++i) {
        const Vec& b = vertices[i];
        const Vec& c = vertices[(i + 1) % m];
        if (K == 0) {
            area += heron(distance(sp, x0, b), distance(sp, b, c), distance(sp, c, x0));
        } else {
            const double excess =
                corner_angle(sp, x0, b, c) + corner_angle(sp, b, c, x0) + corner_angle(sp, c, x0, b) - M_PI;
            area += excess / K;
        }
    }
    return area;
}

std::vector<Vec> order_around(const Space& sp, const Vec& x0, const std::vector<VoronoiVertex>& vertices,
                              const Mat& plane_in)
{
    const Mat plane = default_plane(sp, x0, plane_in);
    std::vector<std::pair<double, int>> key;
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i)
        key.emplace_back(plane_angle(sp, x0, plane, vertices[i].point), i);
    std::sort(key.begin(), key.end());
    std::vector<Vec> out;
    for (const auto& [a, i] : key) out.push_back(vertices[i].point);
    return out;
}

namespace {

struct VertexBook {
    std::map<std::array<int, 3>, std::vector<std::pair<Vec, int>>> seen;

    void add(const Space& sp, std::array<int, 3> key, const Vec& c, double tol)
    {
        std::sort(key.begin(), key.end());
        auto& list = seen[key];
        for (auto& [p, cnt] : list)
            if (distance(sp, p, c) < tol) {
                ++cnt;
                return;
            }
        list.emplace_back(c, 1);
    }

    long long count_normal() const
    {
        long long v = 0;
        for (const auto& [key, list] : seen)
            for (const auto& [p, cnt] : list) {
                if (cnt != 3) throw DegeneratePosition("vertex not shared by exactly three cells");
                ++v;
            }
        return v;
    }
};

}  // namespace

TessellationCounts full_tessellation_counts(const Space& sp, const std::vector<Vec>& cloud)
{
    const int m = static_cast<int>(cloud.size());
    if (m < 4) throw DomainError("full_tessellation_counts: need at least 4 nuclei");
    VertexBook book;
    if (sp.model == Model::Spherical && sp.n == 2) {
        for (int i = 0; i < m; ++i) {
            const CellSummary cell = enumerate_cell_vertices(sp, cloud[i], cloud);
            if (!cell.closed) throw DegeneratePosition("open cell on the sphere");
            for (const auto& v : cell.vertices)
                book.add(sp, {i, v.generators[0], v.generators[1]}, v.point, 1e-7 / sp.k);
        }
    } else if (sp.model == Model::FlatTorus2) {
        const Space plane = Space::euclidean(2);
        std::vector<Vec> unrolled;
        std::vector<int> origin;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int j = 0; j < m; ++j) {
                    Vec p = torus_reduce(sp, cloud[j]);
                    p(0) += a * sp.period;
                    p(1) += b * sp.period;
                    unrolled.push_back(p);
                    origin.push_back(j);
                }
        for (int i = 0; i < m; ++i) {
            const CellSummary cell = enumerate_cell_vertices(plane, torus_reduce(sp, cloud[i]), unrolled);
            if (!cell.closed) throw DegeneratePosition("open cell on the torus");
            for (const auto& v : cell.vertices) {
                if (v.r >= sp.period / 2) throw DegeneratePosition("cell wraps around the torus");
                book.add(sp, {i, origin[v.generators[0]], origin[v.generators[1]]}, torus_reduce(sp, v.point),
                         1e-7 * sp.period);
            }
        }
    } else {
        throw DomainError("full_tessellation_counts: needs the 2-sphere or the flat torus");
    }
    TessellationCounts t;
    t.F = m;
    t.V = book.count_normal();
    if ((3 * t.V) % 2 != 0) throw DegeneratePosition("3V is odd");
    t.E = 3 * t.V / 2;
    t.euler = t.F - t.E + t.V;
    return t;
}

namespace {

std::vector<std::pair<Vec, double>> section_centers(const Space& sp, const Vec& x0, const Mat& basis,
                                                    const std::vector<Vec>& sub)
{
    const int s = static_cast<int>(basis.cols());
    std::vector<std::pair<Vec, double>> out;
    if (!sp.curved()) {
        Mat A(s, s);
        Vec b(s);
        for (int i = 0; i < s; ++i) {
            const Vec d = sp.model == Model::FlatTorus2 ? torus_delta(sp, x0, sub[i]) : Vec(sub[i] - x0);
            A.row(i) = 2 * (d.transpose() * basis);
            b(i) = d.squaredNorm();
        }
        if (std::abs(A.determinant()) <= 1e-12 * row_scale(A)) throw DegenerateInput("section: degenerate points");
        Vec c = x0 + basis * A.partialPivLu().solve(b);
        if (sp.model == Model::FlatTorus2) c = torus_reduce(sp, c);
        out.emplace_back(c, distance(sp, c, x0));
        return out;
    }
    Mat B(x0.size(), s + 1);
    B.col(0) = sp.k * x0;
    B.rightCols(s) = basis;
    Mat A(s, s + 1);
    for (int i = 0; i < s; ++i) {
        Vec a = sub[i] - x0;
        if (sp.model == Model::Hyperbolic) a(sp.n) = -a(sp.n);
        A.row(i) = a.transpose() * B;
    }
    const Vec y = null_vector(A);
    if (y.norm() <= 1e-12 * row_scale(A)) throw DegenerateInput("section: degenerate points");
    push_curved_centers(sp, x0, B * y, out);
    return out;
}

void check_basis(const Space& sp, const Vec& x0, const Mat& basis)
{
    const int s = static_cast<int>(basis.cols());
    if (s < 1 || s > sp.n || basis.rows() != sp.ambient_dim()) throw DomainError("section: bad subspace basis");
    for (int i = 0; i < s; ++i) {
        if (sp.curved() && std::abs(form(sp, x0, basis.col(i))) > 1e-9 / sp.k) throw DomainError("section: basis not tangent");
        for (int j = 0; j < s; ++j)
            if (std::abs(form(sp, basis.col(i), basis.col(j)) - (i == j)) > 1e-9)
                throw DomainError("section: basis not orthonormal");
    }
}

}  // namespace

CellSummary section_cell_vertices(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const Mat& basis,
                                  int k_candidates)
{
    check_basis(sp, x0, basis);
    if (k_candidates <= 0) k_candidates = default_candidates(sp.n);
    return enumerate_impl(sp, x0, cloud, static_cast<int>(basis.cols()), k_candidates, true, nullptr,
                          [&](const std::vector<Vec>& sub) { return section_centers(sp, x0, basis, sub); });
}

Estimate section_cell_volume_mc(const Space& sp, const Vec& x0, const std::vector<Vec>& cloud, const Mat& basis,
                                long long point_budget, RngStream& rng)
{
    check_basis(sp, x0, basis);
    if (point_budget < 2) throw DomainError("section_cell_volume_mc: point budget must be >= 2");
    const int s = static_cast<int>(basis.cols());
    const CellSummary cell = section_cell_vertices(sp, x0, cloud, basis);
    double rho = 0;
    if (!cell.vertices.empty()) {
        if (!cell.closed) throw UncertifiedCell("section cell not closed");
        for (const auto& v : cell.vertices) rho = std::max(rho, 2 * v.r);
    } else {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& y : cloud) {
            const double d = distance(sp, x0, y);
            if (d > 1e-12) dmin = std::min(dmin, d);
        }
        if (!std::isfinite(dmin)) throw UncertifiedCell("section cell: empty cloud");
        rho = 2 * dmin;
    }
    Space sub{sp.model == Model::FlatTorus2 ? Model::Euclidean : sp.model, s, sp.k, 0.0};
    if (sp.model == Model::Spherical) rho = std::min(rho, M_PI / sp.k);
    const double vol = s == 1 ? 2 * rho : ball_volume(sub, rho);
    const std::vector<Vec> near = nuclei_within(sp, x0, cloud, 2 * rho + 1e-12);
    long long hits = 0;
    for (long long i = 0; i < point_budget; ++i) {
        Vec dir;
        double t;
        if (s == 1) {
            t = (2 * rng.uniform() - 1) * rho;
            dir = basis.col(0);
        } else {
            t = ball_radius_for_volume(sub, rng.uniform() * vol);
            dir = basis * rng.unit_vector(s);
        }
        const Vec y = exp_map(sp, x0, (dir * t).eval());
        hits += cell_contains(sp, x0, near, y);
    }
    Estimate e = hit_or_miss(vol, hits, point_budget);
    e.master_seed = rng.master_seed();
    return e;
}

double chart_offset(const Space& sp, double d)
{
    switch (sp.model) {
    case Model::Spherical:
        if (d >= M_PI / (2 * sp.k)) return std::numeric_limits<double>::infinity();
        return std::tan(sp.k * d);
    case Model::Hyperbolic:
        return std::tanh(sp.k * d);
    default:
        return d;
    }
}

double chart_distance(const Space& sp, double rho)
{
    switch (sp.model) {
    case Model::Spherical:
        return std::atan(rho) / sp.k;
    case Model::Hyperbolic:
        return rho < 1 ? std::atanh(rho) / sp.k : std::numeric_limits<double>::infinity();
    default:
        return rho;
    }
}

Vec chart_to_point(const Space& sp, const Vec& x0, const Mat& frame, const Eigen::Vector2d& p)
{
    if (sp.n != 2) throw DomainError("chart_to_point: n must be 2");
    switch (sp.model) {
    case Model::Spherical: {
        const Vec y = sp.k * x0 + frame * p;
        return y / (sp.k * y.norm());
    }
    case Model::Hyperbolic: {
        const double q = 1 - p.squaredNorm();
        if (!(q > 0)) throw DomainError("chart_to_point: outside the Klein disk");
        return project(sp, ((sp.k * x0 + frame * p) / (sp.k * std::sqrt(q))).eval());
    }
    case Model::FlatTorus2:
        return torus_reduce(sp, (x0 + frame * p).eval());
    default:
        return x0 + frame * p;
    }
}

PlanarCell halfplane_cell(const std::vector<Eigen::Vector2d>& dirs, const std::vector<double>& offsets)
{
    using V2 = Eigen::Vector2d;
    PlanarCell out;
    const int m = static_cast<int>(dirs.size());
    if (m < 3) return out;
    // polar dual points; the cell is bounded iff the origin is inside their hull
    std::vector<V2> q(m);
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) {
        q[i] = dirs[i] / offsets[i];
        idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return q[a](0) < q[b](0) || (q[a](0) == q[b](0) && q[a](1) < q[b](1)); });
    auto cross = [&](int o, int a, int b) {
        return (q[a] - q[o])(0) * (q[b] - q[o])(1) - (q[a] - q[o])(1) * (q[b] - q[o])(0);
    };
    std::vector<int> hull(2 * m);
    int h = 0;
    for (int i = 0; i < m; ++i) {
        while (h >= 2 && cross(hull[h - 2], hull[h - 1], idx[i]) <= 0) --h;
        hull[h++] = idx[i];
    }
    for (int i = m - 2, lo = h + 1; i >= 0; --i) {
        while (h >= lo && cross(hull[h - 2], hull[h - 1], idx[i]) <= 0) --h;
        hull[h++] = idx[i];
    }
    hull.resize(h - 1);
    const int hs = static_cast<int>(hull.size());
    if (hs < 3) return out;
    for (int i = 0; i < hs; ++i) {
        const V2& a = q[hull[i]];
        const V2& b = q[hull[(i + 1) % hs]];
        // origin strictly left of a -> b
        if ((b - a)(0) * (-a)(1) - (b - a)(1) * (-a)(0) <= 0) return out;
    }
    out.bounded = true;
    for (int i = 0; i < hs; ++i) {
        const int ia = hull[i], ib = hull[(i + 1) % hs];
        Eigen::Matrix2d M;
        M.row(0) = q[ia].transpose();
        M.row(1) = q[ib].transpose();
        const V2 p = M.inverse() * V2(1, 1);
        out.vertices.push_back(p);
        out.generators.push_back({ia, ib});
        out.max_norm = std::max(out.max_norm, p.norm());
    }
    return out;
}

}  // namespace vlab
