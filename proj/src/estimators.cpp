#include "vlab/estimators.hpp"

#include "vlab/constants.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

namespace vlab {

int resolve_threads(int requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VORONOI_LAB_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr long long kBlock = 4096;
constexpr int kMaxRedraws = 64;

template <typename R>
R run_one(long long idx, std::uint64_t seed, const ReplicateFn<R>& fn, long long& redraws)
{
    for (int attempt = 0;; ++attempt) {
        RngStream rng(seed, static_cast<std::uint64_t>(idx) + (static_cast<std::uint64_t>(attempt) << 40));
        try {
            return fn(idx, rng);
        } catch (const DegenerateInput&) {
        } catch (const DegeneratePosition&) {
        }
        if (attempt + 1 >= kMaxRedraws) throw DegeneratePosition("replicate stayed degenerate after redraws");
        ++redraws;
    }
}

template <typename R, typename Fold>
void run_impl(long long replicates, std::uint64_t seed, int threads, const ReplicateFn<R>& fn, Fold&& fold,
              ReplicateLog* log)
{
    if (replicates < 1) throw DomainError("replicates must be >= 1");
    const int T = resolve_threads(threads);
    const long long nblocks = (replicates + kBlock - 1) / kBlock;
    std::vector<std::vector<R>> buf(T);
    std::vector<long long> redraws(T, 0);
    for (long long round = 0; round * T < nblocks; ++round) {
        std::vector<std::exception_ptr> errs(T);
        auto work = [&](int t) {
            const long long b = round * T + t;
            buf[t].clear();
            if (b >= nblocks) return;
            const long long lo = b * kBlock, hi = std::min(replicates, lo + kBlock);
            try {
                for (long long i = lo; i < hi; ++i) buf[t].push_back(run_one(i, seed, fn, redraws[t]));
            } catch (...) {
                errs[t] = std::current_exception();
            }
        };
        if (T == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < T; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        for (int t = 0; t < T; ++t)
            if (errs[t]) std::rethrow_exception(errs[t]);
        for (int t = 0; t < T; ++t) {
            const long long lo = (round * T + t) * kBlock;
            for (std::size_t j = 0; j < buf[t].size(); ++j) fold(lo + static_cast<long long>(j), buf[t][j]);
        }
    }
    if (log)
        for (long long r : redraws) log->resampled += r;
}

}  // namespace

void run_replicates(long long replicates, std::uint64_t seed, int threads, const ReplicateFn<double>& fn,
                    const std::function<void(long long, double)>& fold, ReplicateLog* log)
{
    run_impl(replicates, seed, threads, fn, fold, log);
}

void run_replicates(long long replicates, std::uint64_t seed, int threads, const ReplicateFn<std::vector<double>>& fn,
                    const std::function<void(long long, const std::vector<double>&)>& fold, ReplicateLog* log)
{
    run_impl(replicates, seed, threads, fn, fold, log);
}

bool sweep_typical_cell_2d(const Space& sp, double lambda, RngStream& rng, TypicalCell2d& out)
{
    if (sp.n != 2 || sp.model == Model::FlatTorus2) throw DomainError("sweep_typical_cell_2d: plane, sphere or H^2 only");
    if (!(lambda > 0)) throw DomainError("lambda must be positive");
    const double k2 = sp.k * sp.k;
    const double total = sp.total_volume();
    std::vector<Eigen::Vector2d> dirs;
    std::vector<double> offs;
    dirs.reserve(64);
    offs.reserve(64);
    double V = 0;
    bool exhausted = false;
    // bisector offset tan/tanh(k r / 2) straight from the swept volume
    auto next = [&]() {
        if (exhausted) return false;
        V += rng.exponential() / lambda;
        double c;
        switch (sp.model) {
        case Model::Spherical: {
            if (V >= total) {
                exhausted = true;
                return false;
            }
            const double s2 = k2 * V / (4 * M_PI);
            c = std::sqrt(s2 / (1 - s2));
            break;
        }
        case Model::Hyperbolic: {
            const double s2 = k2 * V / (4 * M_PI);
            c = std::sqrt(s2 / (1 + s2));
            break;
        }
        default:
            c = std::sqrt(V / M_PI) / 2;
        }
        const double th = 2 * M_PI * rng.uniform();
        dirs.emplace_back(std::cos(th), std::sin(th));
        offs.push_back(c);
        return true;
    };
    for (int i = 0; i < 6; ++i) next();
    for (;;) {
        out.cell = halfplane_cell(dirs, offs);
        if (exhausted) {
            if (!out.cell.bounded) return false;
            break;
        }
        if (out.cell.bounded) {
            if (out.cell.max_norm <= offs.back()) break;
            // a vertex outside the Klein disk never satisfies this; recompute after a batch
            for (int added = 0; added < 16 && offs.back() < out.cell.max_norm && next(); ++added) {
            }
        } else {
            for (int i = 0; i < 4; ++i) next();
        }
    }
    out.nuclei = static_cast<int>(offs.size());
    out.vertex_radii.clear();
    for (const auto& p : out.cell.vertices) out.vertex_radii.push_back(chart_distance(sp, p.norm()));
    return true;
}

double typical_cell_area_2d(const Space& sp, const TypicalCell2d& c)
{
    const auto& v = c.cell.vertices;
    if (sp.model == Model::Euclidean) {
        double a = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& p = v[i];
            const auto& q = v[(i + 1) % v.size()];
            a += p(0) * q(1) - p(1) * q(0);
        }
        return a / 2;
    }
    const Vec x0 = base_point(sp);
    const Mat E = tangent_frame(sp, x0);
    std::vector<Vec> pts;
    for (const auto& p : v) pts.push_back(chart_to_point(sp, x0, E, p));
    return polygon_area_2d(sp, x0, pts, E);
}

namespace {

std::vector<Vec> unroll_torus(const Space& sp, const std::vector<Vec>& cloud)
{
    std::vector<Vec> out;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (const auto& x : cloud) {
                Vec p = torus_reduce(sp, x);
                p(0) += a * sp.period;
                p(1) += b * sp.period;
                out.push_back(p);
            }
    return out;
}

Window fixed_window(const Space& sp, const Vec& x0, double lambda)
{
    switch (sp.model) {
    case Model::Spherical:
        return Window::full_sphere(sp);
    case Model::FlatTorus2:
        return Window::torus(sp);
    default:
        return Window::ball(sp, x0, hyperbolic_window_radius(sp, lambda, 1e-9));
    }
}

Vec typical_point(const Space& sp)
{
    if (sp.model == Model::FlatTorus2) return Vec::Constant(2, sp.period / 2);
    return base_point(sp);
}

// geometry in which the cell is computed (the torus is unrolled into the plane)
Space working_space(const Space& sp)
{
    return sp.model == Model::FlatTorus2 ? Space::euclidean(2) : sp;
}

double max_radius(const CellSummary& c)
{
    double r = 0;
    for (const auto& v : c.vertices) r = std::max(r, v.r);
    return r;
}

template <typename CellFn>
CellSummary sweep_until_final(const Space& sp, const Vec& x0, double lambda, RngStream& rng, int start,
                              std::vector<Vec>& nuclei, CellFn&& cell_of)
{
    RadialSweep sw(sp, x0, lambda, rng);
    sw.extend_to_count(start);
    for (;;) {
        CellSummary c = cell_of(sw.points());
        if (sw.exhausted()) {
            c.certified = c.closed;
            nuclei = sw.points();
            return c;
        }
        if (c.closed) {
            const double r = max_radius(c);
            if (2 * r <= sw.swept_radius()) {
                c.certified = true;
                nuclei = sw.points();
                return c;
            }
            sw.extend_to_radius(2 * r * (1 + 1e-12));
        } else {
            sw.extend_to_count(2 * sw.points().size());
        }
    }
}

int start_count(const Space& sp, int k_candidates)
{
    return std::max(sp.n + 1, k_candidates > 0 ? k_candidates : std::max(4 * sp.n, 30));
}

}  // namespace

TypicalCell sample_typical_cell(const Space& sp, double lambda, RngStream& rng, const RunOptions& opt)
{
    TypicalCell t;
    t.x0 = typical_point(sp);
    if (opt.sampling == Sampling::RadialSweep && sp.model != Model::FlatTorus2) {
        t.cell = sweep_until_final(sp, t.x0, lambda, rng, start_count(sp, opt.k_candidates), t.nuclei,
                                   [&](const std::vector<Vec>& pts) {
                                       return enumerate_cell_vertices(sp, t.x0, pts, opt.k_candidates);
                                   });
        return t;
    }
    const Window w = fixed_window(sp, t.x0, lambda);
    const NucleusCloud cloud = sample_ppp(w, lambda, rng);
    if (sp.model == Model::FlatTorus2) {
        t.nuclei = unroll_torus(sp, cloud.points);
        t.cell = enumerate_cell_vertices(working_space(sp), t.x0, t.nuclei, opt.k_candidates);
        t.cell.certified = t.cell.closed && 2 * max_radius(t.cell) < sp.period / 2;
    } else {
        t.nuclei = cloud.points;
        t.cell = enumerate_cell_vertices(sp, t.x0, t.nuclei, opt.k_candidates, &w);
    }
    return t;
}

namespace {

void require_certified(long long certified, long long total)
{
    if (certified < 0.99 * total) throw UncertifiedCell("more than 1% of replicates were not certified");
}

Estimate finish(const Accumulator& a, std::uint64_t seed, long long certified, long long total)
{
    Estimate e;
    e.mean = a.mean;
    e.std_error = a.std_error();
    e.replicates = a.count;
    e.master_seed = seed;
    e.certified_fraction = total ? double(certified) / total : 0.0;
    return e;
}

bool fast_2d(const Space& sp, const RunOptions& opt)
{
    return sp.n == 2 && sp.model != Model::FlatTorus2 && opt.sampling == Sampling::RadialSweep;
}

}  // namespace

Estimate estimate_mean_volume(const Space& sp, double lambda, long long replicates, long long point_budget,
                              std::uint64_t seed, const RunOptions& opt)
{
    const int T = resolve_threads(opt.threads);
    ReplicateFn<double> fn = [&](long long, RngStream& rng) -> double {
        if (fast_2d(sp, opt)) {
            TypicalCell2d c;
            if (sweep_typical_cell_2d(sp, lambda, rng, c)) return typical_cell_area_2d(sp, c);
        }
        const TypicalCell t = sample_typical_cell(sp, lambda, rng, opt);
        if (!t.cell.certified || t.cell.vertices.empty()) return NAN;
        const Space ws = working_space(sp);
        if (sp.n == 2) {
            const Mat E = tangent_frame(ws, t.x0);
            return polygon_area_2d(ws, t.x0, order_around(ws, t.x0, t.cell.vertices, E), E);
        }
        return cell_volume_mc(ws, t.x0, t.nuclei, t.cell, point_budget, rng).mean;
    };
    Accumulator acc;
    long long certified = 0;
    run_replicates(replicates, seed, T, fn, [&](long long, double v) {
        if (std::isnan(v)) return;
        ++certified;
        acc.add(v);
    });
    require_certified(certified, replicates);
    return finish(acc, seed, certified, replicates);
}

namespace {

// per replicate: vertex radii, NaN first entry when uncertified
std::vector<double> replicate_vertex_radii(const Space& sp, double lambda, RngStream& rng, const RunOptions& opt)
{
    if (fast_2d(sp, opt)) {
        TypicalCell2d c;
        if (sweep_typical_cell_2d(sp, lambda, rng, c)) return c.vertex_radii;
    }
    const TypicalCell t = sample_typical_cell(sp, lambda, rng, opt);
    if (!t.cell.certified) return {NAN};
    std::vector<double> r;
    for (const auto& v : t.cell.vertices) r.push_back(v.r);
    return r;
}

}  // namespace

Estimate estimate_mean_N(const Space& sp, double lambda, long long replicates, std::uint64_t seed,
                         const RunOptions& opt)
{
    const int T = resolve_threads(opt.threads);
    ReplicateFn<double> fn = [&](long long, RngStream& rng) -> double {
        if (fast_2d(sp, opt)) {
            TypicalCell2d c;
            if (sweep_typical_cell_2d(sp, lambda, rng, c)) return static_cast<double>(c.cell.vertices.size());
        }
        const TypicalCell t = sample_typical_cell(sp, lambda, rng, opt);
        return t.cell.certified ? t.cell.vertex_count : NAN;
    };
    Accumulator acc;
    long long certified = 0;
    run_replicates(replicates, seed, T, fn, [&](long long, double v) {
        if (std::isnan(v)) return;
        ++certified;
        acc.add(v);
    });
    require_certified(certified, replicates);
    return finish(acc, seed, certified, replicates);
}

double DensityHistogram::total_mass() const
{
    double s = overflow;
    for (double m : mass) s += m;
    return s;
}

DensityHistogram estimate_vertex_density(const Space& sp, double lambda, long long replicates,
                                         const std::vector<double>& r_edges, std::uint64_t seed, const RunOptions& opt)
{
    if (r_edges.size() < 2 || !std::is_sorted(r_edges.begin(), r_edges.end()) || r_edges.front() < 0)
        throw DomainError("estimate_vertex_density: need an increasing grid starting at >= 0");
    const int bins = static_cast<int>(r_edges.size()) - 1;
    const double scale = std::pow(lambda, 1.0 / sp.n);
    const int T = resolve_threads(opt.threads);
    ReplicateFn<std::vector<double>> fn = [&](long long, RngStream& rng) {
        const std::vector<double> radii = replicate_vertex_radii(sp, lambda, rng, opt);
        if (!radii.empty() && std::isnan(radii[0])) return std::vector<double>{NAN};
        // bins, overflow, total
        std::vector<double> row(bins + 2, 0.0);
        for (double r : radii) {
            const double rn = scale * r;
            const auto it = std::upper_bound(r_edges.begin(), r_edges.end(), rn);
            if (it == r_edges.begin()) continue;
            const int b = static_cast<int>(it - r_edges.begin()) - 1;
            if (b >= bins) row[bins] += 1;
            else row[b] += 1;
        }
        row[bins + 1] = static_cast<double>(radii.size());
        return row;
    };
    std::vector<Accumulator> acc(bins + 2);
    long long certified = 0;
    run_replicates(replicates, seed, T, fn, [&](long long, const std::vector<double>& row) {
        if (std::isnan(row[0])) return;
        ++certified;
        for (int b = 0; b < bins + 2; ++b) acc[b].add(row[b]);
    });
    require_certified(certified, replicates);
    DensityHistogram h;
    h.r_edges = r_edges;
    for (int b = 0; b < bins; ++b) {
        h.mass.push_back(acc[b].mean);
        h.se.push_back(acc[b].std_error());
    }
    h.overflow = acc[bins].mean;
    h.mean_N = finish(acc[bins + 1], seed, certified, replicates);
    return h;
}

Estimate estimate_scalar_curvature(const Space& sp, double lambda, long long replicates, std::uint64_t seed,
                                   const RunOptions& opt)
{
    const Estimate N = estimate_mean_N(sp, lambda, replicates, seed, opt);
    const int n = sp.n;
    const double f = std::pow(lambda, 2.0 / n) / d_n(n);
    Estimate e = N;
    e.mean = f * (e_n(n) - N.mean);
    e.std_error = f * N.std_error;
    return e;
}

namespace {

struct SectionCell {
    Vec x0;
    Mat basis;
    std::vector<Vec> nuclei;
    CellSummary cell;
};

SectionCell sample_section_cell(const Space& sp, int s, double lambda, RngStream& rng, const RunOptions& opt)
{
    SectionCell t;
    t.x0 = typical_point(sp);
    const Space ws = working_space(sp);
    t.basis = tangent_frame(ws, t.x0).leftCols(s);
    auto cell_of = [&](const std::vector<Vec>& pts) {
        return section_cell_vertices(ws, t.x0, pts, t.basis, opt.k_candidates);
    };
    if (opt.sampling == Sampling::RadialSweep && sp.model != Model::FlatTorus2) {
        t.cell = sweep_until_final(sp, t.x0, lambda, rng, start_count(sp, opt.k_candidates), t.nuclei, cell_of);
        return t;
    }
    const Window w = fixed_window(sp, t.x0, lambda);
    const NucleusCloud cloud = sample_ppp(w, lambda, rng);
    t.nuclei = sp.model == Model::FlatTorus2 ? unroll_torus(sp, cloud.points) : cloud.points;
    t.cell = cell_of(t.nuclei);
    t.cell.certified = t.cell.closed;
    if (sp.model == Model::FlatTorus2) t.cell.certified = t.cell.certified && 2 * max_radius(t.cell) < sp.period / 2;
    for (const auto& v : t.cell.vertices)
        if (w.kind == WindowKind::GeodesicBall && distance(sp, w.center, v.point) + v.r > w.radius) t.cell.certified = false;
    return t;
}

}  // namespace

SectionStats estimate_section_stats(const Space& sp, int s, double lambda, long long replicates, std::uint64_t seed,
                                    long long point_budget, const RunOptions& opt)
{
    if (s < 1 || s > sp.n) throw DomainError("section dimension out of range");
    const int T = resolve_threads(opt.threads);
    const Space ws = working_space(sp);
    ReplicateFn<std::vector<double>> fn = [&](long long, RngStream& rng) {
        const SectionCell t = sample_section_cell(sp, s, lambda, rng, opt);
        if (!t.cell.certified || t.cell.vertices.empty()) return std::vector<double>{NAN, NAN};
        double vol;
        if (s == 1) {
            vol = t.cell.vertices[0].r + (t.cell.vertices.size() > 1 ? t.cell.vertices[1].r : 0.0);
        } else if (s == 2) {
            vol = polygon_area_2d(ws, t.x0, order_around(ws, t.x0, t.cell.vertices, t.basis), t.basis);
        } else {
            vol = section_cell_volume_mc(ws, t.x0, t.nuclei, t.basis, point_budget, rng).mean;
        }
        return std::vector<double>{vol, static_cast<double>(t.cell.vertex_count)};
    };
    Accumulator vol, cnt;
    long long certified = 0;
    run_replicates(replicates, seed, T, fn, [&](long long, const std::vector<double>& row) {
        if (std::isnan(row[0])) return;
        ++certified;
        vol.add(row[0]);
        cnt.add(row[1]);
    });
    require_certified(certified, replicates);
    return {finish(vol, seed, certified, replicates), finish(cnt, seed, certified, replicates)};
}

GaussBonnetReport gauss_bonnet_experiment(const Space& sp, double lambda, long long replicates, std::uint64_t seed,
                                          const RunOptions& opt)
{
    const bool sphere2 = sp.model == Model::Spherical && sp.n == 2;
    if (!sphere2 && sp.model != Model::FlatTorus2) throw DomainError("gauss_bonnet_experiment: sphere or torus only");
    const double vol = sp.total_volume();
    if (lambda * vol < 10) throw DomainError("gauss_bonnet_experiment: lambda * vol must be >= 10");
    const Window w = sphere2 ? Window::full_sphere(sp) : Window::torus(sp);
    ReplicateFn<std::vector<double>> fn = [&](long long, RngStream& rng) {
        const NucleusCloud c = sample_ppp(w, lambda, rng);
        if (c.points.size() < 4) throw DegeneratePosition("fewer than 4 nuclei");
        const TessellationCounts t = full_tessellation_counts(sp, c.points);
        return std::vector<double>{double(t.F), double(t.E), double(t.V), double(t.euler)};
    };
    GaussBonnetReport rep;
    Accumulator fv, lv;
    ReplicateLog log;
    run_replicates(
        replicates, seed, resolve_threads(opt.threads), fn,
        [&](long long, const std::vector<double>& row) {
            TessellationCounts t{(long long)row[0], (long long)row[1], (long long)row[2], (long long)row[3]};
            if (rep.rows.empty()) rep.euler_value = t.euler;
            if (t.euler != rep.euler_value) rep.euler_constant = false;
            if (2 * t.E != 3 * t.V) rep.two_e_equals_three_v = false;
            rep.rows.push_back(t);
            fv.add(t.F - 0.5 * t.V);
            lv.add(lambda * vol - 0.5 * t.V);
        },
        &log);
    rep.resampled = log.resampled;
    rep.f_minus_half_v = finish(fv, seed, replicates, replicates);
    rep.lambda_vol_minus_half_v = finish(lv, seed, replicates, replicates);
    rep.curvature_reading = sp.scal() / 2 * vol / (2 * M_PI);
    return rep;
}

}  // namespace vlab
