#include "vlab/sampling.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace vlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t index)
    : seed_(master_seed), index_(index), eng_(splitmix64(splitmix64(master_seed) ^ splitmix64(~index)))
{
}

double RngStream::uniform() { return std::generate_canonical<double, 53>(eng_); }

double RngStream::normal() { return normal_(eng_); }

double RngStream::exponential() { return std::exponential_distribution<double>(1.0)(eng_); }

long long RngStream::poisson(double mean)
{
    if (mean <= 0) return 0;
    return std::poisson_distribution<long long>(mean)(eng_);
}

Vec RngStream::unit_vector(int n)
{
    Vec v(n);
    double nv = 0;
    do {
        for (int i = 0; i < n; ++i) v(i) = normal();
        nv = v.norm();
    } while (nv < 1e-300);
    return v / nv;
}

RngStream make_rng_stream(std::uint64_t master_seed, std::uint64_t replicate_index)
{
    return RngStream(master_seed, replicate_index);
}

Window Window::full_sphere(const Space& sp)
{
    if (sp.model != Model::Spherical) throw DomainError("FullSphere window needs a sphere");
    return {WindowKind::FullSphere, sp, base_point(sp), M_PI / sp.k};
}

Window Window::ball(const Space& sp, const Vec& center, double radius)
{
    if (sp.model == Model::FlatTorus2) throw DomainError("ball window not supported on the torus");
    if (!(radius > 0)) throw DomainError("window radius must be positive");
    if (sp.model == Model::Spherical && radius >= M_PI / sp.k) throw DomainError("ball window radius must be < pi/k");
    return {WindowKind::GeodesicBall, sp, center, radius};
}

Window Window::torus(const Space& sp)
{
    if (sp.model != Model::FlatTorus2) throw DomainError("torus window needs a torus");
    return {WindowKind::TorusFundamentalDomain, sp, Vec::Zero(2), sp.period};
}

double Window::volume() const
{
    switch (kind) {
    case WindowKind::FullSphere:
    case WindowKind::TorusFundamentalDomain:
        return space.total_volume();
    default:
        return ball_volume(space, radius);
    }
}

bool Window::contains(const Vec& x) const
{
    if (kind != WindowKind::GeodesicBall) return true;
    return distance(space, center, x) <= radius * (1 + 1e-12);
}

Vec sample_in_ball(const Space& sp, const Vec& center, const Mat& frame, double R, RngStream& rng)
{
    const double r = ball_radius_for_volume(sp, rng.uniform() * ball_volume(sp, R));
    const Vec dir = rng.unit_vector(sp.n);
    return exp_map(sp, center, (frame * dir * r).eval());
}

NucleusCloud sample_ppp(const Window& w, double lambda, RngStream& rng)
{
    if (!(lambda > 0)) throw DomainError("sample_ppp: lambda must be positive");
    NucleusCloud c;
    c.lambda = lambda;
    c.window = w;
    c.seed = rng.master_seed();
    c.stream_id = rng.index();
    const Space& sp = w.space;
    const long long count = rng.poisson(lambda * w.volume());
    c.points.reserve(count);
    switch (w.kind) {
    case WindowKind::FullSphere:
        for (long long i = 0; i < count; ++i) c.points.push_back(rng.unit_vector(sp.n + 1) / sp.k);
        break;
    case WindowKind::TorusFundamentalDomain:
        for (long long i = 0; i < count; ++i) {
            Vec p(2);
            p(0) = rng.uniform() * sp.period;
            p(1) = rng.uniform() * sp.period;
            c.points.push_back(p);
        }
        break;
    case WindowKind::GeodesicBall: {
        const Mat frame = tangent_frame(sp, w.center);
        for (long long i = 0; i < count; ++i) c.points.push_back(sample_in_ball(sp, w.center, frame, w.radius, rng));
        break;
    }
    }
    return c;
}

double hyperbolic_window_radius(const Space& sp, double lambda, double eps)
{
    if (!(eps > 0 && eps < 1)) throw DomainError("hyperbolic_window_radius: eps must be in (0,1)");
    if (!(lambda > 0)) throw DomainError("hyperbolic_window_radius: lambda must be positive");
    const double m = std::pow(17.0, sp.n);
    const double cap = sp.model == Model::Spherical ? M_PI / sp.k : std::numeric_limits<double>::infinity();
    for (long long i = 1;; ++i) {
        const double R = i * 1e-3;
        if (R >= cap) return cap;
        const double bound = (lambda * ball_volume(sp, R) + 1) * m * std::exp(-lambda * ball_volume(sp, R / 8));
        if (bound < eps) return R;
    }
}

RadialSweep::RadialSweep(const Space& sp, const Vec& x0, double lambda, RngStream& rng)
    : sp_(sp), x0_(x0), frame_(tangent_frame(sp, x0)), lambda_(lambda), rng_(rng)
{
    if (sp.model == Model::FlatTorus2) throw DomainError("radial sweep not available on the torus");
    if (!(lambda > 0)) throw DomainError("radial sweep: lambda must be positive");
}

bool RadialSweep::next()
{
    if (exhausted_) return false;
    volume_ += rng_.exponential() / lambda_;
    if (sp_.model == Model::Spherical && volume_ >= sp_.total_volume()) {
        exhausted_ = true;
        return false;
    }
    const double r = ball_radius_for_volume(sp_, volume_);
    const Vec dir = rng_.unit_vector(sp_.n);
    points_.push_back(exp_map(sp_, x0_, (frame_ * dir * r).eval()));
    radii_.push_back(r);
    return true;
}

void RadialSweep::extend_to_count(std::size_t m)
{
    while (points_.size() < m && next()) {
    }
}

void RadialSweep::extend_to_radius(double r)
{
    while (!exhausted_ && (radii_.empty() || radii_.back() < r) && next()) {
    }
}

double RadialSweep::swept_radius() const
{
    if (exhausted_) return std::numeric_limits<double>::infinity();
    return radii_.empty() ? 0.0 : radii_.back();
}

std::string hex_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_hex_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

namespace {

using nlohmann::json;

json hex_vec(const Vec& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(hex_double(v(i)));
    return a;
}

Vec vec_from(const json& a)
{
    Vec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(i) = parse_hex_double(a[i].get<std::string>());
    return v;
}

const char* kind_name(WindowKind k)
{
    switch (k) {
    case WindowKind::FullSphere: return "full_sphere";
    case WindowKind::TorusFundamentalDomain: return "torus";
    default: return "geodesic_ball";
    }
}

json window_json(const Window& w)
{
    return {{"kind", kind_name(w.kind)},   {"model", w.space.name()},       {"n", w.space.n},
            {"k", hex_double(w.space.k)},  {"period", hex_double(w.space.period)},
            {"center", hex_vec(w.center)}, {"radius", hex_double(w.radius)}};
}

Window window_from(const json& j)
{
    Window w;
    const std::string kind = j.at("kind");
    w.kind = kind == "full_sphere" ? WindowKind::FullSphere
           : kind == "torus"       ? WindowKind::TorusFundamentalDomain
                                   : WindowKind::GeodesicBall;
    w.space.model = parse_model(j.at("model"));
    w.space.n = j.at("n");
    w.space.k = parse_hex_double(j.at("k"));
    w.space.period = parse_hex_double(j.at("period"));
    w.center = vec_from(j.at("center"));
    w.radius = parse_hex_double(j.at("radius"));
    return w;
}

}  // namespace

std::string to_json_lines(const NucleusCloud& c)
{
    std::ostringstream os;
    const json win = window_json(c.window);
    auto line = [&](const json& coords) {
        json j = {{"coords", coords}, {"seed", c.seed}, {"stream_id", c.stream_id},
                  {"lambda", hex_double(c.lambda)}, {"window", win}};
        os << j.dump() << '\n';
    };
    if (c.points.empty()) line(nullptr);
    for (const auto& p : c.points) line(hex_vec(p));
    return os.str();
}

NucleusCloud cloud_from_json_lines(const std::string& text)
{
    NucleusCloud c;
    std::istringstream is(text);
    std::string ln;
    bool first = true;
    while (std::getline(is, ln)) {
        if (ln.empty()) continue;
        const json j = json::parse(ln);
        if (first) {
            c.seed = j.at("seed");
            c.stream_id = j.at("stream_id");
            c.lambda = parse_hex_double(j.at("lambda"));
            c.window = window_from(j.at("window"));
            first = false;
        }
        if (!j.at("coords").is_null()) c.points.push_back(vec_from(j.at("coords")));
    }
    return c;
}

}  // namespace vlab
