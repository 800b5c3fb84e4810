#pragma once

#include "vlab/spaces.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace vlab {

// one independent, reproducible random stream per (master seed, index)
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t index);

    double uniform();
    double normal();
    double exponential();
    long long poisson(double mean);
    // uniform on the unit sphere of R^n
    Vec unit_vector(int n);
    std::mt19937_64& engine() { return eng_; }

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t index() const { return index_; }

private:
    std::uint64_t seed_, index_;
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_;
};

RngStream make_rng_stream(std::uint64_t master_seed, std::uint64_t replicate_index);

enum class WindowKind { FullSphere, GeodesicBall, TorusFundamentalDomain };

struct Window {
    WindowKind kind = WindowKind::GeodesicBall;
    Space space;
    Vec center;
    double radius = 0;

    static Window full_sphere(const Space& sp);
    static Window ball(const Space& sp, const Vec& center, double radius);
    static Window torus(const Space& sp);

    double volume() const;
    bool contains(const Vec& x) const;
};

struct NucleusCloud {
    std::vector<Vec> points;
    double lambda = 0;
    Window window;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

NucleusCloud sample_ppp(const Window& w, double lambda, RngStream& rng);

// uniform point of the geodesic ball B(center, R); frame = tangent_frame(center)
Vec sample_in_ball(const Space& sp, const Vec& center, const Mat& frame, double R, RngStream& rng);

// window radius making the exterior irrelevant up to probability eps
double hyperbolic_window_radius(const Space& sp, double lambda, double eps);

// Poisson process revealed in order of distance from x0
class RadialSweep {
public:
    RadialSweep(const Space& sp, const Vec& x0, double lambda, RngStream& rng);

    // false once the whole (compact) space is exhausted
    bool next();
    void extend_to_count(std::size_t m);
    void extend_to_radius(double r);

    const std::vector<Vec>& points() const { return points_; }
    const std::vector<double>& radii() const { return radii_; }
    // every nucleus within this distance of x0 has been generated
    double swept_radius() const;
    bool exhausted() const { return exhausted_; }

private:
    Space sp_;
    Vec x0_;
    Mat frame_;
    double lambda_;
    RngStream& rng_;
    double volume_ = 0;
    bool exhausted_ = false;
    std::vector<Vec> points_;
    std::vector<double> radii_;
};

std::string hex_double(double x);
double parse_hex_double(const std::string& s);

// one JSON object per line, coordinates hex-encoded
std::string to_json_lines(const NucleusCloud& c);
NucleusCloud cloud_from_json_lines(const std::string& text);

}  // namespace vlab
