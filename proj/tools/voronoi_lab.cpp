#include "vlab/acceptance.hpp"
#include "vlab/bp_check.hpp"
#include "vlab/closed_forms.hpp"
#include "vlab/constants.hpp"
#include "vlab/estimators.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#ifndef VLAB_VERSION
#define VLAB_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace vlab;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string command;
    std::string kind;  // estimate only
    std::string model = "sphere";
    int n = 2;
    double k = 1.0;
    double period = 1.0;
    std::optional<int> s;
    double lambda = 10.0;
    std::string lambda_scan;
    long long replicates = 1000;
    long long point_budget = 4000;
    std::uint64_t seed = 1;
    std::string output;
    std::string format;  // empty: per-command default
    std::string sampling = "sweep";
    std::string r_edges = "0:4:40";
    std::optional<double> r;
    std::string only;
    std::set<std::string> keys;  // config keys the command reads
};

// key, JSON type, description; the config file may hold exactly these keys
struct Field {
    const char* key;
    const char* type;
    const char* doc;
};
const Field kFields[] = {
    {"command", "string", "subcommand; must match the one invoked"},
    {"kind", "string", "estimate target: vol, N, density, section, curvature"},
    {"model", "string", "euclidean, sphere, hyperbolic, torus"},
    {"n", "integer", "dimension >= 2"},
    {"k", "number", "curvature scale (sphere radius 1/k, hyperbolic curvature -k^2)"},
    {"period", "number", "torus period"},
    {"s", "integer", "section dimension, 1 <= s <= n"},
    {"lambda", "number", "intensity"},
    {"lambda_scan", "string", "a:b:steps, geometric spacing"},
    {"replicates", "integer", "replicate count"},
    {"point_budget", "integer", "Monte Carlo points per cell volume"},
    {"seed", "integer", "master seed"},
    {"output", "string", "output path, empty for stdout"},
    {"format", "string", "csv or json"},
    {"sampling", "string", "sweep or window"},
    {"r_edges", "string", "a:b:bins, normalized radius histogram grid"},
    {"r", "number", "circumradius for bp-check (default: uniform on [0.2, 0.8])"},
    {"only", "string", "comma-separated criterion ids for verify-all"},
};

json schema()
{
    json props = json::object();
    for (const auto& f : kFields) props[f.key] = {{"type", f.type}, {"description", f.doc}};
    props["kind"]["enum"] = {"vol", "N", "density", "section", "curvature"};
    props["model"]["enum"] = {"euclidean", "sphere", "hyperbolic", "torus"};
    props["format"]["enum"] = {"csv", "json"};
    props["sampling"]["enum"] = {"sweep", "window"};
    return {{"$schema", "http://json-schema.org/draft-07/schema#"},
            {"title", "voronoi_lab experiment config"},
            {"type", "object"},
            {"additionalProperties", false},
            {"properties", props}};
}

// only the keys the command reads, so the line can be fed back through --config
json to_json(const Config& c)
{
    auto has = [&](const char* k) { return c.keys.count(k) > 0; };
    json j;
    j["command"] = c.command;
    if (!c.kind.empty()) j["kind"] = c.kind;
    if (has("model")) j["model"] = c.model;
    if (has("n")) j["n"] = c.n;
    if (has("k")) j["k"] = c.k;
    if (has("period") && c.model == "torus") j["period"] = c.period;
    if (has("s") && c.s) j["s"] = *c.s;
    if (has("lambda_scan") && !c.lambda_scan.empty()) j["lambda_scan"] = c.lambda_scan;
    else if (has("lambda")) j["lambda"] = c.lambda;
    if (has("replicates")) j["replicates"] = c.replicates;
    if (has("point_budget")) j["point_budget"] = c.point_budget;
    if (has("seed")) j["seed"] = c.seed;
    j["format"] = c.format;
    if (has("sampling")) j["sampling"] = c.sampling;
    if (has("r_edges") && c.kind == "density") j["r_edges"] = c.r_edges;
    if (has("r") && c.r) j["r"] = *c.r;
    if (has("only")) j["only"] = c.only;
    return j;
}

template <typename T>
T get_as(const json& v, const char* key)
{
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

void apply_file(const std::string& path, Config& c)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, v] : j.items()) {
        const char* kk = key.c_str();
        const bool known = std::any_of(std::begin(kFields), std::end(kFields), [&](const Field& f) { return key == f.key; });
        if (!known) throw ConfigError("unknown config key '" + key + "'");
        static const std::set<std::string> always{"command", "kind", "format", "output"};
        if (!always.count(key) && !c.keys.count(key))
            throw ConfigError("config key '" + key + "' does not apply to " + c.command);
        if (key == "kind" && c.command != "estimate") throw ConfigError("config key 'kind' applies to estimate only");
        if (key == "command") {
            if (get_as<std::string>(v, kk) != c.command)
                throw ConfigError("config is for '" + v.get<std::string>() + "', not '" + c.command + "'");
        } else if (key == "kind") c.kind = get_as<std::string>(v, kk);
        else if (key == "model") c.model = get_as<std::string>(v, kk);
        else if (key == "n") c.n = get_as<int>(v, kk);
        else if (key == "k") c.k = get_as<double>(v, kk);
        else if (key == "period") c.period = get_as<double>(v, kk);
        else if (key == "s") c.s = get_as<int>(v, kk);
        else if (key == "lambda") c.lambda = get_as<double>(v, kk);
        else if (key == "lambda_scan") c.lambda_scan = get_as<std::string>(v, kk);
        else if (key == "replicates") c.replicates = get_as<long long>(v, kk);
        else if (key == "point_budget") c.point_budget = get_as<long long>(v, kk);
        else if (key == "seed") {
            if (!v.is_number_unsigned()) throw ConfigError("config key 'seed' must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        }
        else if (key == "output") c.output = get_as<std::string>(v, kk);
        else if (key == "format") c.format = get_as<std::string>(v, kk);
        else if (key == "sampling") c.sampling = get_as<std::string>(v, kk);
        else if (key == "r_edges") c.r_edges = get_as<std::string>(v, kk);
        else if (key == "r") c.r = get_as<double>(v, kk);
        else if (key == "only") c.only = get_as<std::string>(v, kk);
    }
}

// "a:b:c" -> three numbers
std::array<double, 3> triple(const std::string& text, const char* what)
{
    std::array<double, 3> out{};
    std::istringstream is(text);
    std::string part;
    int i = 0;
    while (std::getline(is, part, ':')) {
        if (i == 3) throw ConfigError(std::string(what) + ": expected a:b:count");
        try {
            std::size_t used = 0;
            out[i] = std::stod(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::logic_error&) {
            throw ConfigError(std::string(what) + ": bad number '" + part + "'");
        }
        ++i;
    }
    if (i != 3) throw ConfigError(std::string(what) + ": expected a:b:count");
    if (out[2] < 1 || out[2] != std::floor(out[2])) throw ConfigError(std::string(what) + ": count must be a positive integer");
    return out;
}

std::vector<double> lambdas(const Config& c)
{
    if (c.lambda_scan.empty()) return {c.lambda};
    const auto [a, b, steps] = triple(c.lambda_scan, "lambda_scan");
    if (!(a > 0 && b > 0)) throw ConfigError("lambda_scan: bounds must be positive");
    const int m = static_cast<int>(steps);
    std::vector<double> out;
    for (int i = 0; i < m; ++i) out.push_back(m == 1 ? a : a * std::pow(b / a, double(i) / (m - 1)));
    return out;
}

std::vector<double> edges(const Config& c)
{
    const auto [a, b, bins] = triple(c.r_edges, "r_edges");
    if (!(a >= 0 && b > a)) throw ConfigError("r_edges: need 0 <= a < b");
    std::vector<double> out;
    for (int i = 0; i <= static_cast<int>(bins); ++i) out.push_back(a + (b - a) * i / bins);
    return out;
}

Space make_space(const Config& c)
{
    if (c.n < 2) throw ConfigError("n must be >= 2");
    if (c.model == "euclidean") return Space::euclidean(c.n);
    if (c.model == "sphere" || c.model == "hyperbolic") {
        if (!(c.k > 0)) throw ConfigError("k must be positive on curved models");
        return c.model == "sphere" ? Space::sphere(c.n, c.k) : Space::hyperbolic(c.n, c.k);
    }
    if (c.model == "torus") {
        if (c.n != 2) throw ConfigError("the torus is two-dimensional");
        if (!(c.period > 0)) throw ConfigError("period must be positive");
        return Space::torus(c.period);
    }
    throw ConfigError("unknown model '" + c.model + "'");
}

void validate(const Config& c)
{
    make_space(c);
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
    if (c.sampling != "sweep" && c.sampling != "window") throw ConfigError("sampling must be sweep or window");
    if (!(c.lambda > 0)) throw ConfigError("lambda must be positive");
    lambdas(c);
    if (c.replicates < 1) throw ConfigError("replicates must be >= 1");
    if (c.point_budget < 2) throw ConfigError("point_budget must be >= 2");
    if (c.s && (*c.s < 1 || *c.s > c.n)) throw ConfigError("s must lie in [1, n]");
    if (c.command == "estimate") {
        static const std::set<std::string> kinds{"vol", "N", "density", "section", "curvature"};
        if (!kinds.count(c.kind)) throw ConfigError("estimate needs one of vol, N, density, section, curvature");
        if (c.kind == "section" && !c.s) throw ConfigError("estimate section needs --s");
        if (c.kind == "density") edges(c);
    }
    if (c.r && !(*c.r > 0)) throw ConfigError("r must be positive");
}

// ---- output

class Out {
public:
    explicit Out(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ConfigError("cannot write " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string dec(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void provenance(std::ostream& os, const Config& c)
{
    os << "# voronoi_lab " << VLAB_VERSION << "\n";
    os << "# config " << to_json(c).dump() << "\n";
    os << "# seed " << c.seed << "\n";
}

// decimal columns first, then one hex sidecar per decimal column
struct CsvTable {
    std::vector<std::string> labels;       // non-numeric leading columns
    std::vector<std::string> numeric;
    std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows;

    void write(std::ostream& os) const
    {
        std::vector<std::string> head = labels;
        for (const auto& h : numeric) head.push_back(h);
        for (const auto& h : numeric) head.push_back(h + "_hex");
        for (std::size_t i = 0; i < head.size(); ++i) os << (i ? "," : "") << head[i];
        os << "\n";
        for (const auto& [lab, num] : rows) {
            std::vector<std::string> cells = lab;
            for (double x : num) cells.push_back(dec(x));
            for (double x : num) cells.push_back(hex_double(x));
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
            os << "\n";
        }
    }
};

json meta(const Config& c)
{
    return {{"version", VLAB_VERSION}, {"config", to_json(c)}, {"seed", c.seed}};
}

RunOptions run_options(const Config& c, int threads)
{
    RunOptions o;
    o.threads = threads;
    o.sampling = c.sampling == "window" ? Sampling::FixedWindow : Sampling::RadialSweep;
    return o;
}

double or_nan(const std::function<double()>& f)
{
    try {
        return f();
    } catch (const GeometryError&) {
        return NAN;
    }
}

// ---- commands

int cmd_constants(const Config& c, std::ostream& os)
{
    const ExpansionConstants& ec = expansion_constants(c.n, c.s);
    if (c.format == "json") {
        json j = meta(c);
        j["n"] = c.n;
        if (c.s) j["s"] = *c.s;
        json vals = json::object(), hex = json::object();
        for (const auto& [name, v] : ec.values) {
            vals[name] = v;
            hex[name] = hex_double(v);
        }
        j["values"] = vals;
        j["values_hex"] = hex;
        os << j.dump(2) << "\n";
        return 0;
    }
    provenance(os, c);
    CsvTable t{{"name"}, {"value"}, {}};
    for (const auto& [name, v] : ec.values) t.rows.push_back({{name}, {v}});
    t.write(os);
    return 0;
}

int cmd_closed_form(const Config& c, std::ostream& os)
{
    const Space sp = make_space(c);
    CsvTable t{{}, {"lambda", "mean_volume", "mean_N", "mean_N_asymptotic"}, {}};
    if (c.s) {
        t.numeric.push_back("section_volume");
        t.numeric.push_back("section_N");
    }
    json rows = json::array();
    for (double lam : lambdas(c)) {
        std::vector<double> v{lam, or_nan([&] { return mean_volume_exact(sp, lam); }),
                              or_nan([&] { return mean_N_quadrature(sp, lam); }),
                              asymptotic_mean_N(sp.n, sp.scal(), lam)};
        if (c.s) {
            v.push_back(or_nan([&] { return section_mean_volume_exact(sp, *c.s, lam); }));
            v.push_back(or_nan([&] { return section_mean_N_exact(sp, *c.s, lam); }));
        }
        json row;
        for (std::size_t i = 0; i < v.size(); ++i) row[t.numeric[i]] = hex_double(v[i]);
        rows.push_back(row);
        t.rows.push_back({{}, v});
    }
    if (c.format == "json") {
        json j = meta(c);
        j["rows_hex"] = rows;
        os << j.dump(2) << "\n";
        return 0;
    }
    provenance(os, c);
    t.write(os);
    return 0;
}

int cmd_simulate_cell(const Config& c, std::ostream& os, int threads)
{
    const Space sp = make_space(c);
    RngStream rng(c.seed, 0);
    TypicalCell tc = sample_typical_cell(sp, c.lambda, rng, run_options(c, threads));
    for (auto& v : tc.cell.vertices) normalize_vertex(sp, tc.x0, c.lambda, v);
    if (c.format == "json") {
        json j = meta(c);
        j["x0"] = json::array();
        for (int i = 0; i < tc.x0.size(); ++i) j["x0"].push_back(hex_double(tc.x0(i)));
        j["nuclei"] = tc.nuclei.size();
        j["certified"] = tc.cell.certified;
        j["vertices"] = json::array();
        for (const auto& v : tc.cell.vertices) {
            json p = json::array(), u = json::array();
            for (int i = 0; i < v.point.size(); ++i) p.push_back(hex_double(v.point(i)));
            for (int i = 0; i < v.u.size(); ++i) u.push_back(hex_double(v.u(i)));
            j["vertices"].push_back({{"point", p},
                                     {"r", v.r},
                                     {"r_hex", hex_double(v.r)},
                                     {"r_norm", v.r_norm},
                                     {"u", u},
                                     {"generators", v.generators}});
        }
        os << j.dump(2) << "\n";
        return 0;
    }
    provenance(os, c);
    os << "# nuclei " << tc.nuclei.size() << " certified " << (tc.cell.certified ? 1 : 0) << "\n";
    CsvTable t{{"vertex"}, {"r", "r_norm"}, {}};
    for (int i = 0; i < sp.ambient_dim(); ++i) t.numeric.push_back("x" + std::to_string(i));
    for (int i = 0; i < sp.n; ++i) t.numeric.push_back("u" + std::to_string(i));
    for (std::size_t i = 0; i < tc.cell.vertices.size(); ++i) {
        const auto& v = tc.cell.vertices[i];
        std::vector<double> row{v.r, v.r_norm};
        for (int a = 0; a < v.point.size(); ++a) row.push_back(v.point(a));
        for (int a = 0; a < sp.n; ++a) row.push_back(a < v.u.size() ? v.u(a) : NAN);
        t.rows.push_back({{std::to_string(i)}, row});
    }
    t.write(os);
    return 0;
}

void estimate_row(CsvTable& t, const std::string& what, double lam, const Estimate& e, double target)
{
    t.rows.push_back({{what}, {lam, e.mean, e.std_error, double(e.replicates), e.certified_fraction, target}});
}

int cmd_estimate(const Config& c, std::ostream& os, int threads)
{
    const Space sp = make_space(c);
    const RunOptions opt = run_options(c, threads);
    provenance(os, c);
    if (c.kind == "density") {
        const std::vector<double> r_edges = edges(c);
        const DensityHistogram h = estimate_vertex_density(sp, c.lambda, c.replicates, r_edges, c.seed, opt);
        os << "# mean_N " << dec(h.mean_N.mean) << " se " << dec(h.mean_N.std_error) << " overflow "
           << dec(h.overflow) << "\n";
        CsvTable t{{}, {"r_lo", "r_hi", "mass", "se", "exact"}, {}};
        boost::math::quadrature::gauss_kronrod<double, 31> gk;
        const double dirs = sigma(sp.n - 1);
        for (std::size_t b = 0; b + 1 < r_edges.size(); ++b) {
            const double lo = r_edges[b], hi = r_edges[b + 1];
            const double exact = or_nan([&] {
                return dirs * gk.integrate([&](double r) { return vertex_density_physical(sp, c.lambda, r); }, lo, hi);
            });
            t.rows.push_back({{}, {lo, hi, h.mass[b], h.se[b], exact}});
        }
        t.write(os);
        return 0;
    }
    CsvTable t{{"quantity"}, {"lambda", "mean", "se", "replicates", "certified_fraction", "target"}, {}};
    for (double lam : lambdas(c)) {
        if (c.kind == "vol") {
            estimate_row(t, "mean_volume", lam, estimate_mean_volume(sp, lam, c.replicates, c.point_budget, c.seed, opt),
                         or_nan([&] { return mean_volume_exact(sp, lam); }));
        } else if (c.kind == "N") {
            estimate_row(t, "mean_N", lam, estimate_mean_N(sp, lam, c.replicates, c.seed, opt),
                         or_nan([&] { return mean_N_quadrature(sp, lam); }));
        } else if (c.kind == "curvature") {
            estimate_row(t, "scalar_curvature", lam, estimate_scalar_curvature(sp, lam, c.replicates, c.seed, opt),
                         sp.model == Model::FlatTorus2 ? 0.0 : sp.scal());
        } else {
            const SectionStats st = estimate_section_stats(sp, *c.s, lam, c.replicates, c.seed, c.point_budget, opt);
            estimate_row(t, "section_volume", lam, st.volume,
                         or_nan([&] { return section_mean_volume_exact(sp, *c.s, lam); }));
            estimate_row(t, "section_N", lam, st.N, or_nan([&] { return section_mean_N_exact(sp, *c.s, lam); }));
        }
    }
    t.write(os);
    return 0;
}

int cmd_gauss_bonnet(const Config& c, std::ostream& os, int threads)
{
    const Space sp = make_space(c);
    const GaussBonnetReport g = gauss_bonnet_experiment(sp, c.lambda, c.replicates, c.seed, run_options(c, threads));
    provenance(os, c);
    os << "# euler_constant " << (g.euler_constant ? 1 : 0) << " value " << g.euler_value << " two_e_equals_three_v "
       << (g.two_e_equals_three_v ? 1 : 0) << " resampled " << g.resampled << "\n";
    os << "# f_minus_half_v " << dec(g.f_minus_half_v.mean) << " se " << dec(g.f_minus_half_v.std_error)
       << " curvature_reading " << dec(g.curvature_reading) << "\n";
    os << "replicate,F,E,V,euler\n";
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
        const auto& r = g.rows[i];
        os << i << "," << r.F << "," << r.E << "," << r.V << "," << r.euler << "\n";
    }
    return 0;
}

int cmd_bp_check(const Config& c, std::ostream& os)
{
    const Space sp = make_space(c);
    if (sp.model == Model::FlatTorus2) throw ConfigError("bp-check: use the euclidean model instead of the torus");
    provenance(os, c);
    CsvTable t{{"configuration"}, {"r", "delta", "exact", "fd", "rel_error", "condition", "step"}, {}};
    for (long long i = 0; i < c.replicates; ++i) {
        RngStream rng(c.seed, static_cast<std::uint64_t>(i));
        const double rad = c.r ? *c.r : (0.2 + 0.6 * rng.uniform()) / (sp.curved() ? sp.k : 1.0);
        const BPConfiguration conf = random_bp_configuration(sp, rad, rng);
        const double delta = simplex_volume(conf.u, conf.us);
        const double exact = bp_jacobian_exact(sp, rad, delta);
        const FdJacobian fd = bp_jacobian_fd_auto(conf);
        t.rows.push_back({{std::to_string(i)},
                          {rad, delta, exact, fd.value, std::abs(fd.value - exact) / exact, fd.condition, fd.step}});
    }
    t.write(os);
    return 0;
}

int cmd_verify_all(const Config& c, std::ostream& os, int threads)
{
    AcceptanceOptions opt;
    opt.threads = threads;
    std::istringstream is(c.only);
    for (std::string part; std::getline(is, part, ',');) {
        if (part.empty()) continue;
        try {
            opt.only.insert(std::stoi(part));
        } catch (const std::logic_error&) {
            throw ConfigError("only: bad criterion id '" + part + "'");
        }
    }
    os << "# voronoi_lab " << VLAB_VERSION << "\n";
    bool ok = true;
    run_acceptance(opt, [&](const CriterionResult& r) {
        os << format_result(r) << "\n" << std::flush;
        ok = ok && r.pass;
    });
    return ok ? 0 : 1;
}

// ---- argument wiring

struct Bound {
    CLI::Option* opt;
    std::function<void(Config&)> apply;
};

template <typename T>
void bind_option(CLI::App* sub, std::vector<Bound>& b, const std::string& flag, const std::string& doc,
          std::shared_ptr<T> store, std::function<void(Config&, const T&)> set)
{
    CLI::Option* o = sub->add_option(flag, *store, doc);
    b.push_back({o, [store, set](Config& c) { set(c, *store); }});
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Poisson-Voronoi experiments on constant-curvature spaces"};
    app.set_version_flag("--version", VLAB_VERSION);
    app.require_subcommand(0, 1);
    bool print_schema = false;
    app.add_flag("--schema", print_schema, "print the JSON schema of the config format and exit");

    struct Sub {
        CLI::App* app;
        std::vector<Bound> bound;
        std::string config_path;
        int threads = 0;
        std::string kind;
        std::set<std::string> keys;
    };
    std::map<std::string, Sub> subs;
    auto add = [&](const std::string& name, const std::string& doc, std::initializer_list<std::string> keys) {
        Sub& s = subs[name];
        s.app = app.add_subcommand(name, doc);
        s.app->add_option("--config", s.config_path, "JSON config file; flags given on the command line win");
        s.app->add_option("--threads", s.threads, "worker threads (default: VORONOI_LAB_THREADS, else all cores)");
        s.keys = keys;
        auto& b = s.bound;
        auto has = [&](const char* k) { return s.keys.count(k) > 0; };
        if (has("model"))
            bind_option<std::string>(s.app, b, "--model", "euclidean, sphere, hyperbolic, torus", std::make_shared<std::string>(),
                              [](Config& c, const std::string& v) { c.model = v; });
        if (has("n"))
            bind_option<int>(s.app, b, "--n", "dimension", std::make_shared<int>(), [](Config& c, const int& v) { c.n = v; });
        if (has("k"))
            bind_option<double>(s.app, b, "--k", "curvature scale", std::make_shared<double>(),
                         [](Config& c, const double& v) { c.k = v; });
        if (has("period"))
            bind_option<double>(s.app, b, "--period", "torus period", std::make_shared<double>(),
                         [](Config& c, const double& v) { c.period = v; });
        if (has("s"))
            bind_option<int>(s.app, b, "--s", "section dimension", std::make_shared<int>(), [](Config& c, const int& v) { c.s = v; });
        if (has("lambda"))
            bind_option<double>(s.app, b, "--lambda", "intensity", std::make_shared<double>(),
                         [](Config& c, const double& v) { c.lambda = v; });
        if (has("lambda_scan"))
            bind_option<std::string>(s.app, b, "--scan", "geometric intensity scan a:b:steps", std::make_shared<std::string>(),
                              [](Config& c, const std::string& v) { c.lambda_scan = v; });
        if (has("replicates"))
            bind_option<long long>(s.app, b, "--replicates", "replicate count", std::make_shared<long long>(),
                            [](Config& c, const long long& v) { c.replicates = v; });
        if (has("point_budget"))
            bind_option<long long>(s.app, b, "--point-budget", "Monte Carlo points per cell volume",
                            std::make_shared<long long>(), [](Config& c, const long long& v) { c.point_budget = v; });
        if (has("seed"))
            bind_option<std::uint64_t>(s.app, b, "--seed", "master seed", std::make_shared<std::uint64_t>(),
                                [](Config& c, const std::uint64_t& v) { c.seed = v; });
        if (has("sampling"))
            bind_option<std::string>(s.app, b, "--sampling", "sweep or window", std::make_shared<std::string>(),
                              [](Config& c, const std::string& v) { c.sampling = v; });
        if (has("r_edges"))
            bind_option<std::string>(s.app, b, "--r-edges", "normalized radius grid a:b:bins (density)",
                              std::make_shared<std::string>(), [](Config& c, const std::string& v) { c.r_edges = v; });
        if (has("r"))
            bind_option<double>(s.app, b, "--r", "fixed circumradius", std::make_shared<double>(),
                         [](Config& c, const double& v) { c.r = v; });
        if (has("only"))
            bind_option<std::string>(s.app, b, "--only", "comma-separated criterion ids", std::make_shared<std::string>(),
                              [](Config& c, const std::string& v) { c.only = v; });
        bind_option<std::string>(s.app, b, "--out,-o", "output path (default stdout)", std::make_shared<std::string>(),
                          [](Config& c, const std::string& v) { c.output = v; });
        bind_option<std::string>(s.app, b, "--format", "csv or json", std::make_shared<std::string>(),
                          [](Config& c, const std::string& v) { c.format = v; });
        return s.app;
    };

    add("constants", "expansion constants for dimension n (and section dimension s)", {"n", "s"});
    add("closed-form", "exact and asymptotic cell statistics over an intensity scan",
        {"model", "n", "k", "period", "s", "lambda", "lambda_scan"});
    add("simulate-cell", "vertices of one typical cell", {"model", "n", "k", "period", "lambda", "seed", "sampling"});
    CLI::App* est = add("estimate", "Monte Carlo estimates",
                        {"model", "n", "k", "period", "s", "lambda", "lambda_scan", "replicates", "point_budget", "seed",
                         "sampling", "r_edges"});
    est->add_option("kind", subs["estimate"].kind, "vol, N, density, section, curvature")
        ->check(CLI::IsMember({"vol", "N", "density", "section", "curvature"}));
    add("gauss-bonnet", "per-realization Euler characteristic on the 2-sphere or the torus",
        {"model", "k", "period", "lambda", "replicates", "seed"});
    add("bp-check", "finite-difference check of the circumscribed-ball Jacobian",
        {"model", "n", "k", "replicates", "seed", "r"});
    add("verify-all", "run the acceptance suite", {"only"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (print_schema) {
        std::cout << schema().dump(2) << "\n";
        return 0;
    }
    auto chosen = app.get_subcommands();
    if (chosen.empty()) {
        std::cout << app.help();
        return 2;
    }
    const std::string name = chosen.front()->get_name();
    Sub& sub = subs[name];

    Config cfg;
    cfg.command = name;
    cfg.kind = sub.kind;
    cfg.keys = sub.keys;
    if (name == "gauss-bonnet") cfg.lambda = 5;
    if (name == "bp-check") cfg.replicates = 50;
    try {
        if (!sub.config_path.empty()) apply_file(sub.config_path, cfg);
        for (const auto& b : sub.bound)
            if (b.opt->count()) b.apply(cfg);
        if (!sub.kind.empty()) cfg.kind = sub.kind;
        if (cfg.model == "euclidean" || cfg.model == "torus") cfg.k = 0;
        if (cfg.format.empty()) cfg.format = (name == "constants" || name == "simulate-cell") ? "json" : "csv";
        validate(cfg);
        if (cfg.format == "json" && name != "constants" && name != "closed-form" && name != "simulate-cell")
            throw ConfigError(name + " writes csv only");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        Out out(cfg.output);
        std::ostream& os = out.os();
        const int threads = sub.threads;
        if (name == "constants") return cmd_constants(cfg, os);
        if (name == "closed-form") return cmd_closed_form(cfg, os);
        if (name == "simulate-cell") return cmd_simulate_cell(cfg, os, threads);
        if (name == "estimate") return cmd_estimate(cfg, os, threads);
        if (name == "gauss-bonnet") return cmd_gauss_bonnet(cfg, os, threads);
        if (name == "bp-check") return cmd_bp_check(cfg, os);
        if (name == "verify-all") return cmd_verify_all(cfg, os, threads);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
