#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args)
{
    Run r;
    const std::string cmd = std::string(VORONOI_LAB_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> data_lines(const std::string& csv)
{
    std::vector<std::string> rows;
    std::istringstream is(csv);
    for (std::string line; std::getline(is, line);)
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    return rows;
}

std::string temp_path(const std::string& name)
{
    return std::string(CLI_TEST_DIR) + "/" + name;
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("constants as JSON")
    {
        const Run r = run("constants --n 2");
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["values"]["e_n"].get<double>() == 6.0);
        CHECK(j["config"]["n"] == 2);
        CHECK(j.contains("version"));
    }

    TEST_CASE("estimate output is reproducible")
    {
        const std::string args = "estimate N --model hyperbolic --n 2 --k 1 --lambda 10 --replicates 5000 --seed 7";
        const Run a = run(args), b = run(args + " --threads 3");
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(a.out.find("# seed 7") != std::string::npos);
        CHECK(a.out.find("# config ") != std::string::npos);
    }

    TEST_CASE("embedded config reproduces the run")
    {
        const Run a = run("estimate vol --model sphere --lambda 20 --replicates 100 --seed 4");
        REQUIRE(a.code == 0);
        const auto start = a.out.find("# config ") + 9;
        const std::string cfg = a.out.substr(start, a.out.find('\n', start) - start);
        const std::string path = temp_path("roundtrip.json");
        std::ofstream(path) << cfg;
        const Run b = run("estimate vol --config " + path);
        CHECK(b.code == 0);
        CHECK(a.out == b.out);
    }

    TEST_CASE("Gauss-Bonnet rows")
    {
        const Run r = run("gauss-bonnet --model sphere --k 1 --lambda 5 --replicates 100");
        REQUIRE(r.code == 0);
        const auto rows = data_lines(r.out);
        REQUIRE(rows.size() == 101);
        CHECK(rows[0] == "replicate,F,E,V,euler");
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].substr(rows[i].rfind(',') + 1) == "2");
    }

    TEST_CASE("hex sidecars decode to the decimal columns")
    {
        const Run r = run("closed-form --model hyperbolic --n 2 --scan 1:100:3");
        REQUIRE(r.code == 0);
        const auto rows = data_lines(r.out);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].rfind("lambda,mean_volume,mean_N,mean_N_asymptotic,lambda_hex", 0) == 0);
        std::istringstream is(rows[3]);
        std::vector<std::string> cells;
        for (std::string c; std::getline(is, c, ',');) cells.push_back(c);
        CHECK(std::stod(cells[0]) == 100);
        CHECK(std::strtod(cells[6].c_str(), nullptr) == doctest::Approx(6 + 3 / (100 * M_PI)).epsilon(1e-14));
    }

    TEST_CASE("config errors exit with 2")
    {
        const std::string bad = temp_path("bad.json");
        std::ofstream(bad) << R"({"model": "sphere", "colour": 3})";
        CHECK(run("estimate N --config " + bad).code == 2);
        const std::string wrong_type = temp_path("wrong_type.json");
        std::ofstream(wrong_type) << R"({"lambda": "many"})";
        CHECK(run("estimate N --config " + wrong_type).code == 2);
        const std::string foreign = temp_path("foreign.json");
        std::ofstream(foreign) << R"({"replicates": 10})";
        CHECK(run("constants --config " + foreign).code == 2);
        CHECK(run("estimate N --n 1").code == 2);
        CHECK(run("estimate nothing").code == 2);
        CHECK(run("closed-form --model torus").code == 0);
        CHECK(run("closed-form --scan 1:2").code == 2);
        CHECK(run("frobnicate").code == 2);
    }

    TEST_CASE("help and schema")
    {
        for (const char* sub : {"constants", "closed-form", "simulate-cell", "estimate", "gauss-bonnet", "bp-check", "verify-all"})
            CHECK(run(std::string(sub) + " --help").code == 0);
        const Run s = run("--schema");
        REQUIRE(s.code == 0);
        const auto j = nlohmann::json::parse(s.out);
        CHECK(j["additionalProperties"] == false);
        CHECK(j["properties"].contains("lambda_scan"));
    }

    TEST_CASE("verify-all reports per criterion")
    {
        const Run r = run("verify-all --only 1,3");
        CHECK(r.code == 0);
        CHECK(r.out.find("[PASS]  1") != std::string::npos);
        CHECK(r.out.find("[PASS]  3") != std::string::npos);
    }
}
