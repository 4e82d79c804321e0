#include "fdia_lab/scenario.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace fdia_lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("fdia_lab_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult cli(const std::string& args)
{
    const std::string cmd = std::string(FDIA_LAB_CLI) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int st = ::pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<double> flat(const nlohmann::json& j)
{
    std::vector<double> v;
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

}  // namespace

TEST_CASE("built-in scenarios")
{
    CHECK(builtin_scenario_names() == std::vector<std::string>{"nominal", "scenario1", "scenario2", "scenario3"});
    CHECK_FALSE(builtin_scenario("nominal").attack_kind);
    CHECK(builtin_scenario("scenario1").attack_kind->tag == AttackTag::Reflection);
    CHECK(builtin_scenario("scenario2").attack_kind->beta11 == 0.5);
    CHECK(builtin_scenario("scenario3").sim.p0.theta == std::numbers::pi / 6);
    CHECK_THROWS_AS(builtin_scenario("scenario9"), std::invalid_argument);
    CHECK_THROWS_AS(load_scenario("scenario9"), std::invalid_argument);
}

TEST_CASE("every built-in scenario self-validates")
{
    for (const auto& n : builtin_scenario_names()) {
        const auto rep = self_validate(builtin_scenario(n));
        CHECK(rep.condition1 <= kCondition1Tol);
        CHECK(rep.condition2 <= kCondition2Tol);
    }
}

TEST_CASE("unbuildable attack kinds are refused at load")
{
    auto s = builtin_scenario("scenario1");
    s.attack_kind->tag = AttackTag::Custom;
    CHECK_THROWS_AS(self_validate(s), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_scenario(s), std::invalid_argument);
}

TEST_CASE("scenario2 artifacts")
{
    const auto dir = scratch("s2");
    const auto r = run_scenario(builtin_scenario("scenario2"), dir);
    for (const char* suffix : {"_trace.csv", "_attack.json", "_undetectability.json", "_monitor.csv", "_summary.json"}) {
        CHECK(fs::exists(dir / (std::string("scenario2") + suffix)));
    }
    const auto a = nlohmann::json::parse(slurp(dir / "scenario2_attack.json"));
    CHECK(flat(a["s_x"]) == std::vector<double>{2, 0, 0, 0, 2, 0, 0, 0, 1});
    const auto dx = flat(a["d_x"]);
    CHECK(dx[0] == 0.0);
    CHECK(dx[1] == doctest::Approx(-0.02).epsilon(1e-15));
    CHECK(dx[2] == 0.0);
    CHECK(flat(a["s_u"]) == std::vector<double>{0.5, 0, 0, 1});

    const auto sum = nlohmann::json::parse(slurp(dir / "scenario2_summary.json"));
    CHECK(sum["schema"] == 1);
    CHECK(sum["scenario"] == "scenario2");
    CHECK(sum["sup_obs_dev"].get<double>() <= 1e-9);
    CHECK(sum["monitor_flag"] == true);
    CHECK(sum["final_V"].get<double>() == r.final_V);
    fs::remove_all(dir);
}

TEST_CASE("scenario3 attack file carries the tilted offset")
{
    const auto dir = scratch("s3");
    run_scenario(builtin_scenario("scenario3"), dir);
    const auto a = nlohmann::json::parse(slurp(dir / "scenario3_attack.json"));
    const auto dx = flat(a["d_x"]);
    CHECK(dx[0] == doctest::Approx(-0.01 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK(dx[1] == doctest::Approx(0.03).epsilon(1e-14));
    CHECK(dx[2] == doctest::Approx(std::numbers::pi / 3).epsilon(1e-14));
    fs::remove_all(dir);
}

TEST_CASE("nominal run is trivially undetectable and silent")
{
    const auto r = evaluate_scenario(builtin_scenario("nominal"));
    CHECK(r.undetectability.sup_obs_dev == 0.0);
    CHECK(r.undetectability.sup_actual_dev == 0.0);
    CHECK_FALSE(r.monitor.flag);
    CHECK(r.monitor.peak == 0.0);
}

TEST_CASE("artifacts are byte-identical across runs")
{
    for (const auto& n : builtin_scenario_names()) {
        const auto d1 = scratch(n + "_a");
        const auto d2 = scratch(n + "_b");
        const auto f1 = write_artifacts(evaluate_scenario(builtin_scenario(n)), d1);
        const auto f2 = write_artifacts(evaluate_scenario(builtin_scenario(n)), d2);
        REQUIRE(f1.size() == f2.size());
        for (std::size_t i = 0; i < f1.size(); ++i) CHECK(slurp(f1[i]) == slurp(f2[i]));
        fs::remove_all(d1);
        fs::remove_all(d2);
    }
}

TEST_CASE("scenario json")
{
    const auto s = builtin_scenario("scenario3");
    const auto back = scenario_from_json(to_json(s));
    CHECK(back.name == s.name);
    CHECK(back.seed == s.seed);
    CHECK(back.sim.p0 == s.sim.p0);
    CHECK(back.attack_kind->tag == AttackTag::Reflection);
    CHECK(config_digest(back.sim) == config_digest(s.sim));

    nlohmann::json no_seed = to_json(s);
    no_seed.erase("seed");
    CHECK_THROWS_WITH_AS(scenario_from_json(no_seed), doctest::Contains("seed"), std::invalid_argument);

    nlohmann::json bad = to_json(s);
    bad["sim"]["dt"] = -1.0;
    CHECK_THROWS_WITH_AS(scenario_from_json(bad), doctest::Contains("dt"), std::invalid_argument);

    bad = to_json(s);
    bad["attack"]["beta11"] = 0.0;
    CHECK_THROWS_WITH_AS(scenario_from_json(bad), doctest::Contains("beta11"), std::invalid_argument);

    bad = to_json(s);
    bad["detection"]["window"] = 0;
    CHECK_THROWS_WITH_AS(scenario_from_json(bad), doctest::Contains("window"), std::invalid_argument);

    bad = to_json(s);
    bad["colour"] = "red";
    CHECK_THROWS_WITH_AS(scenario_from_json(bad), doctest::Contains("colour"), std::invalid_argument);
}

TEST_CASE("scenario files load from disk")
{
    const auto dir = scratch("file");
    fs::create_directories(dir);
    const auto path = dir / "s.json";
    {
        std::ofstream os(path);
        os << R"({"name":"half","seed":7,"attack":{"kind":"scaling","beta11":2.0},"sim":{"duration":5}})";
    }
    const auto s = load_scenario(path.string());
    CHECK(s.name == "half");
    CHECK(s.sim.duration == 5.0);
    CHECK(s.attack_kind->beta11 == 2.0);
    const auto r = evaluate_scenario(s);
    CHECK(r.undetectability.sup_obs_dev <= 1e-9);
    fs::remove_all(dir);
}

TEST_CASE("output directory resolution")
{
    ::unsetenv("FDIA_LAB_OUT_DIR");
    CHECK(resolve_out_dir(std::nullopt) == fs::path("out"));
    ::setenv("FDIA_LAB_OUT_DIR", "/tmp/elsewhere", 1);
    CHECK(resolve_out_dir(std::nullopt) == fs::path("/tmp/elsewhere"));
    CHECK(resolve_out_dir(std::string("mine")) == fs::path("mine"));
    ::unsetenv("FDIA_LAB_OUT_DIR");
}

TEST_CASE("cli verify")
{
    const auto r = cli("verify --scenario scenario1");
    CHECK(r.status == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("sup_obs_dev") != std::string::npos);
}

TEST_CASE("cli vulncheck prints five verdicts")
{
    const auto r = cli("vulncheck");
    CHECK(r.status == 0);
    std::istringstream is(r.out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    REQUIRE(lines.size() == 6);
    CHECK(lines[1].rfind("linear,continuous,αβ = 1", 0) == 0);
    CHECK(lines[2].rfind("cosine,discrete", 0) == 0);
    CHECK(lines[3].rfind("sine,discrete", 0) == 0);
    CHECK(lines[4].rfind("quadratic,continuous,αβ² = 1", 0) == 0);
    CHECK(lines[5].rfind("exponential,trivial-only", 0) == 0);
}

TEST_CASE("cli estimate spiral")
{
    const auto r = cli("estimate --source spiral --n 1000");
    CHECK(r.status == 0);
    const auto row = r.out.substr(r.out.find('\n') + 1);
    CHECK(row.rfind("spiral,1000,", 0) == 0);
    const double v = std::stod(row.substr(std::string("spiral,1000,").size()));
    CHECK(v < 0.1);
}

TEST_CASE("cli simulate honours the environment override")
{
    const auto dir = scratch("cli");
    const auto r = cli("simulate --scenario nominal");  // default dir would be ./out
    CHECK(r.status == 0);
    const auto env = cli("simulate --scenario nominal --out " + dir.string());
    CHECK(env.status == 0);
    CHECK(fs::exists(dir / "nominal_summary.json"));
    fs::remove_all(dir);
    fs::remove_all("out");

    const std::string cmd = "FDIA_LAB_OUT_DIR=" + dir.string() + " " + std::string(FDIA_LAB_CLI) +
                            " simulate --scenario scenario1 >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "scenario1_trace.csv"));
    fs::remove_all(dir);
}

TEST_CASE("cli usage errors")
{
    CHECK(cli("").status != 0);
    CHECK(cli("frobnicate").status != 0);
    CHECK(cli("verify --scenario nope").status != 0);
    CHECK(cli("estimate --source helix").status != 0);
}
