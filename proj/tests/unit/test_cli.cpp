#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "config.hpp"
#include "doctest.h"
#include "pipelines.hpp"
#include "report.hpp"

using namespace noembed;
using namespace noembed::cli;
namespace fs = std::filesystem;

namespace {

fs::path write_ini(const std::string& name, const std::string& text)
{
    const fs::path d = fs::temp_directory_path() / "noembed_cli_test";
    fs::create_directories(d);
    const fs::path p = d / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults are valid")
{
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.K_max == 10);
    CHECK(c.quad_tol == 1e-10);
}

TEST_CASE("INI loading")
{
    const RunConfig c = load_config(write_ini("ok.ini", "[quad]\ntol = 1e-12\n[K]\nmax = 6\n[annulus]\neta = 1, 0.5 ,0.25\n[seeds]\nseed = 7\n"));
    CHECK(c.quad_tol == 1e-12);
    CHECK(c.K_max == 6);
    CHECK(c.annulus_eta == std::vector<double>{1.0, 0.5, 0.25});
    CHECK(c.seed == 7);
    CHECK(c.N_count == 80);
}

TEST_CASE("invalid configurations are rejected")
{
    // range checks run after command-line overrides, in validate()
    CHECK_THROWS_AS(load_config(write_ini("tol.ini", "[quad]\ntol = 10\n")).validate(), ConfigError);
    CHECK_THROWS_AS(load_config(write_ini("key.ini", "[quad]\ntolerance = 1e-8\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write_ini("sec.ini", "[nope]\nx = 1\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write_ini("num.ini", "[K]\nmax = ten\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write_ini("none.ini", "") / "missing"), ConfigError);
    for (auto [key, value] : {std::pair{"tail.K", "0"}, {"N.ratio", "1"}, {"truncation.n_max", "40"}, {"quad.tol", "0"}}) {
        CAPTURE(key);
        RunConfig c;
        apply_setting(c, key, value);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    RunConfig c;
    CHECK_NOTHROW(apply_setting(c, "grid.h", "0.001"));
    CHECK(c.grid_h == 0.001);
}

TEST_CASE("log-scaled values in reports")
{
    CHECK(to_json(LogScaledReal::from_double(-2.5)) == Json(-2.5));
    const Json big = to_json(LogScaledReal(-1, 2000.0));
    CHECK(big["sign"] == -1);
    CHECK(big["logmag"] == 2000.0);
    CHECK(to_json(std::numeric_limits<double>::infinity()).is_string());
    CHECK(to_json(std::nan("")).is_string());
}

TEST_CASE("report layout")
{
    Report r("verify", "moon");
    r.set_config(config_json(RunConfig{}));
    Check& c = r.add("x.one", "first");
    c.values = {{"v", 1}};
    c.pass = true;
    c.seconds = 3.0;
    r.add("x.two", "second").pass = false;
    CHECK_FALSE(r.all_pass());
    const Json b = r.body();
    CHECK(b["schema"] == "noembed-report/1");
    CHECK(b["checks"].size() == 2);
    CHECK(b["summary"]["failed"] == 1);
    CHECK(b.dump().find("seconds") == std::string::npos);
    r.add_runtime("stage", 1.5);
    const Json d = r.document(4.0);
    CHECK(d["runtime"]["total_seconds"] == 4.0);
}

TEST_CASE("ruled pipeline is deterministic")
{
    RunConfig cfg;
    cfg.out_dir = (fs::temp_directory_path() / "noembed_cli_test" / "out").string();
    const Json a = run_verify("ruled", cfg).body(), b = run_verify("ruled", cfg).body();
    CHECK(a.dump() == b.dump());
    CHECK_THROWS(run_verify("nonsense", cfg));
}

}
