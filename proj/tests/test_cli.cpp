#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "landis/toml.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LANDIS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("landis_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("toml subset parser") {
    std::istringstream in(
        "seed = 7\n"
        "x = 1.5       # trailing comment\n"
        "name = \"abc # not a comment\"\n"
        "flag = true\n"
        "grid = [1, 2.5, 3]\n"
        "[section]\n"
        "key = \"v\"\n"
        "nums = [0.5]\n");
    const auto t = landis::toml::parse(in);
    CHECK(t.integer("seed", 0) == 7);
    CHECK(t.number("x", 0.0) == 1.5);
    CHECK(t.text("name", "") == "abc # not a comment");
    CHECK(t.boolean("flag", false));
    CHECK(t.numbers("grid", {}) == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(t.text("section.key", "") == "v");
    CHECK(t.numbers("section.nums", {}) == std::vector<double>{0.5});
    // defaults pass through
    CHECK(t.number("missing", 9.0) == 9.0);
    // type errors surface
    CHECK_THROWS(t.number("name", 0.0));
    // malformed input rejected
    std::istringstream bad("x 1\n");
    CHECK_THROWS(landis::toml::parse(bad));
    std::istringstream bad2("[sec\nx = 1\n");
    CHECK_THROWS(landis::toml::parse(bad2));
    // overrides: bare words act as strings, numbers stay numbers
    landis::toml::Table o;
    landis::toml::apply_override(o, "mode=synthetic");
    landis::toml::apply_override(o, "count=5");
    CHECK(o.text("mode", "") == "synthetic");
    CHECK(o.integer("count", 0) == 5);
    CHECK_THROWS(landis::toml::apply_override(o, "nonsense"));
}

TEST_CASE("cli: gaussian-limit runs green and is deterministic") {
    TempDir a("cli_a"), b("cli_b");
    REQUIRE(run_cli("gaussian-limit --seed 99 --out " + a.path.string()) == 0);
    REQUIRE(run_cli("gaussian-limit --seed 99 --out " + b.path.string()) == 0);
    CHECK(slurp(a.path / "gaussian_limit_data.csv") ==
          slurp(b.path / "gaussian_limit_data.csv"));
    CHECK(slurp(a.path / "gaussian_limit_summary.json") ==
          slurp(b.path / "gaussian_limit_summary.json"));
    CHECK(slurp(a.path / "gaussian_limit_summary.json").find("\"overall_pass\": true") !=
          std::string::npos);
}

TEST_CASE("cli: config validation failures exit with code 2") {
    TempDir d("cli_val");
    // empty grid
    CHECK(run_cli("gaussian-limit --out " + d.path.string() + " h_list=[]") == 2);
    // non-integer 1/h
    CHECK(run_cli("gaussian-limit --out " + d.path.string() + " h_list=[0.3]") == 2);
    // unknown enum value
    CHECK(run_cli("uc-check --out " + d.path.string() + " testbed=nonsense") == 2);
    // annulus outside the box
    CHECK(run_cli("heat-run --out " + d.path.string() + " extent=20") == 2);
    // missing config file
    CHECK(run_cli("uc-check --config /nonexistent.toml --out " + d.path.string()) == 2);
    // no partial outputs were left behind by the failed runs
    CHECK_FALSE(fs::exists(d.path / "gaussian_limit_data.csv"));
    CHECK_FALSE(fs::exists(d.path / "uc_check_data.csv"));
}

TEST_CASE("cli: uc-check on the synthetic sequence reports the threshold crossing") {
    TempDir d("cli_uc");
    const std::string cfg = std::string(LANDIS_CONFIG_DIR) + "/uc_check_synthetic.toml";
    REQUIRE(run_cli("uc-check --config " + cfg + " --out " + d.path.string()) == 0);
    const std::string sum = slurp(d.path / "uc_check_summary.json");
    CHECK(sum.find("\"flagged\": true") != std::string::npos);
    CHECK(sum.find("forces u == 0") != std::string::npos);
    const std::string csv = slurp(d.path / "uc_check_data.csv");
    CHECK(csv.find("N,log_M,q,factor,margin,log_threshold,flagged") == 0);
}

TEST_CASE("cli: bessel-audit with the shipped config") {
    TempDir d("cli_bessel");
    const std::string cfg = std::string(LANDIS_CONFIG_DIR) + "/bessel_audit.toml";
    REQUIRE(run_cli("bessel-audit --config " + cfg + " --out " + d.path.string()) == 0);
    const std::string sum = slurp(d.path / "bessel_audit_summary.json");
    CHECK(sum.find("\"overall_pass\": true") != std::string::npos);
    CHECK(sum.find("\"schema_version\": 1") != std::string::npos);
}
