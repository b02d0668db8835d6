#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "pipelines.hpp"
#include "writers.hpp"

using namespace slgcli;
namespace fs = std::filesystem;

#ifndef SLG_BIN
#define SLG_BIN "slg"
#endif
#ifndef SLG_CONFIG_DIR
#define SLG_CONFIG_DIR "configs"
#endif

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SLG_BIN) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path tmpdir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("slg_cli_test_" + tag);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parser: format, arrays, overrides, errors") {
    auto cfg = RunConfig::from_string(
        "# comment line\n"
        "sde.gamma = 2.5\n"
        "sde.seed = 42   # trailing comment\n"
        "potential.family = singular_pair_1d\n"
        "control.x0 = 1, 0\n"
        "control.waypoints = 1,2 ; 3,4\n");
    CHECK(cfg.get_double("sde", "gamma", 0.0) == 2.5);
    CHECK(cfg.get_int("sde", "seed", 0) == 42);
    CHECK(cfg.get_string("potential", "family", "") == "singular_pair_1d");
    const auto x0 = cfg.get_array("control", "x0", {});
    REQUIRE(x0.size() == 2);
    CHECK(x0[0] == 1.0);
    const auto ways = cfg.get_matrix("control", "waypoints");
    REQUIRE(ways.size() == 2);
    CHECK(ways[1][1] == 4.0);

    cfg.apply_override("sde.gamma=9");
    CHECK(cfg.get_double("sde", "gamma", 0.0) == 9.0);

    CHECK_THROWS_AS(RunConfig::from_string("gamma = 1\n"), UsageError);     // no section
    CHECK_THROWS_AS(RunConfig::from_string("sde.gamma 1\n"), UsageError);   // no '='
    CHECK_THROWS_AS(cfg.apply_override("nodots"), UsageError);
    auto bad = RunConfig::from_string("sde.dt = fast\n");
    CHECK_THROWS_AS((void)bad.get_double("sde", "dt", 0.0), UsageError);
}

TEST_CASE("unconsumed keys are reported by name") {
    auto cfg = RunConfig::from_string("sde.gamma = 1\nsde.gamm = 2\n");
    (void)cfg.get_double("sde", "gamma", 0.0);
    try {
        cfg.assert_all_consumed();
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("sde.gamm") != std::string::npos);
    }
}

TEST_CASE("resolved echo re-parses to the same values") {
    auto cfg = RunConfig::from_string("sde.gamma = 2\npotential.family = poly_confine\n");
    (void)cfg.get_double("sde", "gamma", 1.0);
    (void)cfg.get_double("sde", "dt", 1e-3);  // default gets materialized
    (void)cfg.get_string("potential", "family", "");
    auto echo = RunConfig::from_string(cfg.resolved_echo());
    CHECK(echo.get_double("sde", "gamma", 0.0) == 2.0);
    CHECK(echo.get_double("sde", "dt", 0.0) == 1e-3);
}

TEST_CASE("csv writer uses 17 significant digits and lf endings") {
    const fs::path dir = tmpdir("csv");
    fs::create_directories(dir);
    CsvWriter csv(dir / "x.csv", {"a", "b"});
    csv.row({1.0 / 3.0, 2.0});
    csv.close();
    const std::string text = slurp(dir / "x.csv");
    CHECK(text == "a,b\n0.33333333333333331,2\n");
}

TEST_CASE("cli: exit codes, determinism, manifest integrity") {
    const std::string cfg = std::string(SLG_CONFIG_DIR) + "/singular1d.cfg";

    SUBCASE("unknown key exits 1 and is named") {
        const fs::path out = tmpdir("ek");
        CHECK(run_cli("simulate " + cfg + " --out " + out.string() +
                      " --override sde.gamm=2") == 1);
    }

    SUBCASE("verify-drift on the shipped config exits 0") {
        const fs::path out = tmpdir("vd");
        CHECK(run_cli("verify-drift " + cfg + " --out " + out.string() +
                      " --override lyapunov.samples=20000") == 0);
        CHECK(fs::exists(out / "drift_report.json"));
        CHECK(fs::exists(out / "resolved_config.cfg"));
        CHECK(fs::exists(out / "manifest.json"));
    }

    SUBCASE("verification failure exits 2") {
        const fs::path out = tmpdir("vf");
        // endpoints in different ordering charts cannot be connected
        CHECK(run_cli("control-path " + std::string(SLG_CONFIG_DIR) + "/control_swap.cfg" +
                      " --out " + out.string() +
                      " --override potential.d=1"
                      " --override control.x0=-1,1,0,0"
                      " --override control.x1=1,-1,0,0") == 2);
    }

    SUBCASE("same seed twice gives byte-identical trajectories") {
        const fs::path o1 = tmpdir("da"), o2 = tmpdir("db");
        const std::string overrides = " --override sde.seed=7 --override sde.n_steps=4000";
        CHECK(run_cli("simulate " + cfg + " --out " + o1.string() + overrides) == 0);
        CHECK(run_cli("simulate " + cfg + " --out " + o2.string() + overrides) == 0);
        CHECK(slurp(o1 / "traj.csv") == slurp(o2 / "traj.csv"));
        CHECK(!slurp(o1 / "traj.csv").empty());
    }

    SUBCASE("manifest hashes match the artifact bytes") {
        const fs::path out = tmpdir("mh");
        CHECK(run_cli("simulate " + cfg + " --out " + out.string() +
                      " --override sde.n_steps=2000") == 0);
        std::ifstream in(out / "manifest.json");
        nlohmann::json doc;
        in >> doc;
        REQUIRE(doc["files"].size() > 0);
        for (const auto& f : doc["files"])
            CHECK(file_hash(out / f["name"].get<std::string>()) == f["fnv1a64"].get<std::string>());
    }

    SUBCASE("control waypoints route the path end to end") {
        const fs::path out = tmpdir("wp");
        CHECK(run_cli("control-path " + std::string(SLG_CONFIG_DIR) + "/control_swap.cfg" +
                      " --out " + out.string() +
                      " \"--override=control.waypoints=0, 1.2, 0, -1.2 ; 0.3, 1.0, -0.3, -1.0\"") ==
              0);
        CHECK(fs::exists(out / "path.csv"));
    }

    SUBCASE("diagnose with a single trajectory omits the replica statistics") {
        const fs::path sim = tmpdir("ds"), out = tmpdir("dd");
        CHECK(run_cli("simulate " + cfg + " --out " + sim.string() +
                      " --override sde.n_steps=20000") == 0);
        CHECK(run_cli("diagnose " + cfg + " --out " + out.string() +
                      " --override diagnostics.trajectories=" + (sim / "traj.csv").string() +
                      " --override diagnostics.replicas_per_start=400"
                      " --override diagnostics.gap_replicas=16") == 0);
        std::ifstream in(out / "summary.json");
        nlohmann::json doc;
        in >> doc;
        CHECK(doc["equipartition_z"].is_null());
        CHECK(doc.contains("tv"));
    }

    SUBCASE("resolved config reproduces identical outputs") {
        const fs::path o1 = tmpdir("rc1"), o2 = tmpdir("rc2");
        CHECK(run_cli("simulate " + cfg + " --out " + o1.string() +
                      " --override sde.n_steps=2000") == 0);
        CHECK(run_cli("simulate " + (o1 / "resolved_config.cfg").string() + " --out " +
                      o2.string()) == 0);
        CHECK(slurp(o1 / "traj.csv") == slurp(o2 / "traj.csv"));
    }
}
