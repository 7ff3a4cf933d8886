#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hcb/harness.hpp"
#include "hcb/replicas.hpp"

using namespace hcb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hcb_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing and validation") {
    ExperimentConfig c;
    c.load_text("# comment\ncommand = hitting_law\nreplicas=1e5\n\nn_grid = 10, 100\ngrid=0.1,1\nparallel=false\n");
    CHECK(c.command == "hitting_law");
    CHECK(c.replicas == 100000);
    CHECK(c.n_grid == std::vector<std::uint64_t>{10, 100});
    CHECK(c.grid == std::vector<double>{0.1, 1.0});
    CHECK_FALSE(c.parallel);
    CHECK_NOTHROW(c.validate());

    CHECK_THROWS_AS(c.set("colour", "red"), ConfigError);
    CHECK_THROWS_AS(c.set("n", "-3"), ConfigError);
    CHECK_THROWS_AS(c.set("n", "2.5"), ConfigError);
    CHECK_THROWS_AS(c.set("p", "x"), ConfigError);
    CHECK_THROWS_AS(c.load_text("novalue\n"), ConfigError);

    ExperimentConfig bad;
    bad.set("replicas", "0");
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    ExperimentConfig badp;
    badp.p = 1.5;
    CHECK_THROWS_AS(badp.validate(), ConfigError);
    ExperimentConfig badcmd;
    badcmd.command = "nope";
    CHECK_THROWS_AS(badcmd.validate(), ConfigError);
    ExperimentConfig grids;
    grids.n_grid = {10, 100};
    grids.replicas_grid = {5};
    CHECK_THROWS_AS(grids.validate(), ConfigError);

    const auto echo = c.echo();
    ExperimentConfig again;
    for (const auto& [k, v] : echo) again.set(k, v);
    CHECK(again.echo() == echo);
}

TEST_CASE("manifest is written atomically and lists the outputs") {
    const fs::path dir = scratch("manifest");
    ExperimentConfig c;
    c.command = "bijection";
    c.word = "hcHhhcHcHCFhhhHCHF";
    c.out = dir.string();
    const RunManifest m = run_command(c);
    CHECK(m.summary["triangles"] == 18);
    CHECK(m.summary["loops"] == 3);
    const auto j = nlohmann::json::parse(slurp(dir / "bijection.manifest.json"));
    CHECK(j["command"] == "bijection");
    CHECK(j["config"]["word"] == c.word);
    CHECK(j["version"] == version_string());
    CHECK(j["outputs"].size() == 2);
    for (const auto& f : j["outputs"]) CHECK(fs::exists(dir / f.get<std::string>()));
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("same seed gives byte-identical CSV; serial and parallel agree") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ExperimentConfig c;
    c.command = "hitting_law";
    c.replicas = 20000;
    c.ell_max = 8;
    c.out = a.string();
    run_command(c);
    c.out = b.string();
    c.parallel = false;
    run_command(c);
    CHECK(slurp(a / "hitting_law.csv") == slurp(b / "hitting_law.csv"));

    const auto s = run_replicas_serial(16, [](std::uint64_t i) { return i * i; });
    const auto p = run_replicas_parallel(16, [](std::uint64_t i) { return i * i; });
    CHECK(s == p);
}

TEST_CASE("fig1 with N = 1 writes a single +-1 row") {
    const fs::path dir = scratch("fig1");
    ExperimentConfig c;
    c.command = "fig1";
    c.n = 1;
    c.out = dir.string();
    run_command(c);
    std::istringstream csv(slurp(dir / "fig1_p0.5.csv"));
    std::string header, row, extra;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == "step,S,D,S_over_sqrtN,D_over_sqrtN,D_logN_over_2pi_sqrtN");
    CHECK((row.rfind("1,1,", 0) == 0 || row.rfind("1,-1,", 0) == 0));
    CHECK_FALSE(std::getline(csv, extra));
    CHECK(fs::exists(dir / "fig1.svg"));
}

TEST_CASE("fig1 reproduces byte for byte and collapses D at larger p") {
    const fs::path a = scratch("fig1a"), b = scratch("fig1b");
    ExperimentConfig c;
    c.command = "fig1";
    c.n = 20000;
    c.grid = {0.3, 0.7};
    c.stride = 10;
    c.out = a.string();
    const RunManifest m = run_command(c);
    c.out = b.string();
    run_command(c);
    CHECK(slurp(a / "fig1_p0.3.csv") == slurp(b / "fig1_p0.3.csv"));
    CHECK(slurp(a / "fig1_p0.7.csv") == slurp(b / "fig1_p0.7.csv"));
    const double r3 = m.summary["p=0.3"]["D_over_sqrtN_range"], r7 = m.summary["p=0.7"]["D_over_sqrtN_range"];
    CHECK(r7 < r3);
}

TEST_CASE("exact-eval and oracle-verify commands") {
    const fs::path dir = scratch("exact");
    ExperimentConfig c;
    c.command = "exact_eval";
    c.ell_max = 3;
    c.out = dir.string();
    const RunManifest m = run_command(c);
    CHECK(double(m.summary["F0"]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(slurp(dir / "exact_eval.csv").find("hitting_pmf,0,0.5,") != std::string::npos);
    c.command = "oracle_verify";
    c.k = 2;
    c.max_len = 10;
    const RunManifest o = run_command(c);
    CHECK(o.summary["words"] == 36);
    CHECK(slurp(dir / "bijection_report.txt").find("words 36") != std::string::npos);
}

TEST_CASE("small Monte Carlo commands run and report") {
    const fs::path dir = scratch("mc");
    ExperimentConfig c;
    c.out = dir.string();
    c.replicas = 5000;
    c.n = 1000;
    c.command = "martingale";
    const RunManifest mm = run_command(c);
    CHECK(mm.summary["rows"][0]["mean"] == 1.0);
    c.command = "observables";
    const RunManifest ob = run_command(c);
    CHECK(ob.summary["perimeter_not_below_loop"] == 0);
    CHECK(double(ob.summary["min_loop_length"]) >= 1);
    c.command = "variance_scan";
    c.n_grid = {100, 1000};
    c.replicas_grid = {400, 200};
    const RunManifest vs = run_command(c);
    CHECK(vs.summary["points"].size() == 2);
    c.command = "future_stats";
    c.n_grid = {1000};
    c.replicas_grid.clear();
    c.replicas = 3000;
    const RunManifest fs_ = run_command(c);
    CHECK(fs_.summary["laplace"].size() == 3);
    CHECK(fs::exists(dir / "pf_samplers.csv"));
}
