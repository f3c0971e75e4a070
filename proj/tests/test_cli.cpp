#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

#include "martlab/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_binary() {
  const char* p = std::getenv("MARTLAB_CLI");
  return p ? p : "";
}

// exit code of `martlab <argline>` with stdout/stderr discarded
int run_cli(const std::string& argline) {
  std::string cmd = "\"" + cli_binary() + "\" " + argline + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  if (st == -1) return -1;
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("martlab-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  return martlab::io::read_text_file(p.string());
}

nlohmann::json parse(const fs::path& p) {
  return nlohmann::json::parse(slurp(p));
}

}  // namespace

TEST_CASE("bad invocations exit 2 without touching outputs") {
  REQUIRE(!cli_binary().empty());
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate --levels") == 2);          // flag without value
  CHECK(run_cli("simulate --paths=xx --levels 3") == 2);
  CHECK(run_cli("simulate --model.kind=martian --levels 3 --paths 5") == 2);
  CHECK(run_cli("simulate --levels 3 --paths 5 --format tsv") == 2);
  CHECK(run_cli("probe --levels 3,4,5 --paths 50") == 2);  // needs >= 100
  CHECK(run_cli("mean-variation --model.kind=fbm --model.hurst=1.5 "
                "--levels 3,4 --paths 20") == 2);  // hurst outside (0,1)
  CHECK(run_cli("decompose --levels 3 --paths 20 --decompose.kind=qr") == 2);
}

TEST_CASE("simulate writes a deterministic ensemble") {
  auto a = scratch("sim-a");
  auto b = scratch("sim-b");
  std::string common =
      "simulate --model.kind=bm --model.mu=0.2 --levels 5 --paths 20 "
      "--seed 9 --out ";
  REQUIRE(run_cli(common + a.string()) == 0);
  REQUIRE(run_cli(common + b.string()) == 0);

  std::string csv = slurp(a / "ensemble.csv");
  CHECK(csv == slurp(b / "ensemble.csv"));
  CHECK(slurp(a / "ensemble.json") == slurp(b / "ensemble.json"));
  CHECK(csv.rfind("path,t_0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);  // header + 20 rows

  auto j = parse(a / "ensemble.json");
  CHECK(j.at("model").at("kind") == "bm");
  CHECK(j.at("model").at("mu") == 0.2);
  CHECK(j.at("seed") == 9);
  CHECK(j.at("grid_level") == 5);
  CHECK(j.at("n_paths") == 20);
}

TEST_CASE("mean-variation hits the squared-bm closed form") {
  auto dir = scratch("mv");
  REQUIRE(run_cli("mean-variation --model.kind=squared-bm --levels 3..5 "
                  "--paths 400 --seed 5 --out " +
                  dir.string()) == 0);
  auto j = parse(dir / "mean_variation.json");
  REQUIRE(j.at("entries").size() == 3);
  for (const auto& e : j.at("entries")) {
    // E|W^2 increment drift| sums to exactly 1 on every path
    CHECK(e.at("estimate") == 1.0);
    CHECK(e.at("stderr") == 0.0);
  }
  CHECK(fs::exists(dir / "mean_variation.csv"));
}

TEST_CASE("format selects which files are emitted") {
  auto dir = scratch("fmt");
  REQUIRE(run_cli("mean-variation --model.kind=bm --levels 3,4 --paths 50 "
                  "--seed 2 --format csv --out " +
                  dir.string()) == 0);
  CHECK(fs::exists(dir / "mean_variation.csv"));
  CHECK(!fs::exists(dir / "mean_variation.json"));

  auto dir2 = scratch("fmt-json");
  REQUIRE(run_cli("mean-variation --model.kind=bm --levels 3,4 --paths 50 "
                  "--seed 2 --format json --out " +
                  dir2.string()) == 0);
  CHECK(!fs::exists(dir2 / "mean_variation.csv"));
  CHECK(fs::exists(dir2 / "mean_variation.json"));
}

TEST_CASE("decompose writes both flavors and reports success") {
  auto dir = scratch("doob");
  REQUIRE(run_cli("decompose --model.kind=ou --model.theta=1 --model.sigma=1 "
                  "--levels 4 --paths 100 --seed 3 --out " +
                  dir.string()) == 0);
  std::string csv = slurp(dir / "decomposition.csv");
  CHECK(csv.rfind("path,component,", 0) == 0);
  CHECK(!fs::exists(dir / "failures.json"));

  auto dir2 = scratch("rao");
  REQUIRE(run_cli("decompose --model.kind=squared-bm --decompose.kind=rao "
                  "--levels 4 --paths 100 --seed 3 --out " +
                  dir2.string()) == 0);
  CHECK(fs::exists(dir2 / "decomposition.csv"));
}

TEST_CASE("probe emits a verdict") {
  auto dir = scratch("probe");
  REQUIRE(run_cli("probe --model.kind=bm --levels 4,5,6 --paths 300 --seed 11 "
                  "--epsilon 0.1 --format json --out " +
                  dir.string()) == 0);
  auto j = parse(dir / "probe.json");
  std::string verdict = j.at("verdict");
  CHECK((verdict == "bounded" || verdict == "unbounded" ||
         verdict == "inconclusive"));
  CHECK(j.at("levels").size() == 3);
  CHECK(!fs::exists(dir / "probe.csv"));
}

TEST_CASE("riemann accepts brownian motion") {
  auto dir = scratch("riemann");
  REQUIRE(run_cli("riemann --model.kind=bm --levels 6,8,10,12 --paths 800 "
                  "--seed 31 --format json --out " +
                  dir.string()) == 0);
  auto j = parse(dir / "riemann.json");
  CHECK(j.at("verdict") == "yes");
  CHECK(j.at("integrands").size() == 3);
}

TEST_CASE("theorem1 passes on a truncated drifting brownian model") {
  auto dir = scratch("theorem1");
  REQUIRE(run_cli("theorem1 --model.kind=truncated --model.bound=1 "
                  "--model.inner.kind=bm --model.inner.mu=0.5 "
                  "--model.inner.sigma=1 --levels 4..8 --paths 2000 "
                  "--seed 107 --epsilon 0.1 --out " +
                  dir.string()) == 0);
  auto j = parse(dir / "theorem1.json");
  CHECK(j.at("verdict") == "PASS");
  CHECK(j.at("levels").size() == 5);
  CHECK(!fs::exists(dir / "failures.json"));
}

TEST_CASE("mazur-demo contracts random indicators") {
  auto dir = scratch("mazur");
  REQUIRE(run_cli("mazur-demo --paths 500 --mazur.count 6 --mazur.window 3 "
                  "--seed 2 --out " +
                  dir.string()) == 0);
  auto j = parse(dir / "mazur.json");
  CHECK(j.at("windows").size() == 6);
  CHECK(j.at("max_gap").get<double>() <= 1e-8);
}

TEST_CASE("thread count never changes output bytes") {
  auto d1 = scratch("threads-1");
  auto d4 = scratch("threads-4");
  std::string probe =
      "probe --model.kind=bm --levels 4,5,6 --paths 400 --seed 13 --out ";
  REQUIRE(run_cli(probe + d1.string() + " --threads 1") == 0);
  REQUIRE(run_cli(probe + d4.string() + " --threads 4") == 0);
  CHECK(slurp(d1 / "probe.json") == slurp(d4 / "probe.json"));
  CHECK(slurp(d1 / "probe.csv") == slurp(d4 / "probe.csv"));

  std::string mv =
      "mean-variation --model.kind=ou --model.theta=1.5 --model.sigma=0.7 "
      "--levels 3..5 --paths 300 --seed 17 --out ";
  REQUIRE(run_cli(mv + d1.string() + " --threads 1") == 0);
  REQUIRE(run_cli(mv + d4.string() + " --threads 4") == 0);
  CHECK(slurp(d1 / "mean_variation.json") == slurp(d4 / "mean_variation.json"));
  CHECK(slurp(d1 / "mean_variation.csv") == slurp(d4 / "mean_variation.csv"));
}

TEST_CASE("nested output directories are created") {
  auto base = scratch("nested");
  fs::path deep = base / "a" / "b";
  REQUIRE(run_cli("simulate --model.kind=bm --levels 3 --paths 5 --seed 1 "
                  "--out " +
                  deep.string()) == 0);
  CHECK(fs::exists(deep / "ensemble.csv"));
}
