#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "nichelab/results_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Invocation {
  int status = -1;
  std::string output;
};

Invocation invoke(const std::string& args) {
  const std::string cmd = std::string(NICHELAB_CLI) + " " + args + " 2>&1";
  Invocation inv;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) {
    inv.output += buf.data();
  }
  const int raw = ::pclose(pipe);
  inv.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return inv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("nichelab-cli-" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("run: crowding at n = 100 reaches no optimum") {
  const auto r = invoke("run --n 100 --mu 32 --mechanism pc --fitness twomax --seed 7");
  CHECK(r.status == 0);
  CHECK(r.output.find("failure") != std::string::npos);
  CHECK(r.output.find("optima zero=no one=no") != std::string::npos);
}

TEST_CASE("run: small deterministic crowding completes and writes a record") {
  TempDir tmp;
  const auto out = tmp.path / "run.csv";
  const auto trace = tmp.path / "trace.csv";
  const auto r = invoke("run --n 4 --mu 2 --mechanism dc --seed 1 --out " + out.string() + " --trace-out " +
                        trace.string());
  CHECK(r.status == 0);
  const auto records = nichelab::load_runs(out);
  REQUIRE(records.size() == 1);
  CHECK(records[0].config.n == 4);
  CHECK(slurp(trace).find("generation,best_zero_branch,best_one_branch,best_overall") != std::string::npos);
}

TEST_CASE("run: usage errors") {
  CHECK(invoke("run --mechanism rts").status == 1);
  const auto no_w = invoke("run --n 10 --mu 2 --mechanism rts");
  CHECK(no_w.status == 1);
  CHECK(no_w.output.find("--w") != std::string::npos);
  const auto missing = invoke("run --mu 2 --mechanism dc");
  CHECK(missing.status == 1);
  CHECK(missing.output.find("--n") != std::string::npos);
  CHECK(invoke("run --n 10 --mu 2 --mechanism pc --w 3").status == 1);
  CHECK(invoke("run --n 10 --mu 2 --mechanism dc --distance geno").status == 1);
  CHECK(invoke("run --n 10 --mu 2 --mechanism xx").status == 1);
  CHECK(invoke("").status == 1);
}

TEST_CASE("run: io error on an unwritable path") {
  CHECK(invoke("run --n 4 --mu 2 --mechanism dc --out /nonexistent-dir/x/run.csv").status == 2);
}

TEST_CASE("help lists defaults") {
  const auto r = invoke("run --help");
  CHECK(r.status == 0);
  CHECK(r.output.find("[twomax]") != std::string::npos);
  const auto f = invoke("fig1 --help");
  CHECK(f.output.find("[100]") != std::string::npos);
}

TEST_CASE("oracle checks") {
  const auto drift = invoke("oracle --check drift --n 200 --k 120");
  CHECK(drift.status == 0);
  CHECK(drift.output.find("consistent") != std::string::npos);
  const auto det = invoke("oracle --check bounds --name det_crowding_success_lb --mu 8");
  CHECK(det.status == 0);
  CHECK(det.output.find("0.9921875") != std::string::npos);
  const auto na = invoke("oracle --check takeover --mu 8 --w 2 --n 20");
  CHECK(na.status == 0);
  CHECK(na.output.find("not applicable") != std::string::npos);
  const auto below = invoke("oracle --check drift --n 100 --k 30");
  CHECK(below.status == 0);
  CHECK(below.output.find("not applicable") != std::string::npos);
  const auto gap = invoke("oracle --check init-gap --n 101 --mu 10 --sigma 5 --trials 20000");
  CHECK(gap.status == 0);
  CHECK(invoke("oracle --check bounds --name nope").status == 1);
  CHECK(invoke("oracle --check other").status == 1);
}

TEST_CASE("sweep and figure tables are reproducible") {
  TempDir tmp;
  const auto a = tmp.path / "a.csv";
  const auto b = tmp.path / "b.csv";
  const std::string args = " --n 20 --mu 2,4 --mechanism rts --w 1,2 --distance geno,pheno --runs 3 --seed 4";
  CHECK(invoke("sweep" + args + " --workers 1 --out " + a.string()).status == 0);
  CHECK(invoke("sweep" + args + " --workers 3 --out " + b.string()).status == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(nichelab::load_sweep(a).size() == 8);

  const auto d1 = tmp.path / "fig1a";
  const auto d2 = tmp.path / "fig1b";
  CHECK(invoke("fig1 --small --runs 2 --seed 3 --out-dir " + d1.string()).status == 0);
  CHECK(invoke("fig1 --small --runs 2 --seed 3 --workers 2 --out-dir " + d2.string()).status == 0);
  const std::string table = slurp(d1 / "fig1_fitness.csv");
  CHECK(table == slurp(d2 / "fig1_fitness.csv"));
  CHECK(table.find("grid=small") != std::string::npos);
  CHECK(table.find("\n1024,") != std::string::npos);
  CHECK(table.find("\n2048,") == std::string::npos);

  CHECK(invoke("fig1 --small --runs 1 --out-dir /proc/nichelab").status == 2);
}
