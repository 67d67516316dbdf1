#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "rwre/env_io.hpp"
#include "rwre/regime.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("rwre_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string cmd =
      std::string("'") + RWRE_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string env(const std::string& name) { return std::string(RWRE_ENV_DIR) + "/" + name; }

}  // namespace

TEST_CASE("classify examples") {
  auto r = run_cli("classify --env " + env("binary_half.json"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\"regime\":\"NULL_REC_SUBDIFFUSIVE\"") != std::string::npos);
  CHECK(r.out.find("\"gamma_tilde\":0.693147") != std::string::npos);
  CHECK(r.out.find("\"kappa\":\"inf\"") != std::string::npos);

  r = run_cli("classify --env " + env("transient_07.json"));
  CHECK(r.status == 0);
  CHECK(r.out.find("\"regime\":\"TRANSIENT\"") != std::string::npos);
}

TEST_CASE("classify output round-trips every real") {
  const auto r = run_cli("classify --env " + env("mixed_chi_neg.json"));
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  const auto spec = rwre::load_environment(env("mixed_chi_neg.json"));
  const auto rep = rwre::classify(spec);
  CHECK(j["chi"].get<double>() == rep.chi);
  CHECK(j["psi_prime_1"].get<double>() == rep.psi_prime_1);
  CHECK(j["gamma_tilde"].get<double>() == *rep.gamma_tilde);
  CHECK(j["predicted"]["r_limit"].get<double>() == *rep.predicted.r_limit);
  CHECK(j["kappa"].is_null());
  CHECK(json::parse(j.dump()) == j);
}

TEST_CASE("usage errors exit with status 2") {
  auto r = run_cli("classify");
  CHECK(r.status == 2);
  CHECK(r.err.find("--env") != std::string::npos);

  r = run_cli("classify --env " + env("binary_half.json") + " --bogus");
  CHECK(r.status == 2);
  CHECK_FALSE(r.err.empty());

  r = run_cli("");
  CHECK(r.status == 2);

  r = run_cli("classify --env /nonexistent.json");
  CHECK(r.status == 2);

  const fs::path bad = scratch_dir() / "subcritical.json";
  std::ofstream(bad) << R"({"offspring":{"support":[[1,1]]},"weights":{"support":[[1,1]]}})";
  r = run_cli("classify --env " + bad.string());
  CHECK(r.status == 2);
  CHECK(r.err.find("not super-critical") != std::string::npos);

  r = run_cli("simulate --env " + env("binary_half.json") + " --stop walk:10 --out x");
  CHECK(r.status == 2);
}

TEST_CASE("resource errors exit with status 3") {
  const auto r = run_cli("exact --env " + env("binary_half.json") + " --depth 16 --m 3 --oracle");
  CHECK(r.status == 3);
}

TEST_CASE("exact command") {
  const auto r = run_cli("exact --env " + env("binary_half.json") + " --depth 1 --m 1 --oracle");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["rho"].get<double>() == 0.5);
  CHECK(j["expected_hit_time_paper"].get<double>() == 0.0);
  CHECK(j["expected_hit_time_oracle"].get<double>() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(j["max_abs_beta_error"].get<double>() <= 1e-12);
  for (const char* key : {"depth", "m", "rho", "gamma_root", "expected_hit_time_paper", "expected_hit_time_oracle",
                          "max_abs_beta_error"})
    CHECK(j.contains(key));
}

TEST_CASE("simulate writes JSONL, summary and plot data deterministically") {
  const fs::path a = scratch_dir() / "a.jsonl";
  const fs::path b = scratch_dir() / "b.jsonl";
  const std::string common =
      "simulate --env " + env("two_point_kappa2.json") + " --stop steps:1024 --grid dyadic:6:10 --replicas 16 --seed 9";
  auto r = run_cli(common + " --threads 1 --out " + a.string());
  REQUIRE(r.status == 0);
  r = run_cli(common + " --threads 3 --out " + b.string());
  REQUIRE(r.status == 0);
  const std::string ja = slurp(a);
  CHECK(ja == slurp(b));
  CHECK(slurp(a.string() + ".summary.csv") == slurp(b.string() + ".summary.csv"));

  std::istringstream lines(ja);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    for (const char* key : {"replica", "steps", "returns", "R", "Xstar", "L_root", "extinct"}) CHECK(j.contains(key));
    ++count;
  }
  CHECK(count == 16 * 5);
  CHECK(slurp(a.string() + ".summary.csv").rfind("n,observable,mean,stderr,count\n", 0) == 0);
  CHECK(fs::exists(a.string() + ".R.dat"));
}

TEST_CASE("verify suites") {
  auto r = run_cli("verify --env " + env("binary_half.json") + " --suite biggins --n 4 --replicas 1000");
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  for (const char* key : {"suite", "n", "c", "lhs", "stderr", "rhs", "z"}) CHECK(j.contains(key));
  CHECK(j["rhs"].get<double>() == doctest::Approx(1.0));

  r = run_cli("verify --env " + env("binary_half.json") + " --suite martingale --which M --n 5 --replicas 10");
  REQUIRE(r.status == 0);
  j = json::parse(r.out);
  CHECK(j["lhs"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));

  r = run_cli("verify --env " + env("binary_half.json") + " --suite maxpot --levels 4,6 --replicas 5");
  REQUIRE(r.status == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);

  r = run_cli("verify --env " + env("binary_half.json") + " --suite nothing");
  CHECK(r.status == 2);
}

TEST_CASE("sweep classifies a directory") {
  const auto r = run_cli("sweep --env-dir " + std::string(RWRE_ENV_DIR));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\"env\":\"binary_04.json\"") != std::string::npos);
  CHECK(r.out.find("POS_REC_CHI_NEG") != std::string::npos);
  CHECK(r.out.find("NULL_REC_CRITICAL") != std::string::npos);
}
