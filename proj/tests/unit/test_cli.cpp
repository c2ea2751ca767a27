#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sep/cli/config.hpp"
#include "sep/dynamics/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sep_ergo_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SEP_ERGO_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_config(const std::string& sub, const fs::path& cfg, const fs::path& out, const std::string& extra = "") {
  return run(sub + " --config " + cfg.string() + " --out " + out.string() + " " + extra);
}

json small_decay() {
  return {{"command", "decay"},
          {"dimension", 1},
          {"side", 64},
          {"measure", {{"kind", "markov"}, {"a", 0.3}, {"b", 0.2}}},
          {"times", {0.5, 1, 2, 4, 8}},
          {"replicas", 8},
          {"seed", 17}};
}

}  // namespace

TEST_CASE("decay output is byte-identical on rerun and across worker counts") {
  const auto dir = scratch("decay");
  const auto cfg = write_config(dir, small_decay());
  REQUIRE(run_config("decay", cfg, dir / "a", "--workers 1") == 0);
  REQUIRE(run_config("decay", cfg, dir / "b", "--workers 3") == 0);
  const auto csv = slurp(dir / "a" / "decay.csv");
  CHECK(csv == slurp(dir / "b" / "decay.csv"));
  CHECK(slurp(dir / "a" / "decay.json") == slurp(dir / "b" / "decay.json"));
  CHECK(csv.find("\n# config={") != std::string::npos);
  CHECK(csv.find("time,estimate,stderr,replicas,ratio_to_envelope") != std::string::npos);
}

TEST_CASE("rerun from the config embedded in an output reproduces it") {
  const auto dir = scratch("embedded");
  const auto cfg = write_config(dir, small_decay());
  REQUIRE(run_config("decay", cfg, dir / "a") == 0);
  REQUIRE(run_config("decay", dir / "a" / "decay.csv", dir / "b") == 0);
  CHECK(slurp(dir / "a" / "decay.csv") == slurp(dir / "b" / "decay.csv"));
  REQUIRE(run_config("decay", dir / "a" / "decay.json", dir / "c") == 0);
  CHECK(slurp(dir / "a" / "decay.csv") == slurp(dir / "c" / "decay.csv"));
}

TEST_CASE("auto side is resolved and recorded") {
  auto j = small_decay();
  j["side"] = "auto";
  j["times"] = {1, 2, 4, 8};
  const auto dir = scratch("auto");
  REQUIRE(run_config("decay", write_config(dir, j), dir / "o") == 0);
  const auto report = json::parse(slurp(dir / "o" / "decay.json"));
  CHECK(report["config"]["resolved_side"] == sep::light_cone_side(8.0, 1e-6));
}

TEST_CASE("invalid configs exit with code 2") {
  const auto dir = scratch("invalid");
  auto rho = small_decay();
  rho["rho"] = 0.5;  // Markov(0.3, 0.2) has density 0.6
  CHECK(run_config("decay", write_config(dir, rho), dir / "o") == 2);

  auto unknown = small_decay();
  unknown["replica"] = 3;
  CHECK(run_config("decay", write_config(dir, unknown), dir / "o") == 2);

  CHECK(run_config("validate", write_config(dir, {{"command", "validate"}, {"side", 2}}), dir / "o") == 2);

  auto wrong_cmd = small_decay();
  CHECK(run_config("simulate", write_config(dir, wrong_cmd), dir / "o") == 2);

  auto one_replica = small_decay();
  one_replica["replicas"] = 1;
  CHECK(run_config("decay", write_config(dir, one_replica), dir / "o") == 2);
  CHECK(run("decay --config " + (dir / "missing.json").string()) == 2);
}

TEST_CASE("resource cap exits with code 3") {
  const auto dir = scratch("cap");
  auto big = small_decay();
  big["dimension"] = 3;
  big["side"] = 500;
  CHECK(run_config("decay", write_config(dir, big), dir / "o") == 3);
}

TEST_CASE("validate fails with a mutated annihilation rate") {
  const auto dir = scratch("validate");
  const json bad{{"command", "validate"},
                 {"annihilation_rate", 1.0},
                 {"mc_replicas", 2000},
                 {"variance_replicas", 200}};
  CHECK(run_config("validate", write_config(dir, bad), dir / "o") == 1);
  const auto report = json::parse(slurp(dir / "o" / "validate.json"));
  CHECK(report["pass"] == false);
  CHECK_FALSE(report["failures"].empty());
}

TEST_CASE("simulate writes one snapshot per requested time and conserves particles") {
  const auto dir = scratch("simulate");
  for (std::string process : {"sep", "annihilation", "free"}) {
    const json cfg{{"command", "simulate"},
                   {"process", process},
                   {"dimension", 1},
                   {"side", 30},
                   {"measure", {{"kind", "bernoulli"}, {"rho", 0.5}}},
                   {"times", {0, 0.5, 1, 3}},
                   {"replicas", 2},
                   {"seed", 5}};
    const auto out = dir / process;
    REQUIRE(run_config("simulate", write_config(dir, cfg), out) == 0);
    const auto traj = sep::dynamics::read_trajectory((out / "trajectory.bin").string());
    CHECK(traj.version == sep::dynamics::kTrajectoryFormatVersion);
    CHECK(json::parse(traj.header_json)["process"] == process);
    REQUIRE(traj.records.size() == 8);
    for (const auto& rec : traj.records) CHECK(rec.values.size() == 30);
    for (std::size_t i = 0; i < traj.records.size(); i += 4) {
      auto charge = [&](const std::vector<sep::Symbol>& v) {
        long s = 0;
        for (auto c : v) s += process == "sep" ? c : (c == sep::sym::both ? 0 : c);
        return s;
      };
      const long c0 = charge(traj.records[i].values);
      for (std::size_t k = 1; k < 4; ++k) {
        CHECK(traj.records[i + k].replica == traj.records[i].replica);
        CHECK(charge(traj.records[i + k].values) == c0);
      }
    }
    REQUIRE(run_config("simulate", out / "trajectory.bin", dir / (process + "_again")) == 0);
    CHECK(slurp(out / "trajectory.bin") == slurp(dir / (process + "_again") / "trajectory.bin"));
  }
}

TEST_CASE("oracle-compare passes on a small run") {
  const auto dir = scratch("oracle");
  const json cfg{{"command", "oracle-compare"}, {"replicas", 5000}, {"t", 0.5}};
  CHECK(run_config("oracle-compare", write_config(dir, cfg), dir / "o") == 0);
  const auto report = json::parse(slurp(dir / "o" / "oracle_compare.json"));
  CHECK(report["checks"].size() == 8);
}

TEST_CASE("config hash is stable and sensitive") {
  const json a{{"x", 1}}, b{{"x", 2}};
  CHECK(sep::cli::config_hash(a) == sep::cli::config_hash(a));
  CHECK(sep::cli::config_hash(a) != sep::cli::config_hash(b));
  CHECK(sep::cli::config_hash(a).size() == 16);
}
