#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"
#include "sep/dynamics/engine.hpp"
#include "sep/ensembles/measure.hpp"

namespace sep::cli {

using nlohmann::json;

/// Invalid or inconsistent experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultEpsilon = 1e-6;

/// Settings that change wall time or file locations but never results.
/// They are not embedded in outputs.
struct RunSettings {
  int workers = 0;
  std::string out = ".";
};

/// Lattice side: fixed, or sized by the light-cone rule for the largest time.
struct SideSpec {
  bool automatic = true;
  int side = 0;
  double epsilon = kDefaultEpsilon;
};

struct LatticeSetup {
  int dimension = 1;
  SideSpec side_spec;
  int side = 0;  // resolved
  TorusLattice lattice() const { return TorusLattice(dimension, side); }
};

struct DecayConfig {
  LatticeSetup lattice;
  ensembles::MeasureSpec measure;
  json measure_json;
  double rho = 0.5;
  std::vector<double> times;
  std::size_t replicas = 64;
  Seed seed = 1;
  dynamics::Engine engine = dynamics::Engine::stirring;
  std::pair<double, double> fit_window{0.0, 0.0};
};

struct ValidateConfig {
  int side = 3;
  double annihilation_rate = 2.0;
  std::size_t mc_replicas = 100000;
  std::size_t variance_replicas = 10000;
  Seed seed = 20240611;
};

struct SimulateConfig {
  dynamics::Process process = dynamics::Process::sep;
  LatticeSetup lattice;
  ensembles::MeasureSpec measure;
  json measure_json;
  double rho = 0.5;
  std::vector<double> times;
  std::size_t replicas = 1;
  Seed seed = 1;
  dynamics::Engine engine = dynamics::Engine::gillespie;
};

struct OracleCompareConfig {
  std::vector<dynamics::Process> processes;
  std::vector<dynamics::Engine> engines;
  int side = 3;
  double t = 1.0;
  std::size_t replicas = 100000;
  Seed seed = 20240611;
  double annihilation_rate = 2.0;
};

/// Reads a config file: a JSON object, or any output of this tool (CSV with
/// an embedded "# config=" line, JSON report with a "config" member, or a
/// trajectory file), from which the embedded config is recovered.
json read_config_file(const std::string& path);

/// Parses and validates; rejects unknown keys. `raw` may carry the runtime
/// keys "workers" and "out", which are moved into `run`.
DecayConfig parse_decay(const json& raw, RunSettings& run);
ValidateConfig parse_validate(const json& raw, RunSettings& run);
SimulateConfig parse_simulate(const json& raw, RunSettings& run);
OracleCompareConfig parse_oracle_compare(const json& raw, RunSettings& run);

/// Canonical resolved form; parsing it again gives the same config.
json to_json(const DecayConfig& c);
json to_json(const ValidateConfig& c);
json to_json(const SimulateConfig& c);
json to_json(const OracleCompareConfig& c);

/// Measure spec from its tagged record, e.g. {"kind": "bernoulli", "rho": 0.5}.
/// Returns the spec and its canonical record.
std::pair<ensembles::MeasureSpec, json> parse_measure(const json& j, int dimension);

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_hash(const json& resolved);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace sep::cli
