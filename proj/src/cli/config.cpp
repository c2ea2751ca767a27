#include "sep/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sep/dynamics/trajectory_io.hpp"
#include "sep/oracle/generator.hpp"

namespace sep::cli {

namespace {

constexpr std::size_t kMaxSimulationSites = std::size_t{1} << 26;

/// Typed access to a JSON object that remembers which keys were read.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(where_ + ": '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where_ + ": '" + key + "' must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(where_ + ": '" + key + "' must be an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
      throw ConfigError(where_ + ": '" + key + "' is out of range");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    throw ConfigError(where_ + ": '" + key + "' must be a non-negative integer");
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(where_ + ": '" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void check_command(Reader& r, const char* name) {
  if (r.has("command") && r.string("command") != name)
    throw ConfigError(std::string("config is for command '") + r.string("command") + "', not '" + name + "'");
}

void read_run_settings(Reader& r, RunSettings& run) {
  if (r.has("workers")) {
    const long long w = r.integer("workers");
    if (w < 0) throw ConfigError("workers must be >= 0");
    run.workers = static_cast<int>(w);
  }
  if (r.has("out")) run.out = r.string("out");
}

std::size_t positive_count(Reader& r, const std::string& key, std::size_t fallback, std::size_t minimum) {
  const long long v = r.integer(key, static_cast<long long>(fallback));
  if (v < static_cast<long long>(minimum))
    throw ConfigError("'" + key + "' must be >= " + std::to_string(minimum));
  return static_cast<std::size_t>(v);
}

std::vector<double> read_times(Reader& r) {
  const bool explicit_times = r.has("times");
  const bool grid = r.has("time_grid");
  if (explicit_times == grid) throw ConfigError("give exactly one of 'times' or 'time_grid'");
  std::vector<double> times;
  if (explicit_times) {
    const json& v = r.raw("times");
    if (!v.is_array() || v.empty()) throw ConfigError("'times' must be a non-empty array");
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("'times' entries must be numbers");
      times.push_back(x.get<double>());
    }
  } else {
    Reader g(r.raw("time_grid"), "time_grid");
    const double t0 = g.number("t0");
    const long long kmax = g.integer("kmax");
    g.finish();
    if (!(t0 > 0.0) || kmax < 0 || kmax > 60) throw ConfigError("time_grid needs t0 > 0 and 0 <= kmax <= 60");
    for (long long k = 0; k <= kmax; ++k) times.push_back(std::ldexp(t0, static_cast<int>(k)));
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw ConfigError("times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw ConfigError("times must be strictly increasing");
  }
  return times;
}

LatticeSetup read_lattice(Reader& r, double t_max) {
  LatticeSetup s;
  const long long d = r.integer("dimension", 1);
  if (d < 1 || d > 8) throw ConfigError("dimension must be in 1..8");
  s.dimension = static_cast<int>(d);
  if (!r.has("side") || (r.raw("side").is_string() && r.string("side") == "auto")) {
    s.side_spec.automatic = true;
    s.side_spec.epsilon = r.number("epsilon", kDefaultEpsilon);
    if (!(s.side_spec.epsilon > 0.0 && s.side_spec.epsilon < 1.0)) throw ConfigError("epsilon must be in (0, 1)");
    s.side = light_cone_side(t_max, s.side_spec.epsilon);
  } else {
    if (r.has("epsilon")) throw ConfigError("'epsilon' only applies when side is \"auto\"");
    const long long L = r.integer("side");
    if (L < 3) throw ConfigError("side must be >= 3 (got " + std::to_string(L) + ")");
    if (L > (1 << 24)) throw ConfigError("side is out of range");
    s.side_spec.automatic = false;
    s.side_spec.side = static_cast<int>(L);
    s.side = static_cast<int>(L);
  }
  if (r.has("resolved_side") && r.integer("resolved_side") != s.side)
    throw ConfigError("'resolved_side' disagrees with the side rule");
  double sites = 1.0;
  for (int i = 0; i < s.dimension; ++i) sites *= s.side;
  if (sites > static_cast<double>(kMaxSimulationSites))
    throw oracle::ResourceLimit("lattice of " + format_double(sites) + " sites exceeds the cap of 2^26");
  return s;
}

void write_lattice(json& j, const LatticeSetup& s) {
  j["dimension"] = s.dimension;
  if (s.side_spec.automatic) {
    j["side"] = "auto";
    j["epsilon"] = s.side_spec.epsilon;
  } else {
    j["side"] = s.side;
  }
  j["resolved_side"] = s.side;
}

double read_rho(Reader& r, const ensembles::MeasureSpec& mu) {
  const double dens = ensembles::density(mu);
  if (!r.has("rho")) return dens;
  const double rho = r.number("rho");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must be in [0, 1]");
  if (std::abs(rho - dens) > 1e-12)
    throw ConfigError("rho = " + format_double(rho) + " does not match the measure density " + format_double(dens));
  return rho;
}

template <class F>
auto wrap_invalid(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string config_hash(const json& resolved) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : resolved.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::pair<ensembles::MeasureSpec, json> parse_measure(const json& j, int dimension) {
  Reader r(j, "measure");
  const std::string kind = r.string("kind");
  json canon = {{"kind", kind}};
  ensembles::MeasureSpec spec;
  wrap_invalid([&] {
    if (kind == "bernoulli") {
      const double rho = r.number("rho");
      spec = ensembles::make_bernoulli(rho);
      canon["rho"] = rho;
    } else if (kind == "block_xor" || kind == "block_and") {
      const double p = r.number("p");
      const long long range = r.integer("range", 1);
      if (range < 1 || range > 64) throw ConfigError("range must be in 1..64");
      spec = kind == "block_xor" ? ensembles::block_xor(dimension, p, static_cast<int>(range))
                                 : ensembles::block_and(dimension, p, static_cast<int>(range));
      canon["p"] = p;
      canon["range"] = range;
    } else if (kind == "block") {
      ensembles::BlockFactor f;
      f.dimension = dimension;
      f.p = r.number("p");
      f.offsets = r.raw("offsets").get<std::vector<std::vector<int>>>();
      f.table = r.raw("table").get<std::vector<std::uint8_t>>();
      f.label = "block";
      spec = f;
      canon["p"] = f.p;
      canon["offsets"] = f.offsets;
      canon["table"] = f.table;
    } else if (kind == "markov") {
      const double a = r.number("a"), b = r.number("b");
      spec = ensembles::make_markov(a, b);
      canon["a"] = a;
      canon["b"] = b;
    } else {
      throw ConfigError("unknown measure kind '" + kind + "'");
    }
    ensembles::validate(spec);
    return 0;
  });
  r.finish();
  const int need = ensembles::required_dimension(spec);
  if (need != 0 && need != dimension)
    throw ConfigError("measure '" + kind + "' requires dimension " + std::to_string(need));
  return {spec, canon};
}

DecayConfig parse_decay(const json& raw, RunSettings& run) {
  Reader r(raw, "decay config");
  check_command(r, "decay");
  read_run_settings(r, run);
  DecayConfig c;
  c.times = read_times(r);
  c.lattice = read_lattice(r, c.times.back());
  auto [mu, canon] = parse_measure(r.raw("measure"), c.lattice.dimension);
  c.measure = mu;
  c.measure_json = canon;
  c.rho = read_rho(r, c.measure);
  c.replicas = positive_count(r, "replicas", 64, 2);
  c.seed = r.unsigned64("seed", 1);
  c.engine = wrap_invalid([&] { return dynamics::parse_engine(r.string("engine", "stirring+thin")); });
  c.fit_window = {c.times.front(), c.times.back()};
  if (r.has("fit_window")) {
    const json& w = r.raw("fit_window");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
      throw ConfigError("'fit_window' must be [t_lo, t_hi]");
    c.fit_window = {w[0].get<double>(), w[1].get<double>()};
    if (!(c.fit_window.first <= c.fit_window.second)) throw ConfigError("'fit_window' must have t_lo <= t_hi");
  }
  r.finish();
  return c;
}

json to_json(const DecayConfig& c) {
  json j;
  j["command"] = "decay";
  write_lattice(j, c.lattice);
  j["measure"] = c.measure_json;
  j["rho"] = c.rho;
  j["times"] = c.times;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["engine"] = c.engine == dynamics::Engine::stirring ? "stirring+thin" : "gillespie";
  j["fit_window"] = {c.fit_window.first, c.fit_window.second};
  return j;
}

ValidateConfig parse_validate(const json& raw, RunSettings& run) {
  Reader r(raw, "validate config");
  check_command(r, "validate");
  read_run_settings(r, run);
  ValidateConfig c;
  const long long side = r.integer("side", c.side);
  if (side < 3) throw ConfigError("side must be >= 3 (got " + std::to_string(side) + ")");
  if (side > 64) throw ConfigError("side is out of range");
  c.side = static_cast<int>(side);
  c.annihilation_rate = r.number("annihilation_rate", c.annihilation_rate);
  if (!(c.annihilation_rate >= 0.0)) throw ConfigError("annihilation_rate must be >= 0");
  c.mc_replicas = positive_count(r, "mc_replicas", c.mc_replicas, 2);
  c.variance_replicas = positive_count(r, "variance_replicas", c.variance_replicas, 2);
  c.seed = r.unsigned64("seed", c.seed);
  r.finish();
  return c;
}

json to_json(const ValidateConfig& c) {
  return json{{"command", "validate"},
              {"side", c.side},
              {"annihilation_rate", c.annihilation_rate},
              {"mc_replicas", c.mc_replicas},
              {"variance_replicas", c.variance_replicas},
              {"seed", c.seed}};
}

SimulateConfig parse_simulate(const json& raw, RunSettings& run) {
  Reader r(raw, "simulate config");
  check_command(r, "simulate");
  read_run_settings(r, run);
  SimulateConfig c;
  c.process = wrap_invalid([&] { return dynamics::parse_process(r.string("process")); });
  c.times = read_times(r);
  c.lattice = read_lattice(r, c.times.back());
  auto [mu, canon] = parse_measure(r.raw("measure"), c.lattice.dimension);
  c.measure = mu;
  c.measure_json = canon;
  c.rho = read_rho(r, c.measure);
  c.replicas = positive_count(r, "replicas", 1, 1);
  c.seed = r.unsigned64("seed", 1);
  c.engine = wrap_invalid([&] { return dynamics::parse_engine(r.string("engine", "gillespie")); });
  r.finish();
  return c;
}

json to_json(const SimulateConfig& c) {
  json j;
  j["command"] = "simulate";
  j["process"] = std::string(dynamics::process_name(c.process));
  write_lattice(j, c.lattice);
  j["measure"] = c.measure_json;
  j["rho"] = c.rho;
  j["times"] = c.times;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["engine"] = std::string(dynamics::engine_name(c.engine));
  return j;
}

OracleCompareConfig parse_oracle_compare(const json& raw, RunSettings& run) {
  Reader r(raw, "oracle-compare config");
  check_command(r, "oracle-compare");
  read_run_settings(r, run);
  OracleCompareConfig c;
  wrap_invalid([&] {
    if (r.has("processes"))
      for (const auto& p : r.raw("processes").get<std::vector<std::string>>()) c.processes.push_back(dynamics::parse_process(p));
    else
      c.processes = {dynamics::Process::sep, dynamics::Process::coupled, dynamics::Process::annihilation,
                     dynamics::Process::free};
    if (r.has("engines"))
      for (const auto& e : r.raw("engines").get<std::vector<std::string>>()) c.engines.push_back(dynamics::parse_engine(e));
    else
      c.engines = {dynamics::Engine::gillespie, dynamics::Engine::stirring};
    return 0;
  });
  if (c.processes.empty() || c.engines.empty()) throw ConfigError("processes and engines must be non-empty");
  const long long side = r.integer("side", c.side);
  if (side < 3) throw ConfigError("side must be >= 3 (got " + std::to_string(side) + ")");
  if (side > 64) throw ConfigError("side is out of range");
  c.side = static_cast<int>(side);
  c.t = r.number("t", c.t);
  if (!(c.t >= 0.0)) throw ConfigError("t must be >= 0");
  c.replicas = positive_count(r, "replicas", c.replicas, 2);
  c.seed = r.unsigned64("seed", c.seed);
  c.annihilation_rate = r.number("annihilation_rate", c.annihilation_rate);
  if (!(c.annihilation_rate >= 0.0)) throw ConfigError("annihilation_rate must be >= 0");
  r.finish();
  return c;
}

json to_json(const OracleCompareConfig& c) {
  json procs = json::array(), engines = json::array();
  for (auto p : c.processes) procs.push_back(std::string(dynamics::process_name(p)));
  for (auto e : c.engines) engines.push_back(std::string(dynamics::engine_name(e)));
  return json{{"command", "oracle-compare"}, {"processes", procs},  {"engines", engines},
              {"side", c.side},              {"t", c.t},            {"replicas", c.replicas},
              {"seed", c.seed},              {"annihilation_rate", c.annihilation_rate}};
}

json read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (!text.empty() && static_cast<unsigned char>(text[0]) == dynamics::kTrajectoryFormatVersion) {
    try {
      return json::parse(dynamics::read_trajectory(path).header_json);
    } catch (const std::exception& e) {
      throw ConfigError("'" + path + "' is not a readable trajectory file: " + e.what());
    }
  }
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const std::string tag = "# config=";
    if (line.rfind(tag, 0) == 0) {
      try {
        return json::parse(line.substr(tag.size()));
      } catch (const json::exception& e) {
        throw ConfigError("bad embedded config in '" + path + "': " + e.what());
      }
    }
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("config_hash")) return j.at("config");
  return j;
}

}  // namespace sep::cli
