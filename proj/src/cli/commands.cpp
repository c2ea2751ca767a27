#include "sep/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "sep/dynamics/trajectory_io.hpp"
#include "sep/metrics/checks.hpp"
#include "sep/metrics/estimators.hpp"
#include "sep/metrics/fit.hpp"
#include "sep/oracle/generator.hpp"

namespace sep::cli {

namespace {

std::filesystem::path prepare_out(const RunSettings& run) {
  std::filesystem::path dir(run.out.empty() ? "." : run.out);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json fit_json(const metrics::DecayFit& f) {
  return json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"half_width", f.half_width},
              {"used_times", f.used_times},
              {"dropped_times", f.dropped_times},
              {"method", f.method}};
}

metrics::FarmOptions farm_of(const RunSettings& run) { return metrics::FarmOptions{run.workers, false}; }

}  // namespace

int cmd_decay(const DecayConfig& c, const RunSettings& run, std::ostream& log) {
  const json resolved = to_json(c);
  const auto lattice = c.lattice.lattice();
  const auto diff = ensembles::make_diff_law(c.measure, c.rho);
  const auto series = metrics::dbar_bound_series(diff, lattice, c.times, c.replicas, c.seed, c.engine, farm_of(run));

  std::optional<metrics::DecayFit> fit, trend;
  std::string fit_error, trend_error;
  try {
    fit = metrics::fit_decay_exponent(series, c.fit_window.first, c.fit_window.second);
  } catch (const std::invalid_argument& e) {
    fit_error = e.what();
  }
  try {
    trend = metrics::fit_ratio_trend(series);
  } catch (const std::invalid_argument& e) {
    trend_error = e.what();
  }

  std::string csv;
  csv += "# sep_ergo decay: discrepancy density E|xi_0(t)| as an upper bound on dbar(mu P_t, pi_rho)\n";
  csv += "# config=" + resolved.dump() + "\n";
  csv += "# config_hash=" + config_hash(resolved) + "\n";
  csv += "# seed=" + std::to_string(c.seed) + "\n";
  csv += "time,estimate,stderr,replicas,ratio_to_envelope\n";
  json rows = json::array();
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    csv += format_double(series.times[k]) + "," + format_double(series.estimate[k]) + "," +
           format_double(series.stderr_[k]) + "," + std::to_string(series.replicas) + "," +
           format_double(series.ratio[k]) + "\n";
    rows.push_back(json{{"time", series.times[k]},
                        {"estimate", series.estimate[k]},
                        {"stderr", series.stderr_[k]},
                        {"replicas", series.replicas},
                        {"ratio_to_envelope", series.ratio[k]}});
  }

  json report{{"config", resolved},
              {"config_hash", config_hash(resolved)},
              {"label", series.label},
              {"seed", c.seed},
              {"lattice", series.lattice},
              {"measure", series.measure},
              {"rho", series.rho},
              {"engine", series.engine},
              {"A", series.A},
              {"B", series.B},
              {"gamma", series.gamma},
              {"envelope", "C sqrt(A) / t^gamma with C unspecified; ratio_to_envelope = estimate t^gamma / sqrt(A)"},
              {"rows", rows}};
  report["fit"] = fit ? fit_json(*fit) : json{{"error", fit_error}};
  if (fit) {
    report["fit"]["window"] = {c.fit_window.first, c.fit_window.second};
    report["fit"]["theory_slope"] = -series.gamma;
  }
  report["ratio_trend"] = trend ? fit_json(*trend) : json{{"error", trend_error}};

  const auto dir = prepare_out(run);
  write_file(dir / "decay.csv", csv);
  write_file(dir / "decay.json", report.dump(2) + "\n");

  log << "decay: " << series.lattice << ", " << series.measure << ", " << series.replicas << " replicas, engine "
      << series.engine << "\n";
  for (std::size_t k = 0; k < series.times.size(); ++k)
    log << "  t=" << series.times[k] << "  E|xi0|=" << series.estimate[k] << " +/- " << series.stderr_[k]
        << "  ratio=" << series.ratio[k] << "\n";
  if (fit)
    log << "  fitted slope " << fit->slope << " +/- " << fit->half_width << " (theory " << -series.gamma << ")\n";
  else
    log << "  fit unavailable: " << fit_error << "\n";
  log << "  wrote " << (dir / "decay.csv").string() << " and " << (dir / "decay.json").string() << "\n";
  return kOk;
}

int cmd_validate(const ValidateConfig& c, const RunSettings& run, std::ostream& log) {
  const json resolved = to_json(c);
  metrics::ValidationOptions opts;
  opts.side = c.side;
  opts.annihilation_rate = c.annihilation_rate;
  opts.mc_replicas = c.mc_replicas;
  opts.variance_replicas = c.variance_replicas;
  opts.seed = c.seed;
  opts.farm = farm_of(run);
  const auto reports = metrics::run_validation_suite(opts);

  json checks = json::array(), failures = json::array();
  for (const auto& r : reports) {
    checks.push_back(oracle::to_json(r));
    log << (r.pass ? "PASS " : "FAIL ") << r.check << " [" << r.lattice << ", t=" << r.t << "] statistic=" << r.statistic
        << " tolerance=" << r.tolerance << "\n";
    if (!r.pass) failures.push_back(r.check + " [" + r.lattice + ", t=" + format_double(r.t) + "]");
  }
  const json report{{"config", resolved},
                    {"config_hash", config_hash(resolved)},
                    {"checks", checks},
                    {"failures", failures},
                    {"pass", failures.empty()}};
  const auto dir = prepare_out(run);
  write_file(dir / "validate.json", report.dump(2) + "\n");
  if (!failures.empty()) {
    log << failures.size() << " check(s) failed:\n";
    for (const auto& f : failures) log << "  " << f.get<std::string>() << "\n";
    return kCheckFailed;
  }
  log << "all " << reports.size() << " checks passed\n";
  return kOk;
}

int cmd_simulate(const SimulateConfig& c, const RunSettings& run, std::ostream& log) {
  using dynamics::Process;
  const json resolved = to_json(c);
  const auto lattice = c.lattice.lattice();
  const auto diff = ensembles::make_diff_law(c.measure, c.rho);
  const auto dir = prepare_out(run);
  const auto path = dir / "trajectory.bin";

  auto initial = [&](Seed s) -> dynamics::AnyState {
    switch (c.process) {
      case Process::sep: return ensembles::sample(c.measure, lattice, s);
      case Process::coupled:
        return CoupledConfig{ensembles::sample(c.measure, lattice, substream(s, 1)),
                             ensembles::sample(ensembles::make_bernoulli(c.rho), lattice, substream(s, 2))};
      case Process::annihilation: return ensembles::sample_diff(diff, lattice, s);
      case Process::free: return to_two_species(ensembles::sample_diff(diff, lattice, s));
    }
    throw std::invalid_argument("unknown process");
  };

  const auto trajectories = metrics::farm(c.replicas, farm_of(run), [&](std::size_t i) {
    const Seed r = replica_seed(c.seed, i);
    return dynamics::run_process(c.process, c.engine, initial(substream(r, 0x10)), c.times.back(), c.times,
                                 substream(r, 0x20));
  });

  dynamics::TrajectoryWriter writer(path.string(), resolved.dump());
  for (std::size_t i = 0; i < trajectories.size(); ++i)
    for (const auto& snap : trajectories[i])
      writer.write(static_cast<std::uint32_t>(i), snap.time, dynamics::encode_state(snap.config));
  log << "simulate: " << dynamics::process_name(c.process) << " on " << lattice.describe() << ", " << c.replicas
      << " replica(s), " << c.times.size() << " snapshot(s) each, engine " << dynamics::engine_name(c.engine) << "\n"
      << "  wrote " << path.string() << "\n";
  return kOk;
}

int cmd_oracle_compare(const OracleCompareConfig& c, const RunSettings& run, std::ostream& log) {
  const json resolved = to_json(c);
  const TorusLattice ring(1, c.side);
  const oracle::GeneratorOptions gopts{c.annihilation_rate};
  json checks = json::array(), failures = json::array();
  std::uint64_t k = 0;
  for (auto p : c.processes)
    for (auto e : c.engines) {
      const auto r = metrics::check_mc_vs_oracle(p, e, ring, metrics::reference_state(p, ring), c.t, c.replicas,
                                                 substream(c.seed, ++k), farm_of(run), gopts);
      checks.push_back(oracle::to_json(r));
      log << (r.pass ? "PASS " : "FAIL ") << r.check << " [" << r.lattice << ", t=" << r.t
          << "] worst normalised deviation=" << r.statistic << "\n";
      if (!r.pass) failures.push_back(r.check);
    }
  const json report{{"config", resolved},
                    {"config_hash", config_hash(resolved)},
                    {"checks", checks},
                    {"failures", failures},
                    {"pass", failures.empty()}};
  const auto dir = prepare_out(run);
  write_file(dir / "oracle_compare.json", report.dump(2) + "\n");
  return failures.empty() ? kOk : kCheckFailed;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Exclusion-process ergodicity experiments"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
  } flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "experiment config (JSON, or any output file of this tool)");
    sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
    sub->add_option("--workers", flags.workers, "worker threads (0 = all); env SEP_ERGO_WORKERS is the fallback")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", flags.out, "output directory");
  };
  auto* decay = app.add_subcommand("decay", "discrepancy decay series, dbar upper bound and slope fit");
  auto* validate = app.add_subcommand("validate", "pinned oracle and property suite");
  auto* simulate = app.add_subcommand("simulate", "simulate one process and write snapshots");
  auto* compare = app.add_subcommand("oracle-compare", "Monte Carlo laws vs exact laws on a small ring");
  for (auto* s : {decay, validate, simulate, compare}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    json raw = flags.config.empty() ? json::object() : read_config_file(flags.config);
    if (!raw.is_object()) throw ConfigError("config must be a JSON object");
    if (flags.seed) raw["seed"] = *flags.seed;

    RunSettings run;
    auto finish_run = [&] {
      if (const char* env = std::getenv("SEP_ERGO_WORKERS"); env && *env) {
        try {
          const int w = std::stoi(env);
          if (w < 0) throw std::invalid_argument("negative");
          run.workers = w;
        } catch (const std::exception&) {
          throw ConfigError(std::string("SEP_ERGO_WORKERS must be a non-negative integer, got '") + env + "'");
        }
      }
      if (flags.workers) run.workers = *flags.workers;
      if (flags.out) run.out = *flags.out;
    };

    if (decay->parsed()) {
      const auto c = parse_decay(raw, run);
      finish_run();
      return cmd_decay(c, run, std::cout);
    }
    if (validate->parsed()) {
      const auto c = parse_validate(raw, run);
      finish_run();
      return cmd_validate(c, run, std::cout);
    }
    if (simulate->parsed()) {
      const auto c = parse_simulate(raw, run);
      finish_run();
      return cmd_simulate(c, run, std::cout);
    }
    const auto c = parse_oracle_compare(raw, run);
    finish_run();
    return cmd_oracle_compare(c, run, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const oracle::ResourceLimit& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kResourceCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace sep::cli
