// mlapprox: schedules, bounds, single runs and replicated studies from a
// config file plus command-line overrides.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mlapprox/approximation.hpp"
#include "mlapprox/config.hpp"
#include "mlapprox/csv.hpp"
#include "mlapprox/experiment.hpp"
#include "mlapprox/integration.hpp"
#include "mlapprox/spectral_model.hpp"

namespace {

using namespace mlapprox;

// Flags that map one-to-one onto config keys.
const std::vector<std::pair<std::string, std::string>> kOverrideFlags{
    {"--spec", "spec"},
    {"--r", "r"},
    {"--d", "d"},
    {"--angular", "angular"},
    {"--sigma", "sigma"},
    {"--factors", "factors"},
    {"--N", "N"},
    {"--algorithm", "algorithm"},
    {"--order", "order"},
    {"--epsilon", "epsilon"},
    {"--n-grid", "n_grid"},
    {"--replications", "replications"},
    {"--seed", "seed"},
    {"--threads", "threads"},
    {"--target", "target"},
    {"--target-size", "target_size"},
    {"--target-file", "target_file"},
    {"--out", "out"},
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;  // config key -> flag value
  std::vector<std::pair<std::string, CLI::Option*>> options;
};

void add_common(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_path, "config file of `key = value` lines");
  for (const auto& [flag, key] : kOverrideFlags)
    cmd.options.emplace_back(key, cmd.app->add_option(flag, cmd.values[key], "overrides config key " + key));
}

Settings gather_settings(const Command& cmd) {
  Settings settings;
  if (!cmd.config_path.empty()) {
    std::ifstream in(cmd.config_path);
    if (!in) throw ConfigError("config", "cannot open '" + cmd.config_path + "'");
    settings = read_settings(in);
  }
  for (const auto& [key, opt] : cmd.options)
    if (opt->count() > 0) settings[key] = cmd.values.at(key);
  return settings;
}

// Runs `emit` against the configured output file, or stdout when none.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ostringstream buffer;
  emit(buffer);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot open '" + path + "' for writing");
  out << buffer.str();
  out.close();
  if (!out) throw ConfigError("out", "failed writing '" + path + "'");
}

std::string tuple_of(const auto& values) {
  std::string s = "(";
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
  return s + ")";
}

ErrorBound epsilon_for(const ExperimentConfig& cfg, std::shared_ptr<const SpectralBasis> basis) {
  if (!cfg.epsilon_table.empty())
    return [table = cfg.epsilon_table](std::size_t m) { return table.at(m); };
  return [basis](std::size_t m) {
    const double s = basis->sigma(m + 1);
    return s * s;
  };
}

void cmd_schedule(const ExperimentConfig& cfg, const CLI::Option* n_opt, std::uint64_t n, const CLI::Option* m_opt,
                  std::size_t m) {
  const auto basis = enumerate_basis(cfg.spec, cfg.N);
  Schedule schedule;
  if (m_opt->count() > 0) {
    if (cfg.epsilon_table.empty() && basis->size() < m + 1)
      throw ConfigError("N", "sigma(m+1) needs a basis of at least " + std::to_string(m + 1) + " entries");
    schedule = schedule_q_m(epsilon_for(cfg, basis), m);
  } else if (n_opt->count() > 0) {
    schedule = schedule_a_n_r(n, cfg.algorithm_order(), basis->size());
  } else {
    throw ConfigError("n", "schedule needs --n (A_n^r) or --m (Q_m)");
  }
  with_output(cfg.out, [&](std::ostream& out) {
    write_schedule_csv(out, schedule);
    out << "# n=" << tuple_of(schedule.n_levels) << '\n';
    out << "# m=" << tuple_of(schedule.m_levels) << '\n';
    out << "# total_evaluations=" << schedule.total_evaluations() << '\n';
  });
}

void cmd_bound(const ExperimentConfig& cfg, const CLI::Option* n_opt, std::uint64_t n) {
  if (n_opt->count() == 0) throw ConfigError("n", "bound needs --n");
  const double r = cfg.algorithm_order();
  const int d = cfg.spec.d;
  const auto c = bound_constants(r);
  const double nd = static_cast<double>(n);
  with_output(cfg.out, [&](std::ostream& out) {
    out << "r=" << format_double(r) << '\n';
    out << "d=" << d << '\n';
    out << "n=" << n << '\n';
    out << "ell_r=" << format_double(c.ell_r) << '\n';
    out << "c_r=" << format_double(c.c_r) << '\n';
    out << "cbar_r=" << format_double(c.cbar_r) << '\n';
    out << "ctilde_r=" << format_double(c.ctilde_r) << '\n';
    out << "preasymptotic_exponent=" << format_double(preasymptotic_exponent(r, d)) << '\n';
    out << "approx_bound=" << format_double(approx_bound(nd, r, d)) << '\n';
    out << "integration_constant=" << format_double(integration_constant(r, d)) << '\n';
    out << "integration_bound=" << format_double(integration_bound(nd, r, d)) << '\n';
    out << "direct_simulation_bound=" << format_double(direct_simulation_bound(nd)) << '\n';
  });
}

void cmd_approx(const ExperimentConfig& cfg, std::uint64_t n) {
  const Approximant result = single_run(cfg, n);
  with_output(cfg.out, [&](std::ostream& out) { write_approximant_csv(out, result); });
}

void cmd_integrate(const ExperimentConfig& cfg) {
  const auto records = run_integration_comparison(cfg);
  with_output(cfg.out, [&](std::ostream& out) { write_integration_records(out, records); });
}

void cmd_converge(const ExperimentConfig& cfg) {
  const auto records = run_convergence(cfg);
  with_output(cfg.out, [&](std::ostream& out) { write_run_records(out, records); });
}

void cmd_sigma(const ExperimentConfig& cfg) {
  const auto basis = enumerate_basis(cfg.spec, cfg.N);
  with_output(cfg.out, [&](std::ostream& out) { write_basis_csv(out, *basis); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel Monte Carlo approximation and integration experiments"};
  app.name("mlapprox");
  app.require_subcommand(1);

  std::map<std::string, Command> commands;
  const std::vector<std::pair<std::string, std::string>> names{
      {"schedule", "print the level schedule of A_n^r (--n) or Q_m (--m)"},
      {"bound", "print bound constants and error bounds for n, r, d"},
      {"approx", "run one approximation and emit its coefficients"},
      {"integrate", "compare Q_2n^r with direct simulation over replications"},
      {"converge", "replicated error study over the n grid"},
      {"sigma", "emit the first N singular values and frequencies"},
  };
  for (const auto& [name, help] : names) {
    Command& cmd = commands[name];
    cmd.app = app.add_subcommand(name, help);
    add_common(cmd);
  }

  std::uint64_t n = 0;
  std::size_t m = 0;
  CLI::Option* schedule_n = commands["schedule"].app->add_option("--n", n, "budget of A_n^r");
  CLI::Option* schedule_m = commands["schedule"].app->add_option("--m", m, "target size m = 2^k of Q_m");
  CLI::Option* bound_n = commands["bound"].app->add_option("--n", n, "number of function values");
  commands["approx"].app->add_option("--n", n, "budget n (A_n^r) or m (Q_m)")->required();

  if (argc > 1 && argv[1][0] != '-' && !commands.count(argv[1])) {
    std::cerr << "mlapprox: error: unknown subcommand '" << argv[1] << "'\n";
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "mlapprox: error: " << e.what() << '\n';
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Settings settings = gather_settings(commands.at(name));
    if (name == "approx") settings["n_grid"] = std::to_string(n);
    const ExperimentConfig cfg = make_config(settings);
    if (name == "schedule") cmd_schedule(cfg, schedule_n, n, schedule_m, m);
    else if (name == "bound") cmd_bound(cfg, bound_n, n);
    else if (name == "approx") cmd_approx(cfg, n);
    else if (name == "integrate") cmd_integrate(cfg);
    else if (name == "converge") cmd_converge(cfg);
    else if (name == "sigma") cmd_sigma(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "mlapprox: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mlapprox: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
