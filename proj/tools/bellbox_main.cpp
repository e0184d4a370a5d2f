#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellbox/harness.hpp"
#include "bellbox/version.hpp"

using bellbox::Command;
using bellbox::ExperimentSpec;
using bellbox::OutputFormat;

namespace {

struct Override {
  CLI::Option* option;
  std::function<void(ExperimentSpec&)> apply;
};

struct CliState {
  ExperimentSpec values;      // flag targets
  std::string quad, format;
  std::vector<Override> overrides;
  std::vector<std::pair<CLI::App*, Command>> commands;
};

void add_model_flags(CLI::App* cmd, CliState& st) {
  auto& v = st.values;
  st.overrides.push_back(
      {cmd->add_option("--model", v.model,
                       "lhv-saw | quantum-singlet | superquantum-pr"),
       [&v](ExperimentSpec& s) { s.model = v.model; }});
  st.overrides.push_back(
      {cmd->add_option("--ramp", v.ramp, "smooth-sine | linear"),
       [&v](ExperimentSpec& s) { s.ramp = v.ramp; }});
  st.overrides.push_back(
      {cmd->add_flag("--jam,!--no-jam", v.jam, "wrap the model with jamming"),
       [&v](ExperimentSpec& s) { s.jam = v.jam; }});
  st.overrides.push_back(
      {cmd->add_option("--jam-mode", v.jam_mode, "classical-saw | zero"),
       [&v](ExperimentSpec& s) { s.jam_mode = v.jam_mode; }});
}

void add_execution_flags(CLI::App* cmd, CliState& st) {
  auto& v = st.values;
  st.overrides.push_back(
      {cmd->add_option("--seed", v.seed, "root seed (default 42, never wall-clock)"),
       [&v](ExperimentSpec& s) { s.seed = v.seed; }});
  st.overrides.push_back(
      {cmd->add_option("--threads", v.threads, "worker threads (result-invariant)"),
       [&v](ExperimentSpec& s) { s.threads = v.threads; }});
  st.overrides.push_back(
      {cmd->add_flag("--strict,!--no-strict", v.strict,
                     "exit 3 when an audit or verdict fails"),
       [&v](ExperimentSpec& s) { s.strict = v.strict; }});
  st.overrides.push_back({cmd->add_option("--out", v.out, "output path (default stdout)"),
                          [&v](ExperimentSpec& s) { s.out = v.out; }});
  st.overrides.push_back(
      {cmd->add_option("--format", st.format, "csv | json")->check(CLI::IsMember({"csv", "json"})),
       [&st](ExperimentSpec& s) {
         s.format = st.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
       }});
}

CLI::App* add_command(CLI::App& app, CliState& st, Command command, const char* name,
                      const char* help) {
  CLI::App* cmd = app.add_subcommand(name, help);
  cmd->fallthrough();  // app-level --config may follow the subcommand
  st.commands.emplace_back(cmd, command);
  add_model_flags(cmd, st);
  add_execution_flags(cmd, st);
  return cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bellbox: CHSH correlation models, causality audits, bound optimizers, "
               "and jamming light-cone geometry"};
  app.set_version_flag("--version", bellbox::kVersion);
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override it");

  CliState st;
  auto& v = st.values;

  CLI::App* chsh = add_command(app, st, Command::Chsh, "chsh",
                               "evaluate or estimate the CHSH combination");
  st.overrides.push_back(
      {chsh->add_option("--quad", st.quad, "'canonical' or 'a,a_prime,b,b_prime' radians"),
       [&st](ExperimentSpec& s) { s.quad = st.quad; }});
  st.overrides.push_back(
      {chsh->add_option("--n", v.n, "samples per pair (0 = analytic)"),
       [&v](ExperimentSpec& s) { s.n = v.n; }});

  CLI::App* audit = add_command(app, st, Command::Audit, "audit",
                                "nonsignaling and unary jamming audits");
  st.overrides.push_back(
      {audit->add_option("--audit", v.audit, "nonsignaling | unary"),
       [&v](ExperimentSpec& s) { s.audit = v.audit; }});
  st.overrides.push_back(
      {audit->add_flag("--empirical,!--analytic", v.empirical,
                       "test sampled tallies instead of exact marginals"),
       [&v](ExperimentSpec& s) { s.empirical = v.empirical; }});
  st.overrides.push_back({audit->add_option("--alpha", v.alpha, "significance level"),
                          [&v](ExperimentSpec& s) { s.alpha = v.alpha; }});
  st.overrides.push_back(
      {audit->add_option("--settings", v.settings, "settings per side (empirical)"),
       [&v](ExperimentSpec& s) { s.settings = v.settings; }});
  st.overrides.push_back(
      {audit->add_option("--grid", v.grid, "grid points per axis (analytic)"),
       [&v](ExperimentSpec& s) { s.grid = v.grid; }});
  st.overrides.push_back(
      {audit->add_option("--n", v.n, "samples per setting pair (empirical)"),
       [&v](ExperimentSpec& s) { s.n = v.n; }});

  CLI::App* optimize = add_command(app, st, Command::Optimize, "optimize",
                                   "reproduce the CHSH bounds 2, 2*sqrt(2), 4");
  st.overrides.push_back(
      {optimize->add_option("--method", v.method, "lhv | tsirelson | ns-lp"),
       [&v](ExperimentSpec& s) { s.method = v.method; }});
  st.overrides.push_back(
      {optimize->add_option("--tolerance", v.tolerance, "continuous-search tolerance"),
       [&v](ExperimentSpec& s) { s.tolerance = v.tolerance; }});
  st.overrides.push_back(
      {optimize->add_option("--restarts", v.restarts, "random restarts (tsirelson)"),
       [&v](ExperimentSpec& s) { s.restarts = v.restarts; }});

  CLI::App* jamming = add_command(app, st, Command::Jamming, "jamming",
                                  "spacetime admissibility of jamming configs");
  st.overrides.push_back(
      {jamming->add_option("--dim", v.dim, "spatial dimension (0 = infer)"),
       [&v](ExperimentSpec& s) { s.dim = v.dim; }});
  st.overrides.push_back(
      {jamming->add_option("-a,--a", v.a_events, "Alice event 't,x1[,x2,...]' (repeatable)"),
       [&v](ExperimentSpec& s) { s.a_events = v.a_events; }});
  st.overrides.push_back(
      {jamming->add_option("-b,--b", v.b_events, "Bob event (repeatable)"),
       [&v](ExperimentSpec& s) { s.b_events = v.b_events; }});
  st.overrides.push_back(
      {jamming->add_option("-j,--j", v.j_events, "jammer event (repeatable)"),
       [&v](ExperimentSpec& s) { s.j_events = v.j_events; }});
  st.overrides.push_back(
      {jamming->add_option("--budget", v.budget, "multi-start search budget (d >= 2)"),
       [&v](ExperimentSpec& s) { s.budget = v.budget; }});

  CLI::App* sample = add_command(app, st, Command::Sample, "sample",
                                 "draw outcome pairs at one relative angle");
  st.overrides.push_back(
      {sample->add_option("--theta", v.theta, "relative angle in radians"),
       [&v](ExperimentSpec& s) { s.theta = v.theta; }});
  st.overrides.push_back(
      {sample->add_option("--n", v.n, "number of outcome pairs (default 1000)"),
       [&v](ExperimentSpec& s) { s.n = v.n; }});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ExperimentSpec spec;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config '" << config_path << "'\n";
      return 4;
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
      spec = bellbox::parse_config(text.str());
    } catch (const bellbox::SpecError& ex) {
      std::cerr << "error: " << config_path << ":" << ex.line << ": " << ex.what() << "\n";
      return 2;
    }
  }

  CLI::App* chosen = nullptr;
  for (auto& [cmd, command] : st.commands) {
    if (cmd->parsed()) {
      chosen = cmd;
      spec.command = command;
    }
  }
  if (!chosen && config_path.empty()) {
    std::cerr << app.help();
    return 2;
  }
  if (chosen) {
    for (auto& o : st.overrides)
      if (o.option->count() > 0) o.apply(spec);
  }
  if (spec.command == Command::Sample && spec.n == 0) spec.n = 1000;

  return bellbox::run_to_files(spec);
}
