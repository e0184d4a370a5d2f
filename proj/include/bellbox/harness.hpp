#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellbox/spacetime.hpp"

namespace bellbox {

enum class Command { Chsh, Audit, Optimize, Jamming, Sample };
enum class OutputFormat { Csv, Json };

/// Everything needed to reproduce a run. Round-trips losslessly through
/// the flat key=value config format (parse_config / emit_config).
struct ExperimentSpec {
  Command command = Command::Chsh;

  // model selection
  std::string model = "superquantum-pr";  // lhv-saw | quantum-singlet | superquantum-pr
  std::string ramp = "smooth-sine";       // smooth-sine | linear
  bool jam = false;                       // wrap the model with apply_jamming
  std::string jam_mode = "classical-saw"; // classical-saw | zero

  // chsh / sample parameters
  std::string quad = "canonical";         // or "a,a',b,b'" (radians)
  double theta = 0.78539816339744828;     // sample: relative angle
  long long n = 0;                        // chsh: 0 = analytic; sample: count
  std::uint64_t seed = 42;                // fixed default, never wall-clock

  // audit parameters
  std::string audit = "nonsignaling";     // nonsignaling | unary
  bool empirical = false;
  double alpha = 0.01;
  int settings = 2;                       // settings per side, empirical mode
  int grid = 100;

  // optimize parameters
  std::string method = "lhv";             // lhv | tsirelson | ns-lp
  double tolerance = 1e-6;
  int restarts = 10;

  // jamming parameters: one config per entry across the three lists
  int dim = 0;                            // 0 = infer from the events
  std::vector<std::string> a_events, b_events, j_events;  // "t,x1[,x2,...]"
  int budget = 64;

  // execution
  int threads = 1;
  bool strict = false;
  std::string out;                        // empty = stdout, no manifest
  OutputFormat format = OutputFormat::Json;

  bool operator==(const ExperimentSpec&) const = default;
};

/// Validation failure: names the offending key (and config line if known).
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& msg, int line = 0)
      : std::runtime_error(msg), line(line) {}
  int line;
};

/// Parses a flat key = value document ('#' comments). Unknown keys and
/// duplicate keys are errors; omitted keys take the defaults above.
ExperimentSpec parse_config(const std::string& text);

/// Canonical text form: every key, fixed order, normalized values.
/// parse_config(emit_config(s)) == s for any valid spec.
std::string emit_config(const ExperimentSpec& spec);

struct RunManifest {
  std::string artifact_version;
  std::string config;        // emit_config of the executed spec
  double duration_seconds;
  std::string summary_json;  // headline numbers of the run
};

struct RunResult {
  std::string text;          // result document (CSV or JSON per spec.format)
  RunManifest manifest;
  bool verdict_failed = false;  // audit failed / binary condition violated
};

/// Executes one experiment. Identical specs produce byte-identical `text`
/// regardless of thread count. Throws SpecError on invalid fields.
RunResult run(const ExperimentSpec& spec);

/// run() plus file emission: result to spec.out (stdout if empty) and a
/// manifest to <out>.manifest.json, written atomically. Returns the
/// process exit code: 0 ok, 2 validation, 3 strict verdict failure,
/// 4 I/O failure.
int run_to_files(const ExperimentSpec& spec);

/// %.17g, the fixed numeric format of every emitted file.
std::string format_double(double v);

/// Parses "t,x1[,x2,...]" into an event. Used by the CLI and config files.
Event parse_event(const std::string& text);
std::string emit_event(const Event& e);

}  // namespace bellbox
