#include "bellbox/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "bellbox/audit.hpp"
#include "bellbox/chsh.hpp"
#include "bellbox/correlation.hpp"
#include "bellbox/optimize.hpp"
#include "bellbox/version.hpp"

namespace bellbox {

namespace {

// ---------------------------------------------------------------------------
// formatting primitives (fixed emitted-byte discipline)
// ---------------------------------------------------------------------------

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string jstr(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string csv_join(const std::vector<std::string>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ",";
    out += csv_escape(row[i]);
  }
  out += "\n";
  return out;
}

std::string jbool(bool b) { return b ? "true" : "false"; }

std::string event_json(const Event& e) {
  std::string out = "[" + format_double(e.t);
  for (double c : e.x) out += "," + format_double(c);
  return out + "]";
}

// ---------------------------------------------------------------------------
// spec parsing / emission
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v, int line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
    throw SpecError("key '" + key + "': expected a finite number, got '" + v + "'", line);
  return x;
}

long long parse_integer(const std::string& key, const std::string& v, int line) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    throw SpecError("key '" + key + "': expected an integer, got '" + v + "'", line);
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v, int line) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || v.front() == '-')
    throw SpecError("key '" + key + "': expected an unsigned integer, got '" + v + "'",
                    line);
  return x;
}

bool parse_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw SpecError("key '" + key + "': expected true or false, got '" + v + "'", line);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() == 1 && parts.front().empty()) parts.clear();
  return parts;
}

std::vector<std::string> normalize_events(const std::string& key, const std::string& v,
                                          int line) {
  std::vector<std::string> out;
  for (const auto& part : split(v, ';')) {
    try {
      out.push_back(emit_event(parse_event(part)));
    } catch (const std::exception& ex) {
      throw SpecError("key '" + key + "': " + ex.what(), line);
    }
  }
  return out;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Chsh: return "chsh";
    case Command::Audit: return "audit";
    case Command::Optimize: return "optimize";
    case Command::Jamming: return "jamming";
    case Command::Sample: return "sample";
  }
  return "?";
}

Command parse_command(const std::string& v, int line) {
  if (v == "chsh") return Command::Chsh;
  if (v == "audit") return Command::Audit;
  if (v == "optimize") return Command::Optimize;
  if (v == "jamming") return Command::Jamming;
  if (v == "sample") return Command::Sample;
  throw SpecError("key 'command': unknown command '" + v + "'", line);
}

std::string normalize_quad(const std::string& key, const std::string& v, int line) {
  if (v == "canonical") return v;
  const auto parts = split(v, ',');
  if (parts.size() != 4)
    throw SpecError("key '" + key + "': expected 'canonical' or four comma-separated angles",
                    line);
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i) out += ",";
    out += format_double(parse_number(key, parts[i], line));
  }
  return out;
}

void check_choice(const std::string& key, const std::string& v,
                  std::initializer_list<const char*> allowed, int line = 0) {
  for (const char* ok : allowed)
    if (v == ok) return;
  std::string msg = "key '" + key + "': invalid value '" + v + "' (expected one of";
  for (const char* ok : allowed) msg += std::string(" ") + ok;
  throw SpecError(msg + ")", line);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Event parse_event(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() < 2)
    throw std::invalid_argument("event needs 't,x1[,x2,...]', got '" + text + "'");
  auto number = [](const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
      throw std::invalid_argument("event coordinate '" + v + "' is not a finite number");
    return x;
  };
  Event e;
  e.t = number(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) e.x.push_back(number(parts[i]));
  return e;
}

std::string emit_event(const Event& e) {
  std::string out = format_double(e.t);
  for (double c : e.x) out += "," + format_double(c);
  return out;
}

ExperimentSpec parse_config(const std::string& text) {
  ExperimentSpec spec;
  std::map<std::string, int> seen;

  using Handler = std::function<void(const std::string&, int)>;
  const std::map<std::string, Handler> handlers = {
      {"command", [&](const std::string& v, int ln) { spec.command = parse_command(v, ln); }},
      {"model",
       [&](const std::string& v, int ln) {
         check_choice("model", v, {"lhv-saw", "quantum-singlet", "superquantum-pr"}, ln);
         spec.model = v;
       }},
      {"ramp",
       [&](const std::string& v, int ln) {
         check_choice("ramp", v, {"smooth-sine", "linear"}, ln);
         spec.ramp = v;
       }},
      {"jam", [&](const std::string& v, int ln) { spec.jam = parse_bool("jam", v, ln); }},
      {"jam_mode",
       [&](const std::string& v, int ln) {
         check_choice("jam_mode", v, {"classical-saw", "zero"}, ln);
         spec.jam_mode = v;
       }},
      {"quad",
       [&](const std::string& v, int ln) { spec.quad = normalize_quad("quad", v, ln); }},
      {"theta",
       [&](const std::string& v, int ln) { spec.theta = parse_number("theta", v, ln); }},
      {"n", [&](const std::string& v, int ln) { spec.n = parse_integer("n", v, ln); }},
      {"seed", [&](const std::string& v, int ln) { spec.seed = parse_u64("seed", v, ln); }},
      {"audit",
       [&](const std::string& v, int ln) {
         check_choice("audit", v, {"nonsignaling", "unary"}, ln);
         spec.audit = v;
       }},
      {"empirical",
       [&](const std::string& v, int ln) { spec.empirical = parse_bool("empirical", v, ln); }},
      {"alpha",
       [&](const std::string& v, int ln) { spec.alpha = parse_number("alpha", v, ln); }},
      {"settings",
       [&](const std::string& v, int ln) {
         spec.settings = static_cast<int>(parse_integer("settings", v, ln));
       }},
      {"grid",
       [&](const std::string& v, int ln) {
         spec.grid = static_cast<int>(parse_integer("grid", v, ln));
       }},
      {"method",
       [&](const std::string& v, int ln) {
         check_choice("method", v, {"lhv", "tsirelson", "ns-lp"}, ln);
         spec.method = v;
       }},
      {"tolerance",
       [&](const std::string& v, int ln) { spec.tolerance = parse_number("tolerance", v, ln); }},
      {"restarts",
       [&](const std::string& v, int ln) {
         spec.restarts = static_cast<int>(parse_integer("restarts", v, ln));
       }},
      {"dim",
       [&](const std::string& v, int ln) {
         spec.dim = static_cast<int>(parse_integer("dim", v, ln));
       }},
      {"a", [&](const std::string& v, int ln) { spec.a_events = normalize_events("a", v, ln); }},
      {"b", [&](const std::string& v, int ln) { spec.b_events = normalize_events("b", v, ln); }},
      {"j", [&](const std::string& v, int ln) { spec.j_events = normalize_events("j", v, ln); }},
      {"budget",
       [&](const std::string& v, int ln) {
         spec.budget = static_cast<int>(parse_integer("budget", v, ln));
       }},
      {"threads",
       [&](const std::string& v, int ln) {
         spec.threads = static_cast<int>(parse_integer("threads", v, ln));
       }},
      {"strict",
       [&](const std::string& v, int ln) { spec.strict = parse_bool("strict", v, ln); }},
      {"out", [&](const std::string& v, int) { spec.out = v; }},
      {"format",
       [&](const std::string& v, int ln) {
         check_choice("format", v, {"csv", "json"}, ln);
         spec.format = v == "csv" ? OutputFormat::Csv : OutputFormat::Json;
       }},
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw SpecError("unknown key '" + key + "'", line_no);
    if (seen.count(key))
      throw SpecError("duplicate key '" + key + "' (first at line " +
                          std::to_string(seen[key]) + ")",
                      line_no);
    seen[key] = line_no;
    it->second(value, line_no);
  }
  return spec;
}

std::string emit_config(const ExperimentSpec& spec) {
  auto join_events = [](const std::vector<std::string>& events) {
    std::string out;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (i) out += "; ";
      out += events[i];
    }
    return out;
  };
  std::string out;
  out += std::string("command = ") + command_name(spec.command) + "\n";
  out += "model = " + spec.model + "\n";
  out += "ramp = " + spec.ramp + "\n";
  out += std::string("jam = ") + jbool(spec.jam) + "\n";
  out += "jam_mode = " + spec.jam_mode + "\n";
  out += "quad = " + spec.quad + "\n";
  out += "theta = " + format_double(spec.theta) + "\n";
  out += "n = " + std::to_string(spec.n) + "\n";
  out += "seed = " + std::to_string(spec.seed) + "\n";
  out += "audit = " + spec.audit + "\n";
  out += std::string("empirical = ") + jbool(spec.empirical) + "\n";
  out += "alpha = " + format_double(spec.alpha) + "\n";
  out += "settings = " + std::to_string(spec.settings) + "\n";
  out += "grid = " + std::to_string(spec.grid) + "\n";
  out += "method = " + spec.method + "\n";
  out += "tolerance = " + format_double(spec.tolerance) + "\n";
  out += "restarts = " + std::to_string(spec.restarts) + "\n";
  out += "dim = " + std::to_string(spec.dim) + "\n";
  out += "a = " + join_events(spec.a_events) + "\n";
  out += "b = " + join_events(spec.b_events) + "\n";
  out += "j = " + join_events(spec.j_events) + "\n";
  out += "budget = " + std::to_string(spec.budget) + "\n";
  out += "threads = " + std::to_string(spec.threads) + "\n";
  out += std::string("strict = ") + jbool(spec.strict) + "\n";
  out += "out = " + spec.out + "\n";
  out += std::string("format = ") + (spec.format == OutputFormat::Csv ? "csv" : "json") +
         "\n";
  return out;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

namespace {

CorrelationModel build_model(const ExperimentSpec& spec) {
  const RampKind ramp = spec.ramp == "linear" ? RampKind::Linear : RampKind::SmoothSine;
  CorrelationModel model = CorrelationModel::lhv_saw();
  if (spec.model == "lhv-saw") model = CorrelationModel::lhv_saw();
  else if (spec.model == "quantum-singlet") model = CorrelationModel::quantum_singlet();
  else if (spec.model == "superquantum-pr") model = CorrelationModel::superquantum_pr(ramp);
  else throw SpecError("key 'model': unknown model '" + spec.model + "'");
  if (spec.jam) {
    const JamMode mode = spec.jam_mode == "zero" ? JamMode::Zero : JamMode::ClassicalSaw;
    model = apply_jamming(model, mode);
  }
  return model;
}

SettingsQuad build_quad(const ExperimentSpec& spec) {
  if (spec.quad == "canonical") return canonical_quad();
  const auto parts = split(spec.quad, ',');
  if (parts.size() != 4)
    throw SpecError("key 'quad': expected 'canonical' or 'a,a_prime,b,b_prime'");
  return {parse_number("quad", parts[0], 0), parse_number("quad", parts[1], 0),
          parse_number("quad", parts[2], 0), parse_number("quad", parts[3], 0)};
}

std::string model_json_fields(const ExperimentSpec& spec) {
  return "\"model\":" + jstr(spec.model) + ",\"ramp\":" + jstr(spec.ramp) +
         ",\"jam\":" + jbool(spec.jam) + ",\"jam_mode\":" + jstr(spec.jam_mode);
}

struct Document {
  std::string json;
  std::string csv;
  std::string summary_json;
  bool verdict_failed = false;
};

Document run_chsh(const ExperimentSpec& spec) {
  const CorrelationModel model = build_model(spec);
  const SettingsQuad quad = build_quad(spec);
  if (spec.n < 0) throw SpecError("key 'n': must be >= 0");
  const bool empirical = spec.n > 0;
  const ChshReport report = empirical
                                ? chsh_estimate(model, quad, spec.n, spec.seed, spec.threads)
                                : chsh_value(model, quad);

  std::string terms_json;
  std::vector<std::string> csv_rows;
  for (const auto& t : report.terms) {
    const double contribution = t.sign * t.correlation;
    if (!terms_json.empty()) terms_json += ",";
    terms_json += "{\"term\":" + jstr(t.name) +
                  ",\"relative_angle\":" + format_double(t.relative_angle) +
                  ",\"correlation\":" + format_double(t.correlation) +
                  ",\"contribution\":" + format_double(contribution) + "}";
    csv_rows.push_back(csv_join({t.name, format_double(t.relative_angle),
                                 format_double(t.correlation), format_double(contribution),
                                 ""}));
  }

  Document doc;
  doc.json = "{\"command\":\"chsh\"," + model_json_fields(spec) +
             ",\"quad\":{\"a\":" + format_double(quad.a) +
             ",\"a_prime\":" + format_double(quad.a_prime) +
             ",\"b\":" + format_double(quad.b) +
             ",\"b_prime\":" + format_double(quad.b_prime) + "}" +
             ",\"terms\":[" + terms_json + "],\"value\":" + format_double(report.value);
  doc.csv = csv_join({"term", "relative_angle", "correlation", "contribution", "total"});
  for (const auto& row : csv_rows) doc.csv += row;
  doc.csv += csv_join({"total", "", "", "", format_double(report.value)});
  if (empirical) {
    doc.json += ",\"n_per_pair\":" + std::to_string(*report.n_per_pair) +
                ",\"standard_error\":" + format_double(*report.standard_error);
    doc.csv += csv_join({"n_per_pair", "", "", "", std::to_string(*report.n_per_pair)});
    doc.csv += csv_join({"standard_error", "", "", "", format_double(*report.standard_error)});
  }
  doc.json += "}\n";
  doc.summary_json = "{\"value\":" + format_double(report.value) + "}";
  return doc;
}

Document run_audit(const ExperimentSpec& spec) {
  if (spec.grid < 2) throw SpecError("key 'grid': must be >= 2");
  const CorrelationModel model = build_model(spec);

  AuditReport report{};
  std::string extra_json;
  if (spec.audit == "unary") {
    if (spec.jam)
      throw SpecError("key 'jam': unary audit jams internally; pass the unjammed model");
    const JamMode mode = spec.jam_mode == "zero" ? JamMode::Zero : JamMode::ClassicalSaw;
    report = unary_audit(model, apply_jamming(model, mode), spec.grid);
  } else if (spec.empirical) {
    if (spec.n < 1) throw SpecError("key 'n': empirical audit needs n >= 1 samples per pair");
    if (spec.settings < 2) throw SpecError("key 'settings': must be >= 2");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
      throw SpecError("key 'alpha': must be in (0, 1)");
    std::vector<double> locals(spec.settings), remotes(spec.settings);
    for (int i = 0; i < spec.settings; ++i) {
      locals[i] = std::numbers::pi * i / spec.settings;
      remotes[i] = std::numbers::pi * (i + 0.5) / spec.settings;
    }
    const auto ta = tally_party_outcomes(model, locals, remotes,
                                         static_cast<std::uint64_t>(spec.n), spec.seed,
                                         Party::A, spec.threads);
    const auto tb = tally_party_outcomes(model, locals, remotes,
                                         static_cast<std::uint64_t>(spec.n), spec.seed + 1,
                                         Party::B, spec.threads);
    const AuditReport ra = nonsignaling_audit_empirical(ta, spec.alpha);
    const AuditReport rb = nonsignaling_audit_empirical(tb, spec.alpha);
    report = ra.max_deviation >= rb.max_deviation ? ra : rb;
    report.worst_case = std::string("party=") +
                        (ra.max_deviation >= rb.max_deviation ? "A " : "B ") +
                        report.worst_case;
    report.passed = ra.passed && rb.passed;
    extra_json = ",\"alpha\":" + format_double(spec.alpha) +
                 ",\"n_per_pair\":" + std::to_string(spec.n) +
                 ",\"settings\":" + std::to_string(spec.settings);
  } else {
    report = nonsignaling_audit_analytic(model, spec.grid);
  }

  const char* mode = report.mode == AuditMode::Analytic ? "analytic" : "empirical";
  Document doc;
  doc.json = "{\"command\":\"audit\",\"audit\":" + jstr(spec.audit) +
             ",\"mode\":" + jstr(mode) + "," + model_json_fields(spec) +
             ",\"grid\":" + std::to_string(spec.grid) + extra_json +
             ",\"passed\":" + jbool(report.passed) +
             ",\"max_deviation\":" + format_double(report.max_deviation) +
             ",\"threshold\":" + format_double(report.threshold) +
             ",\"worst_case\":" + jstr(report.worst_case) + "}\n";
  doc.csv = csv_join({"audit", "mode", "passed", "max_deviation", "threshold", "worst_case"});
  doc.csv += csv_join({spec.audit, mode, jbool(report.passed),
                       format_double(report.max_deviation), format_double(report.threshold),
                       report.worst_case});
  doc.summary_json = "{\"passed\":" + std::string(jbool(report.passed)) +
                     ",\"max_deviation\":" + format_double(report.max_deviation) + "}";
  doc.verdict_failed = !report.passed;
  return doc;
}

std::string strategy_string(const DeterministicStrategy& s) {
  auto sgn = [](int v) { return v > 0 ? "+1" : "-1"; };
  return std::string("a=") + sgn(s.a) + " a'=" + sgn(s.a_prime) + " b=" + sgn(s.b) +
         " b'=" + sgn(s.b_prime);
}

Document run_optimize(const ExperimentSpec& spec) {
  Document doc;
  std::string method_fields;
  std::string argmax_csv;
  std::string min_value_csv;
  OptimumReport report;

  if (spec.method == "lhv") {
    report = lhv_max_chsh();
    const auto& s = *report.strategy;
    method_fields = ",\"min_value\":" + format_double(*report.min_value) +
                    ",\"argmax\":{\"a\":" + std::to_string(s.a) +
                    ",\"a_prime\":" + std::to_string(s.a_prime) +
                    ",\"b\":" + std::to_string(s.b) +
                    ",\"b_prime\":" + std::to_string(s.b_prime) + "}" +
                    ",\"maximizer_count\":" + std::to_string(report.maximizers.size());
    argmax_csv = strategy_string(s);
    min_value_csv = format_double(*report.min_value);
  } else if (spec.method == "tsirelson") {
    if (!(spec.tolerance > 0.0)) throw SpecError("key 'tolerance': must be > 0");
    if (spec.restarts < 0) throw SpecError("key 'restarts': must be >= 0");
    report = tsirelson_search(spec.tolerance, spec.restarts, spec.seed);
    const auto& q = *report.angles;
    method_fields = ",\"tolerance\":" + format_double(spec.tolerance) +
                    ",\"restarts\":" + std::to_string(spec.restarts) +
                    ",\"seed\":" + std::to_string(spec.seed) +
                    ",\"argmax\":{\"a\":" + format_double(q.a) +
                    ",\"a_prime\":" + format_double(q.a_prime) +
                    ",\"b\":" + format_double(q.b) +
                    ",\"b_prime\":" + format_double(q.b_prime) + "}";
    argmax_csv = "a=" + format_double(q.a) + " a'=" + format_double(q.a_prime) +
                 " b=" + format_double(q.b) + " b'=" + format_double(q.b_prime);
  } else if (spec.method == "ns-lp") {
    report = nonsignaling_lp_max_chsh();
    const NsBox& box = *report.box;
    const AuditReport ns = nonsignaling_audit_box(box);
    std::string blocks;
    const char* names[4] = {"E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"};
    std::string correlations;
    int term = 0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        if (!blocks.empty()) blocks += ",";
        blocks += "{\"x\":" + std::to_string(x) + ",\"y\":" + std::to_string(y) +
                  ",\"p_pp\":" + format_double(box.prob(0, 0, x, y)) +
                  ",\"p_pm\":" + format_double(box.prob(0, 1, x, y)) +
                  ",\"p_mp\":" + format_double(box.prob(1, 0, x, y)) +
                  ",\"p_mm\":" + format_double(box.prob(1, 1, x, y)) + "}";
        if (!correlations.empty()) correlations += ",";
        correlations += jstr(names[term++]) + ":" + format_double(box.correlation(x, y));
      }
    method_fields = ",\"box\":{\"correlations\":{" + correlations + "},\"blocks\":[" +
                    blocks + "]},\"nonsignaling_deviation\":" +
                    format_double(ns.max_deviation);
    argmax_csv = "E(a,b)=" + format_double(box.correlation(0, 0)) +
                 " E(a,b')=" + format_double(box.correlation(0, 1)) +
                 " E(a',b)=" + format_double(box.correlation(1, 0)) +
                 " E(a',b')=" + format_double(box.correlation(1, 1));
  } else {
    throw SpecError("key 'method': unknown method '" + spec.method + "'");
  }

  doc.json = "{\"command\":\"optimize\",\"method\":" + jstr(spec.method) +
             ",\"value\":" + format_double(report.value) +
             ",\"iterations\":" + std::to_string(report.iterations) + method_fields + "}\n";
  doc.csv = csv_join({"method", "value", "min_value", "iterations", "argmax"});
  doc.csv += csv_join({spec.method, format_double(report.value), min_value_csv,
                       std::to_string(report.iterations), argmax_csv});
  doc.summary_json = "{\"value\":" + format_double(report.value) + "}";
  return doc;
}

Document run_jamming(const ExperimentSpec& spec) {
  if (spec.a_events.empty() ||
      spec.a_events.size() != spec.b_events.size() ||
      spec.a_events.size() != spec.j_events.size())
    throw SpecError("keys 'a'/'b'/'j': need one event each per config, same count");
  if (spec.budget < 1) throw SpecError("key 'budget': must be >= 1");

  std::vector<JammingConfig> configs;
  for (std::size_t i = 0; i < spec.a_events.size(); ++i) {
    JammingConfig cfg{parse_event(spec.a_events[i]), parse_event(spec.b_events[i]),
                      parse_event(spec.j_events[i])};
    if (cfg.a.dim() != cfg.b.dim() || cfg.a.dim() != cfg.j.dim())
      throw SpecError("keys 'a'/'b'/'j': config " + std::to_string(i) +
                      " events disagree on dimension");
    if (spec.dim > 0 && cfg.dim() != spec.dim)
      throw SpecError("key 'dim': config " + std::to_string(i) + " has dimension " +
                      std::to_string(cfg.dim()));
    configs.push_back(std::move(cfg));
  }

  std::vector<ConfigVerdict> verdicts;
  bool all_premises = true, all_binary = true, any_reversal = false;
  for (const auto& cfg : configs) {
    verdicts.push_back(config_verdict(cfg, spec.budget));
    const auto& v = verdicts.back();
    all_premises = all_premises && v.premises_ok;
    all_binary = all_binary && v.binary_ok;
    any_reversal = any_reversal || v.reversal;
  }

  const bool loop_checked = all_premises;
  CausalGraph graph;
  if (loop_checked) graph = causal_loop_check(configs);
  const std::string loop_acyclic_csv = loop_checked ? jbool(graph.acyclic) : "";

  std::string configs_json;
  Document doc;
  doc.csv = csv_join({"config", "premises_ok", "binary_ok", "binary_exact", "reversal",
                      "min_slack", "witness", "loop_acyclic"});
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& v = verdicts[i];
    const std::string witness = v.witness ? emit_event(*v.witness) : "";
    if (!configs_json.empty()) configs_json += ",";
    configs_json += "{\"index\":" + std::to_string(i) +
                    ",\"a\":" + event_json(configs[i].a) +
                    ",\"b\":" + event_json(configs[i].b) +
                    ",\"j\":" + event_json(configs[i].j) +
                    ",\"premises_ok\":" + jbool(v.premises_ok) +
                    ",\"binary_ok\":" + jbool(v.binary_ok) +
                    ",\"binary_exact\":" + jbool(v.binary_exact) +
                    ",\"reversal\":" + jbool(v.reversal) +
                    ",\"min_slack\":" + format_double(v.min_slack) +
                    ",\"witness\":" + (v.witness ? event_json(*v.witness) : "null") + "}";
    doc.csv += csv_join({std::to_string(i), jbool(v.premises_ok), jbool(v.binary_ok),
                         jbool(v.binary_exact), jbool(v.reversal),
                         format_double(v.min_slack), witness, loop_acyclic_csv});
  }

  std::string loop_json = "{\"checked\":" + std::string(jbool(loop_checked));
  if (loop_checked) {
    std::string nodes, edges;
    for (const auto& node : graph.nodes) {
      if (!nodes.empty()) nodes += ",";
      nodes += "{\"config\":" + std::to_string(node.config) + ",\"role\":" +
               jstr(std::string(1, node.role)) + ",\"event\":" + event_json(node.event) + "}";
    }
    for (const auto& e : graph.edges) {
      if (!edges.empty()) edges += ",";
      const char* kind = e.kind == CausalGraph::EdgeKind::Causal
                             ? "causal"
                             : (e.kind == CausalGraph::EdgeKind::Jamming ? "jamming" : "both");
      edges += "{\"from\":" + std::to_string(e.from) + ",\"to\":" + std::to_string(e.to) +
               ",\"kind\":" + jstr(kind) + "}";
    }
    loop_json += ",\"acyclic\":" + std::string(jbool(graph.acyclic)) + ",\"nodes\":[" +
                 nodes + "],\"edges\":[" + edges + "]";
  }
  loop_json += "}";

  doc.json = "{\"command\":\"jamming\",\"dim\":" + std::to_string(configs.front().dim()) +
             ",\"configs\":[" + configs_json + "],\"loop\":" + loop_json + "}\n";
  doc.summary_json = "{\"all_premises_ok\":" + std::string(jbool(all_premises)) +
                     ",\"all_binary_ok\":" + std::string(jbool(all_binary)) +
                     ",\"any_reversal\":" + std::string(jbool(any_reversal)) +
                     ",\"loop_acyclic\":" +
                     (loop_checked ? jbool(graph.acyclic) : "null") + "}";
  doc.verdict_failed = !all_premises || !all_binary || (loop_checked && !graph.acyclic);
  return doc;
}

Document run_sample(const ExperimentSpec& spec) {
  if (spec.n < 1) throw SpecError("key 'n': sample needs n >= 1");
  const CorrelationModel model = build_model(spec);
  const double theta = fold_angle(spec.theta);

  std::string samples_json;
  Document doc;
  doc.csv = csv_join({"trial", "outcome_a", "outcome_b"});
  long long product_sum = 0;
  for (long long i = 0; i < spec.n; ++i) {
    RandomStream rng = RandomStream::derive(spec.seed, static_cast<std::uint64_t>(i));
    const auto [oa, ob] = sample_pair(model, theta, rng);
    product_sum += oa * ob;
    if (!samples_json.empty()) samples_json += ",";
    samples_json += "[" + std::to_string(oa) + "," + std::to_string(ob) + "]";
    doc.csv += csv_join({std::to_string(i), std::to_string(oa), std::to_string(ob)});
  }
  const double empirical =
      static_cast<double>(product_sum) / static_cast<double>(spec.n);
  doc.csv += csv_join({"empirical_correlation", format_double(empirical), ""});
  doc.json = "{\"command\":\"sample\"," + model_json_fields(spec) +
             ",\"theta\":" + format_double(theta) + ",\"n\":" + std::to_string(spec.n) +
             ",\"seed\":" + std::to_string(spec.seed) + ",\"samples\":[" + samples_json +
             "],\"empirical_correlation\":" + format_double(empirical) + "}\n";
  doc.summary_json = "{\"empirical_correlation\":" + format_double(empirical) + "}";
  return doc;
}

bool write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) return false;
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    if (!out.flush()) return false;
  }
  fs::rename(tmp, target, ec);
  return !ec;
}

}  // namespace

RunResult run(const ExperimentSpec& spec) {
  if (spec.threads < 1) throw SpecError("key 'threads': must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  Document doc;
  switch (spec.command) {
    case Command::Chsh: doc = run_chsh(spec); break;
    case Command::Audit: doc = run_audit(spec); break;
    case Command::Optimize: doc = run_optimize(spec); break;
    case Command::Jamming: doc = run_jamming(spec); break;
    case Command::Sample: doc = run_sample(spec); break;
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunResult result;
  result.text = spec.format == OutputFormat::Csv ? doc.csv : doc.json;
  result.verdict_failed = doc.verdict_failed;
  result.manifest = {kVersion, emit_config(spec), seconds, doc.summary_json};
  return result;
}

int run_to_files(const ExperimentSpec& spec) {
  RunResult result;
  try {
    result = run(spec);
  } catch (const SpecError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }

  if (spec.out.empty()) {
    std::cout << result.text;
  } else {
    const std::string manifest =
        "{\"artifact_version\":" + jstr(result.manifest.artifact_version) +
        ",\"config\":" + jstr(result.manifest.config) +
        ",\"duration_seconds\":" + format_double(result.manifest.duration_seconds) +
        ",\"summary\":" + result.manifest.summary_json + "}\n";
    if (!write_file_atomic(spec.out, result.text) ||
        !write_file_atomic(spec.out + ".manifest.json", manifest)) {
      std::cerr << "error: cannot write '" << spec.out << "'\n";
      return 4;
    }
  }
  if (spec.strict && result.verdict_failed) return 3;
  return 0;
}

}  // namespace bellbox
