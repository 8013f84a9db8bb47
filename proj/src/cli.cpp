#include "archpat/cli.hpp"

#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "archpat/emitter.hpp"
#include "archpat/parser.hpp"
#include "archpat/patterns.hpp"

namespace archpat::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kReportSchema = "archpat-report/1";
constexpr const char* kLassoSchema = "archpat-lasso/1";

/// Failure that maps directly to an exit code.
struct Exit {
  int code;
  std::string message;
};

struct Loaded {
  PatternSpec spec;
  std::string text;    // DSL text of the spec
  std::string source;  // path or `pattern:<id>`
  fs::path directory;  // where side files go by default
  std::vector<Diagnostic> diagnostics;
};

const char* color(const Environment& env, const char* code) { return env.color ? code : ""; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kUsage, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Exit{kUsage, "cannot write '" + path.string() + "'"};
  out << text;
}

const PatternSpec& builtin(const std::string& id) {
  try {
    return get_pattern(id).spec;
  } catch (const UnknownPattern&) {
    try {
      return get_mutant(id).spec;
    } catch (const UnknownPattern&) {
      throw Exit{kUsage, "unknown pattern '" + id + "' (see `patterns list`)"};
    }
  }
}

/// Parses and validates; diagnostics are kept even when loading succeeds.
Loaded load(const std::string& file, const std::string& pattern) {
  Loaded l;
  if (!pattern.empty()) {
    l.spec = builtin(pattern);
    l.text = pretty_print(l.spec);
    l.source = "pattern:" + pattern;
    l.directory = ".";
  } else {
    l.text = read_file(file);
    l.source = file;
    l.directory = fs::path(file).parent_path();
    if (l.directory.empty()) l.directory = ".";
    ParseResult r = parse_pattern(l.text, file);
    l.diagnostics = r.diagnostics;
    if (!r.ok()) return l;
    l.spec = std::move(*r.spec);
  }
  auto v = validate_spec(l.spec);
  l.diagnostics.insert(l.diagnostics.end(), v.begin(), v.end());
  return l;
}

json diagnostic_json(const Diagnostic& d) {
  return {{"severity", d.severity == Severity::Error ? "error" : "warning"},
          {"message", d.message},
          {"file", d.span.file},
          {"line", d.span.line_start},
          {"column", d.span.col_start},
          {"subject", d.subject}};
}

json diagnostics_json(const std::vector<Diagnostic>& ds) {
  json a = json::array();
  for (const auto& d : ds) a.push_back(diagnostic_json(d));
  return a;
}

void print_diagnostics(std::ostream& os, const std::vector<Diagnostic>& ds, const Environment& env) {
  for (const auto& d : ds) {
    const bool error = d.severity == Severity::Error;
    os << color(env, error ? "\033[31m" : "\033[33m") << d << color(env, "\033[0m") << '\n';
  }
}

json value_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Bool: return v.b;
    case Value::Kind::Int: return v.i;
    case Value::Kind::Enum: return v.label;
    case Value::Kind::Array: {
      json a = json::array();
      for (const auto& e : v.elements) a.push_back(value_json(e));
      return a;
    }
  }
  return nullptr;
}

Value value_from_json(const json& j) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_string()) return Value::enumeration(j.get<std::string>());
  if (j.is_array()) {
    std::vector<Value> elements;
    for (const auto& e : j) elements.push_back(value_from_json(e));
    return Value::array(std::move(elements));
  }
  throw Exit{kUsage, "unsupported value " + j.dump()};
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '@' || c == '-' || c == '_') ? c : '_';
  return out;
}

// --- validate ----------------------------------------------------------------

int cmd_validate(const std::string& file, const std::string& pattern, const std::string& format, std::ostream& out,
                 const Environment& env) {
  auto l = load(file, pattern);
  const bool ok = !has_errors(l.diagnostics);
  const int code = ok ? kOk : kInvalidSpec;
  if (format == "json") {
    json r = {{"schema", kReportSchema},
              {"command", "validate"},
              {"source", l.source},
              {"spec_name", l.spec.name},
              {"valid", ok},
              {"diagnostics", diagnostics_json(l.diagnostics)},
              {"exit_code", code}};
    out << r.dump(2) << '\n';
    return code;
  }
  print_diagnostics(out, l.diagnostics, env);
  out << l.source << ": " << (ok ? "valid" : "invalid") << " (" << l.diagnostics.size() << " diagnostic"
      << (l.diagnostics.size() == 1 ? "" : "s") << ")\n";
  return code;
}

// --- check -------------------------------------------------------------------

struct CheckArgs {
  std::string file, pattern, format = "human", report, lasso_dir;
  std::vector<std::string> props;
  std::size_t max_states = CheckLimits{}.max_states;
  double max_time = CheckLimits{}.max_seconds;
  int threads = 0;
};

int exit_code_for(const std::vector<PropertyOutcome>& outcomes) {
  using S = PropertyOutcome::Status;
  auto any = [&](S s) {
    return std::any_of(outcomes.begin(), outcomes.end(), [&](const auto& o) { return o.status == s; });
  };
  if (any(S::Violated)) return kViolated;
  if (any(S::Error)) return kInvalidSpec;
  if (any(S::Inconclusive)) return kInconclusive;
  return kOk;
}

int cmd_check(const CheckArgs& a, std::ostream& out, const Environment& env) {
  auto l = load(a.file, a.pattern);
  if (has_errors(l.diagnostics)) {
    if (a.format == "json") {
      json r = {{"schema", kReportSchema}, {"command", "check"},      {"source", l.source},
                {"spec_name", l.spec.name}, {"properties", json::array()},
                {"diagnostics", diagnostics_json(l.diagnostics)}, {"exit_code", kInvalidSpec}};
      out << r.dump(2) << '\n';
    } else {
      print_diagnostics(out, l.diagnostics, env);
      out << l.source << ": invalid spec, nothing checked\n";
    }
    return kInvalidSpec;
  }
  const PatternSpec& spec = l.spec;
  std::vector<Property> props;
  if (a.props.empty()) {
    props = spec.properties;
  } else {
    for (const auto& name : a.props) {
      const Property* p = spec.find_property(name);
      if (!p) throw Exit{kUsage, "unknown property '" + name + "'"};
      props.push_back(*p);
    }
  }
  CheckLimits limits;
  limits.max_states = a.max_states;
  limits.max_seconds = a.max_time;
  const auto started = std::chrono::steady_clock::now();
  const auto outcomes = check_properties(spec, props, limits, a.threads);
  const double total_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  const int code = exit_code_for(outcomes);

  fs::path lasso_dir = a.lasso_dir;
  if (lasso_dir.empty()) lasso_dir = a.report.empty() ? l.directory : fs::path(a.report).parent_path();
  if (lasso_dir.empty()) lasso_dir = ".";

  json report = {{"schema", kReportSchema},
                 {"command", "check"},
                 {"source", l.source},
                 {"spec_name", spec.name},
                 {"limits", {{"max_states", limits.max_states}, {"max_seconds", limits.max_seconds}}},
                 {"properties", json::array()},
                 {"diagnostics", diagnostics_json(l.diagnostics)}};
  std::ostringstream table;
  table << "pattern " << spec.name << " (" << l.source << ")\n";
  table << std::left << std::setw(18) << "PROPERTY" << std::setw(14) << "RESULT" << std::right << std::setw(10)
        << "STATES" << std::setw(12) << "TIME ms" << '\n';
  int pass = 0, fail = 0, open = 0, error = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    json entry = {{"name", o.name},
                  {"formula", to_dsl(*props[i].formula)},
                  {"status", to_string(o.status)},
                  {"holds", nullptr},
                  {"system_states", o.stats.system_states},
                  {"product_states", o.stats.product_states},
                  {"buchi_states", o.stats.buchi_states},
                  {"time_ms", o.stats.time_ms}};
    std::string label, hue, extra;
    switch (o.status) {
      case PropertyOutcome::Status::Holds:
        entry["holds"] = true;
        label = "PASS", hue = "\033[32m";
        ++pass;
        break;
      case PropertyOutcome::Status::Violated: {
        entry["holds"] = false;
        label = "FAIL", hue = "\033[31m";
        ++fail;
        const Lasso& lasso = *o.verdict->counterexample;
        const bool certified = verify_lasso(spec, *props[i].formula, lasso);
        const fs::path path = lasso_dir / (sanitize(spec.name) + "_" + sanitize(o.name) + ".lasso.json");
        write_file(path, lasso_to_json(spec, l.text, o.name, *props[i].formula, lasso));
        entry["lasso_file"] = path.string();
        entry["lasso_certified"] = certified;
        entry["lasso_length"] = {{"prefix", lasso.prefix.size()}, {"cycle", lasso.cycle.size()}};
        extra = "  counterexample: " + path.string() + " (prefix " + std::to_string(lasso.prefix.size()) +
                ", cycle " + std::to_string(lasso.cycle.size()) + (certified ? ", certified)" : ", NOT certified)");
        break;
      }
      case PropertyOutcome::Status::Inconclusive:
        label = "INCONCLUSIVE", hue = "\033[33m";
        ++open;
        entry["message"] = o.message;
        extra = "  " + o.message;
        break;
      case PropertyOutcome::Status::Error:
        label = "ERROR", hue = "\033[35m";
        ++error;
        entry["message"] = o.message;
        extra = "  " + o.message;
        if (o.error_state) {
          json state;
          for (const auto& [k, v] : StateLayout(spec).decode(*o.error_state)) state[k] = value_json(v);
          entry["error_state"] = state;
        }
        break;
    }
    report["properties"].push_back(entry);
    table << std::left << std::setw(18) << o.name << color(env, hue.c_str()) << std::setw(14) << label
          << color(env, "\033[0m") << std::right << std::setw(10) << o.stats.system_states << std::setw(12)
          << std::fixed << std::setprecision(1) << o.stats.time_ms << '\n';
    if (!extra.empty()) table << extra << '\n';
  }
  table << outcomes.size() << " properties: " << pass << " pass, " << fail << " fail, " << open << " inconclusive, "
        << error << " error (" << std::fixed << std::setprecision(1) << total_ms << " ms total)\n";
  report["total_time_ms"] = total_ms;
  report["exit_code"] = code;

  const std::string rendered = a.format == "json" ? report.dump(2) + "\n" : table.str();
  if (!a.report.empty()) write_file(a.report, report.dump(2) + "\n");
  out << rendered;
  return code;
}

// --- emit --------------------------------------------------------------------

int cmd_emit(const std::string& file, const std::string& pattern, const std::string& output, std::ostream& out,
             std::ostream& err, const Environment& env) {
  auto l = load(file, pattern);
  if (has_errors(l.diagnostics)) {
    print_diagnostics(err, l.diagnostics, env);
    return kInvalidSpec;
  }
  SmvDocument doc;
  try {
    doc = emit_file(l.spec);
  } catch (const UnsupportedAtom& e) {
    err << "emit: " << e.what() << '\n';
    return kInvalidSpec;
  }
  if (output.empty() || output == "-") {
    out << doc.rendered;
  } else {
    write_file(output, doc.rendered);
    out << "wrote " << output << " (" << doc.modules.size() << " sections, " << doc.rendered.size() << " bytes)\n";
  }
  return kOk;
}

// --- patterns ----------------------------------------------------------------

int cmd_patterns_list(std::ostream& out) {
  std::vector<std::array<std::string, 4>> rows{{"ID", "NAME", "PROPERTIES", "DESCRIPTION"}};
  for (const auto& id : pattern_ids()) {
    const auto& e = get_pattern(id);
    std::string families;
    for (const auto& f : e.property_families) families += (families.empty() ? "" : ", ") + f.name;
    rows.push_back({id, e.spec.name, std::to_string(e.spec.properties.size()), "families " + families});
  }
  for (const auto& id : mutant_ids()) {
    const auto& m = get_mutant(id);
    rows.push_back({id, m.spec.name, std::to_string(m.spec.properties.size()), "mutant: " + m.description});
  }
  std::array<std::size_t, 3> width{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], r[c].size() + 2);
  for (const auto& r : rows) {
    out << std::left;
    for (std::size_t c = 0; c < 3; ++c) out << std::setw(static_cast<int>(width[c])) << r[c];
    out << r[3] << '\n';
  }
  return kOk;
}

int cmd_patterns_show(const std::string& id, std::ostream& out) {
  out << pretty_print(builtin(id));
  return kOk;
}

// --- explain -----------------------------------------------------------------

void print_state_diff(std::ostream& os, const Valuation& prev, const Valuation& cur, bool full) {
  for (const auto& [k, v] : cur) {
    if (!full) {
      auto it = prev.find(k);
      if (it != prev.end() && it->second == v) continue;
    }
    os << "    " << k << " = " << to_string(v) << '\n';
  }
}

int cmd_explain(const std::string& path, std::ostream& out, const Environment& env) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Exit{kUsage, std::string("malformed lasso file: ") + e.what()};
  }
  if (!j.is_object() || !j.contains("spec_text") || !j.contains("formula") || !j.contains("prefix") ||
      !j.contains("cycle") || !j["prefix"].is_array() || !j["cycle"].is_array())
    throw Exit{kUsage, "lasso file lacks spec_text, formula, prefix or cycle"};
  const std::string text = j["spec_text"].get<std::string>();
  ParseResult pr = parse_pattern(text, path + ":spec_text");
  if (!pr.ok() || has_errors(validate_spec(*pr.spec))) {
    print_diagnostics(out, pr.diagnostics, env);
    out << "explain: embedded spec is invalid\n";
    return kInvalidSpec;
  }
  const PatternSpec& spec = *pr.spec;
  LtlParseResult fr = parse_ltl(j["formula"].get<std::string>());
  if (!fr.formula) {
    print_diagnostics(out, fr.diagnostics, env);
    out << "explain: embedded formula does not parse\n";
    return kInvalidSpec;
  }
  const StateLayout layout(spec);
  Lasso lasso;
  std::vector<Valuation> word;
  std::size_t position = 0;
  for (const char* part : {"prefix", "cycle"}) {
    for (const auto& s : j[part]) {
      Valuation v;
      if (!s.is_object()) throw Exit{kUsage, "state " + std::to_string(position) + " is not an object"};
      for (const auto& [k, x] : s.items()) v[k] = value_from_json(x);
      GlobalState g;
      try {
        g = layout.encode(v);
      } catch (const std::invalid_argument& e) {
        out << color(env, "\033[31m") << "REJECTED" << color(env, "\033[0m") << ": state " << position << ": "
            << e.what() << '\n';
        return kViolated;
      }
      (std::string(part) == "prefix" ? lasso.prefix : lasso.cycle).push_back(g);
      word.push_back(std::move(v));
      ++position;
    }
  }
  const std::string property = j.value("property", std::string("<formula>"));
  out << "pattern " << spec.name << ", property " << property << ": " << to_dsl(*fr.formula) << '\n';
  Valuation previous;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i == lasso.prefix.size()) out << "  -- cycle starts here --\n";
    out << "  state " << i << (i == 0 ? " (initial)" : "") << ":\n";
    print_state_diff(out, previous, word[i], i == 0);
    previous = word[i];
  }
  out << "  -- back to state " << lasso.prefix.size() << " --\n";
  const LassoDiagnosis d = diagnose_lasso(spec, *fr.formula, lasso);
  if (!d.trajectory_ok) {
    out << color(env, "\033[31m") << "REJECTED" << color(env, "\033[0m") << ": not a run of " << spec.name << ": "
        << d.problem << '\n';
    return kViolated;
  }
  if (!d.violates) {
    out << color(env, "\033[31m") << "REJECTED" << color(env, "\033[0m")
        << ": the run satisfies the formula, so it is no counterexample\n";
    return kViolated;
  }
  out << color(env, "\033[32m") << "CERTIFIED" << color(env, "\033[0m") << ": a run of " << spec.name
      << " that violates " << property << '\n';
  return kOk;
}

}  // namespace

std::string lasso_to_json(const PatternSpec& spec, const std::string& pattern_text, const std::string& property,
                          const LtlFormula& formula, const Lasso& lasso) {
  const StateLayout layout(spec);
  auto states = [&](const std::vector<GlobalState>& xs) {
    json a = json::array();
    for (const auto& s : xs) {
      json m = json::object();
      for (const auto& [k, v] : layout.decode(s)) m[k] = value_json(v);
      a.push_back(m);
    }
    return a;
  };
  json j = {{"schema", kLassoSchema},     {"pattern", spec.name},          {"property", property},
            {"formula", to_dsl(formula)}, {"spec_text", pattern_text},     {"prefix", states(lasso.prefix)},
            {"cycle", states(lasso.cycle)}};
  return j.dump(2) + "\n";
}

Environment environment_from_process() {
  Environment env;
  const char* c = std::getenv("ARCHPAT_COLOR");
  if (c && std::string(c) == "0") return env;
  env.color = (c && std::string(c) == "1") || isatty(STDOUT_FILENO);
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Architecture pattern verification toolchain", "archpat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string file, pattern, format = "human", output;
  auto* validate = app.add_subcommand("validate", "Parse and validate a .arch file");
  validate->add_option("file", file, "Pattern file")->check(CLI::ExistingFile);
  validate->add_option("--pattern", pattern, "Built-in pattern id");
  validate->add_option("--format", format, "human or json")->check(CLI::IsMember({"human", "json"}));

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Check LTL guarantees");
  auto* check_file = check->add_option("file", ca.file, "Pattern file")->check(CLI::ExistingFile);
  check->add_option("--pattern", ca.pattern, "Built-in pattern id")->excludes(check_file);
  check->add_option("--prop", ca.props, "Property to check (repeatable)");
  check->add_option("--max-states", ca.max_states, "State limit")->check(CLI::PositiveNumber);
  check->add_option("--max-time", ca.max_time, "Time limit in seconds (0: none)")->check(CLI::NonNegativeNumber);
  check->add_option("--format", ca.format, "human or json")->check(CLI::IsMember({"human", "json"}));
  check->add_option("--threads", ca.threads, "Worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  check->add_option("--report", ca.report, "Also write the JSON report to this file");
  check->add_option("--lasso-dir", ca.lasso_dir, "Directory for counterexample files");

  auto* emit = app.add_subcommand("emit", "Emit SMV model text");
  auto* emit_file_opt = emit->add_option("file", file, "Pattern file")->check(CLI::ExistingFile);
  emit->add_option("--pattern", pattern, "Built-in pattern id")->excludes(emit_file_opt);
  emit->add_option("-o,--output", output, "Output file (default: standard output)");

  auto* patterns = app.add_subcommand("patterns", "Built-in patterns");
  patterns->require_subcommand(1);
  patterns->add_subcommand("list", "List built-in patterns and mutants");
  std::string show_id;
  auto* show = patterns->add_subcommand("show", "Print a built-in pattern as .arch text");
  show->add_option("id", show_id, "Pattern or mutant id")->required();

  std::string lasso_file;
  auto* explain = app.add_subcommand("explain", "Re-certify and print a counterexample");
  explain->add_option("lasso", lasso_file, "Lasso JSON file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (validate->parsed()) {
      if (file.empty() == pattern.empty()) throw Exit{kUsage, "validate: give a file or --pattern"};
      return cmd_validate(file, pattern, format, out, env);
    }
    if (check->parsed()) {
      if (ca.file.empty() && ca.pattern.empty()) throw Exit{kUsage, "check: give a file or --pattern"};
      return cmd_check(ca, out, env);
    }
    if (emit->parsed()) {
      if (file.empty() && pattern.empty()) throw Exit{kUsage, "emit: give a file or --pattern"};
      return cmd_emit(file, pattern, output, out, err, env);
    }
    if (patterns->parsed()) return show->parsed() ? cmd_patterns_show(show_id, out) : cmd_patterns_list(out);
    if (explain->parsed()) return cmd_explain(lasso_file, out, env);
  } catch (const Exit& e) {
    err << "archpat: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "archpat: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace archpat::cli
