// Acceptance runner: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "archpat/checker.hpp"
#include "archpat/cli.hpp"
#include "archpat/emitter.hpp"
#include "archpat/parser.hpp"
#include "archpat/patterns.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace archpat;
using Status = PropertyOutcome::Status;

namespace {

enum class Result { Pass, Fail, Skip };

struct Outcome {
  Result result = Result::Fail;
  std::string detail;
};

Outcome pass(std::string d) { return {Result::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Result::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Result::Skip, std::move(d)}; }

const Property* find_property(const PatternSpec& spec, const std::string& name) {
  for (const auto& p : spec.properties)
    if (p.name == name) return &p;
  return nullptr;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome property_counts() {
  const std::array<std::pair<const char*, std::size_t>, 3> expected{{{"singleton", 2}, {"mvc", 30}, {"broker", 6}}};
  std::ostringstream detail;
  for (const auto& [id, count] : expected) {
    const auto& entry = get_pattern(id);
    if (expand_properties(entry).size() != count) return fail(std::string(id) + ": family expansion size differs");
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = cli::run({"check", "--pattern", id, "--format", "json"}, out, err);
    const double secs = seconds_since(t0);
    const auto doc = nlohmann::json::parse(out.str());
    const auto& props = doc.at("properties");
    std::size_t holding = 0;
    for (const auto& p : props) holding += p.at("status") == "holds";
    if (code != 0 || props.size() != count || holding != count)
      return fail(std::string(id) + ": " + std::to_string(holding) + "/" + std::to_string(props.size()) +
                  " hold, exit " + std::to_string(code));
    if (secs >= 120) return fail(std::string(id) + " took " + std::to_string(secs) + " s");
    detail << id << " " << holding << "/" << count << " (" << static_cast<int>(secs * 1000) << " ms) ";
  }
  return pass(detail.str());
}

Outcome golden_emission() {
  const SmvDocument a = emit_file(get_pattern("mvc").spec);
  const SmvDocument b = emit_file(get_pattern("mvc").spec);
  if (a.rendered != b.rendered) return fail("two emissions differ");
  const std::string golden = testing::read_text(testing::source_path("tests/golden/mvc.smv"));
  if (testing::normalize_smv(a.rendered) != testing::normalize_smv(golden)) return fail("differs from golden");
  const std::string model = testing::smv_module(testing::read_text(testing::source_path("tests/golden/published_model.smv")), "model");
  const std::string main = testing::smv_module(testing::read_text(testing::source_path("tests/golden/published_main.smv")), "main");
  if (testing::normalize_smv(testing::smv_module(a.rendered, "model")) != testing::normalize_smv(model))
    return fail("model module differs from the published listing");
  if (testing::normalize_smv(testing::smv_module(a.rendered, "main")) != testing::normalize_smv(main))
    return fail("main module differs from the published listing");
  return pass("golden and published modules match; " + std::to_string(a.rendered.size()) + " bytes, stable");
}

Outcome m1_semantics() {
  const PatternSpec& mvc = get_pattern("mvc").spec;
  if (!check_property(mvc, "M1").holds) return fail("M1 violated on the base model");
  const Mutant& m = get_mutant("mvc_mutant_idle");
  std::size_t failing = 0, certified = 0;
  for (const auto& o : check_all(m.spec)) {
    if (o.name.rfind("M2@", 0) != 0 || o.status != Status::Violated) continue;
    ++failing;
    if (verify_lasso(m.spec, *find_property(m.spec, o.name)->formula, *o.verdict->counterexample)) ++certified;
  }
  if (failing == 0) return fail("no M2 instance fails on " + m.id);
  if (certified != failing) return fail("uncertified lasso on " + m.id);
  return pass("M1 holds; " + std::to_string(failing) + " M2 instances fail on " + m.id + ", all lassos certified");
}

Outcome m2_semantics() {
  const PatternSpec& mvc = get_pattern("mvc").spec;
  std::vector<Property> m2;
  for (const auto& p : mvc.properties)
    if (p.name.rfind("M2@", 0) == 0) m2.push_back(p);
  if (m2.empty()) return fail("no M2 instances");
  for (const auto& o : check_properties(mvc, m2))
    if (o.status != Status::Holds) return fail(o.name + " is " + to_string(o.status));
  return pass(std::to_string(m2.size()) + " M2 instances hold");
}

Outcome singleton_reading() {
  const auto& entry = get_pattern("singleton");
  if (!check_property(entry.spec, "S1").holds) return fail("S1 violated");
  if (!check_property(entry.spec, "S2").holds) return fail("S2 violated");
  const Property* strict = nullptr;
  for (const auto& p : entry.alternatives)
    if (p.name == "S2-strict") strict = &p;
  if (!strict) return fail("S2-strict reading missing");
  const Verdict v = check_formula(entry.spec, *strict->formula);
  if (v.holds) return fail("S2-strict holds");
  if (!verify_lasso(entry.spec, *strict->formula, *v.counterexample)) return fail("S2-strict lasso not certified");
  return pass("S1, S2 hold; S2-strict fails with a certified lasso of length " +
              std::to_string(v.counterexample->prefix.size() + v.counterexample->cycle.size()));
}

Outcome oracle_equivalence() {
  std::mt19937 rng(20240611);
  int compared = 0, violated = 0, disagreements = 0;
  for (int attempt = 0; compared < 40 && attempt < 4000; ++attempt) {
    PatternSpec spec = testing::parse_or_die(testing::random_spec_text(rng, "A" + std::to_string(attempt)));
    const testing::RefGraph g = testing::reference_graph(spec);
    const int temporal = 1 + static_cast<int>(rng() % 2);
    const std::string text = testing::random_formula_text(rng, testing::random_spec_atoms(spec), temporal);
    const std::size_t bound = testing::lasso_bound(g.states.size(), temporal);
    if (g.states.size() > 5000 || testing::path_count(g, bound, 400000) >= 400000) continue;
    LtlPtr f = testing::ltl_or_die(text);
    spec.properties.push_back({"P", f, {}});
    const bool oracle_violated = testing::brute_force(spec, g, *f, bound).violated;
    const Verdict v = check_property(spec, "P");
    ++compared;
    violated += oracle_violated;
    if (v.holds == oracle_violated) ++disagreements;
    if (!v.holds && !verify_lasso(spec, *f, *v.counterexample)) ++disagreements;
  }
  const std::string summary = std::to_string(compared) + " specs, " + std::to_string(violated) + " violated, " +
                              std::to_string(disagreements) + " disagreements";
  if (compared < 20 || disagreements != 0) return fail(summary);
  return pass(summary);
}

Outcome round_trip() {
  for (const auto& id : pattern_ids()) {
    const PatternSpec& spec = get_pattern(id).spec;
    ParseResult again = parse_pattern(pretty_print(spec));
    if (!again.ok() || !equal(*again.spec, spec)) return fail(id + ": print/parse differs");
    ParseResult file = parse_pattern(testing::read_text(testing::source_path("patterns/" + id + ".arch")));
    if (!file.ok() || !equal(*file.spec, spec)) return fail(id + ".arch differs from the built-in");
  }
  return pass("3 patterns round-trip; shipped .arch files equal the built-ins");
}

Outcome determinism() {
  struct Snapshot {
    std::vector<std::size_t> states;
    std::vector<std::string> verdicts;
    std::vector<std::string> emitted;
    bool operator==(const Snapshot&) const = default;
  };
  std::vector<Snapshot> runs;
  for (int threads : {1, 2, 4}) {
    Snapshot s;
    for (const auto& id : pattern_ids()) {
      const PatternSpec& spec = get_pattern(id).spec;
      s.states.push_back(reachable(spec, std::nullopt, threads).states_visited);
      for (const auto& o : check_all(spec, {}, threads)) s.verdicts.push_back(o.name + "=" + to_string(o.status));
      s.emitted.push_back(emit_file(spec).rendered);
    }
    for (const auto& id : mutant_ids())
      for (const auto& o : check_all(get_mutant(id).spec, {}, threads))
        s.verdicts.push_back(id + "/" + o.name + "=" + to_string(o.status));
    runs.push_back(std::move(s));
  }
  for (const auto& r : runs)
    if (!(r == runs.front())) return fail("runs differ across worker counts");
  std::ostringstream d;
  d << "3 runs (1/2/4 workers) agree; states";
  for (auto n : runs.front().states) d << " " << n;
  d << "; " << runs.front().verdicts.size() << " verdicts";
  return pass(d.str());
}

std::optional<fs::path> find_on_path(const std::vector<std::string>& names) {
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    for (const auto& n : names) {
      const fs::path p = fs::path(dir.empty() ? "." : dir) / n;
      std::error_code ec;
      if (fs::is_regular_file(p, ec) && (fs::status(p, ec).permissions() & fs::perms::owner_exec) != fs::perms::none)
        return p;
    }
  }
  return std::nullopt;
}

Outcome external_checker() {
  const auto tool = find_on_path({"NuSMV", "nuXmv", "nusmv", "nuxmv"});
  if (!tool) return skip("no NuSMV/nuXmv on PATH");
  const fs::path dir = fs::temp_directory_path() / "archpat_acceptance";
  fs::create_directories(dir);
  const std::regex line(R"(^-- specification .* is (true|false)\s*$)");
  std::size_t agreed = 0;
  for (const auto& id : pattern_ids()) {
    const PatternSpec& spec = get_pattern(id).spec;
    const fs::path file = dir / (id + ".smv");
    {
      std::ofstream os(file);
      os << emit_file(spec).rendered;
    }
    const std::string cmd = "\"" + tool->string() + "\" \"" + file.string() + "\" 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return fail("cannot run " + tool->string());
    std::vector<bool> external;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) {
      std::smatch m;
      std::string s(buf.data());
      if (std::regex_search(s, m, line)) external.push_back(m[1] == "true");
    }
    pclose(pipe);
    const auto outcomes = check_all(spec);
    if (external.size() != outcomes.size())
      return fail(id + ": external tool reported " + std::to_string(external.size()) + " of " +
                  std::to_string(outcomes.size()) + " specifications");
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (external[i] != (outcomes[i].status == Status::Holds)) return fail(id + "/" + outcomes[i].name + " disagrees");
      ++agreed;
    }
  }
  return pass(tool->filename().string() + " agrees on " + std::to_string(agreed) + " properties");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"property counts 2/30/6, all holding", property_counts},
      {"golden MVC emission", golden_emission},
      {"M1 holds; startup mutant breaks M2", m1_semantics},
      {"M2 instances hold", m2_semantics},
      {"singleton readings", singleton_reading},
      {"oracle equivalence on random specs", oracle_equivalence},
      {"round-trip of built-ins and .arch files", round_trip},
      {"determinism across runs and workers", determinism},
      {"external SMV checker agreement", external_checker},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.result == Result::Pass ? "PASS" : o.result == Result::Skip ? "SKIP" : "FAIL";
    failures += o.result == Result::Fail;
    std::cout << "criterion " << (i + 1) << ": " << tag << "  " << criteria[i].first << " -- " << o.detail << "\n"
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
