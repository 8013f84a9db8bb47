#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "archpat/cli.hpp"
#include "archpat/patterns.hpp"
#include "support.hpp"

using namespace archpat;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args, bool color = false) {
  std::ostringstream out, err;
  cli::Environment env;
  env.color = color;
  Run r;
  r.code = cli::run(args, out, err, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string pattern_file(const std::string& id) { return testing::source_path("patterns/" + id + ".arch"); }

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("archpat_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

const char* kOverflow = R"(pattern Overflow

interface Tick
  in go : bool
  out top : bool
  local k : 0..2

behavior Tick states run init run
  init k := 0
  next k := case go : k + 1; true : k; esac
  define top := k = 2

architecture
  component t : Tick (go := e)
  env e : bool init false next {false, true}

property Safe : G !t.top
)";

}  // namespace

TEST_CASE("validate exit codes") {
  CHECK(run({"validate", pattern_file("broker")}).code == cli::kOk);
  CHECK(run({"validate", "--pattern", "mvc"}).code == cli::kOk);

  const fs::path dir = scratch_dir("validate");
  std::string bad = testing::read_text(pattern_file("singleton"));
  bad.replace(bad.find("architecture"), 12, "architecture\n  component ghost : Nothing ()");
  write_file(dir / "bad.arch", bad);
  const Run r = run({"validate", (dir / "bad.arch").string()});
  CHECK(r.code == cli::kInvalidSpec);
  CHECK(r.out.find("bad.arch:17:3: error") != std::string::npos);

  const Run j = run({"validate", (dir / "bad.arch").string(), "--format", "json"});
  CHECK(j.code == cli::kInvalidSpec);
  const json doc = json::parse(j.out);
  CHECK(doc.at("exit_code") == cli::kInvalidSpec);
  CHECK_FALSE(doc.at("diagnostics").empty());
  CHECK(doc.at("diagnostics")[0].contains("line"));
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bogus"}).code == cli::kUsage);
  CHECK(run({"check", "--pattern", "singleton", "--max-states", "-3"}).code == cli::kUsage);
  CHECK(run({"check", "--pattern", "singleton", "--format", "yaml"}).code == cli::kUsage);
  CHECK(run({"validate", "/no/such/file.arch"}).code == cli::kUsage);
  CHECK(run({"check", "--pattern", "nosuch"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("check produces a report with one entry per property") {
  const fs::path dir = scratch_dir("check");
  const Run r = run({"check", "--pattern", "broker", "--format", "json", "--report", (dir / "r.json").string()});
  CHECK(r.code == cli::kOk);
  const json doc = json::parse(r.out);
  CHECK(doc.at("schema") == "archpat-report/1");
  CHECK(doc.at("command") == "check");
  REQUIRE(doc.at("properties").size() == get_pattern("broker").spec.properties.size());
  for (const auto& p : doc.at("properties")) {
    CHECK(p.at("status") == "holds");
    CHECK(p.at("holds") == true);
    CHECK(p.at("system_states").get<std::size_t>() > 0);
  }
  CHECK(json::parse(testing::read_text((dir / "r.json").string())) == doc);

  const Run one = run({"check", "--pattern", "singleton", "--prop", "S2", "--format", "json"});
  CHECK(one.code == cli::kOk);
  CHECK(json::parse(one.out).at("properties").size() == 1);
  CHECK(run({"check", "--pattern", "singleton", "--prop", "S9"}).code == cli::kUsage);
}

TEST_CASE("violations write certified lassos that explain accepts") {
  const fs::path dir = scratch_dir("violate") / "lassos";
  const Run r = run({"check", pattern_file("singleton_mutant_noguard"), "--format", "json", "--lasso-dir", dir.string()});
  CHECK(r.code == cli::kViolated);
  const json doc = json::parse(r.out);
  std::string lasso_path;
  for (const auto& p : doc.at("properties")) {
    if (p.at("status") != "violated") continue;
    CHECK(p.at("lasso_certified") == true);
    lasso_path = p.at("lasso_file").get<std::string>();
  }
  REQUIRE_FALSE(lasso_path.empty());
  CHECK(fs::path(lasso_path).parent_path() == dir);

  const Run ok = run({"explain", lasso_path});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("CERTIFIED") != std::string::npos);
  CHECK(ok.out.find("\x1b[") == std::string::npos);
  CHECK(run({"explain", lasso_path}, true).out.find("\x1b[") != std::string::npos);

  json lasso = json::parse(testing::read_text(lasso_path));
  json& state = lasso.at("cycle").back();
  state["s1.active"] = !state.at("s1.active").get<bool>();
  write_file(dir / "tampered.json", lasso.dump(2));
  const Run t = run({"explain", (dir / "tampered.json").string()});
  CHECK(t.code == cli::kViolated);
  CHECK(t.out.find("REJECTED") != std::string::npos);

  lasso = json::parse(testing::read_text(lasso_path));
  lasso.at("cycle")[0]["pick"] = 7;
  write_file(dir / "outside.json", lasso.dump(2));
  CHECK(run({"explain", (dir / "outside.json").string()}).code == cli::kViolated);

  lasso = json::parse(testing::read_text(lasso_path));
  lasso["spec_text"] = "pattern Broken\n\narchitecture\n  component x : Nope ()\n";
  write_file(dir / "badspec.json", lasso.dump(2));
  CHECK(run({"explain", (dir / "badspec.json").string()}).code == cli::kInvalidSpec);

  write_file(dir / "garbage.json", "{ not json");
  CHECK(run({"explain", (dir / "garbage.json").string()}).code == cli::kUsage);
}

TEST_CASE("limits and evaluation errors map to their exit codes") {
  CHECK(run({"check", "--pattern", "mvc", "--max-states", "200"}).code == cli::kInconclusive);
  const fs::path dir = scratch_dir("errors");
  write_file(dir / "overflow.arch", kOverflow);
  const Run r = run({"check", (dir / "overflow.arch").string(), "--format", "json"});
  CHECK(r.code == cli::kInvalidSpec);
  const json doc = json::parse(r.out);
  CHECK(doc.at("properties")[0].at("status") == "error");
  CHECK(doc.at("properties")[0].contains("error_state"));
}

TEST_CASE("emit writes the golden MVC document") {
  const fs::path dir = scratch_dir("emit");
  const Run r = run({"emit", "--pattern", "mvc", "-o", (dir / "mvc.smv").string()});
  CHECK(r.code == cli::kOk);
  const std::string text = testing::read_text((dir / "mvc.smv").string());
  CHECK(testing::normalize_smv(text) ==
        testing::normalize_smv(testing::read_text(testing::source_path("tests/golden/mvc.smv"))));
  const Run stdout_run = run({"emit", pattern_file("mvc")});
  CHECK(stdout_run.code == cli::kOk);
  CHECK(stdout_run.out == text);
}

TEST_CASE("patterns list and show") {
  const Run r = run({"patterns", "list"});
  CHECK(r.code == cli::kOk);
  for (const auto& id : pattern_ids()) CHECK(r.out.find(id) != std::string::npos);
  for (const auto& id : mutant_ids()) CHECK(r.out.find(id) != std::string::npos);
  const Run s = run({"patterns", "show", "broker"});
  CHECK(s.code == cli::kOk);
  CHECK(s.out == testing::read_text(pattern_file("broker")));
  CHECK(run({"patterns", "show", "nosuch"}).code == cli::kUsage);
}
