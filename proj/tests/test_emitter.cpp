#include <doctest.h>

#include <algorithm>

#include "archpat/emitter.hpp"
#include "archpat/patterns.hpp"
#include "support.hpp"

using namespace archpat;
using archpat::testing::ltl_or_die;
using archpat::testing::normalize_smv;
using archpat::testing::parse_or_die;
using archpat::testing::smv_module;
using archpat::testing::smv_tokens;

namespace {

std::string golden(const std::string& name) { return testing::read_text(testing::source_path("tests/golden/" + name)); }

std::size_t count(const std::vector<std::string>& tokens, const std::string& t) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), t));
}

const char* kClock = R"(pattern Clock

interface Osc
  out phase : bool
  local p : bool

behavior Osc states on init on
  init p := false
  next p := !p
  define phase := p

architecture
  component osc : Osc ()

property Flips : G (osc.phase -> X !osc.phase)
)";

}  // namespace

TEST_CASE("MVC document matches the golden file") {
  const SmvDocument doc = emit_file(get_pattern("mvc").spec);
  CHECK(normalize_smv(doc.rendered) == normalize_smv(golden("mvc.smv")));
}

TEST_CASE("MVC model and main modules match the published listings") {
  const std::string emitted = emit_file(get_pattern("mvc").spec).rendered;
  const std::string model = smv_module(golden("published_model.smv"), "model");
  const std::string main = smv_module(golden("published_main.smv"), "main");
  REQUIRE_FALSE(model.empty());
  REQUIRE_FALSE(main.empty());
  CHECK(normalize_smv(smv_module(emitted, "model")) == normalize_smv(model));
  CHECK(normalize_smv(smv_module(emitted, "main")) == normalize_smv(main));
}

TEST_CASE("emission is byte-deterministic and hashed") {
  for (const auto& id : pattern_ids()) {
    CAPTURE(id);
    const PatternSpec& spec = get_pattern(id).spec;
    const SmvDocument a = emit_file(spec);
    const SmvDocument b = emit_file(spec);
    CHECK(a.rendered == b.rendered);
    CHECK(a.rendered.rfind(a.header, 0) == 0);
    const std::string body = a.rendered.substr(a.header.size());
    CHECK(a.header.find("fnv1a64:" + content_hash(body)) != std::string::npos);
    CHECK(a.header.find(std::string("-- generator: ") + kToolVersion) != std::string::npos);
    CHECK(a.header.find("-- pattern: " + spec.name) != std::string::npos);
    CHECK(a.modules.size() == spec.interfaces.size() + 2);

    const auto reparsed = parse_pattern(pretty_print(spec));
    REQUIRE(reparsed.ok());
    CHECK(emit_file(*reparsed.spec).rendered == a.rendered);
  }
  CHECK(content_hash("") == "cbf29ce484222325");
  CHECK(content_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("module structure follows the interface") {
  for (const auto& id : pattern_ids()) {
    const PatternSpec& spec = get_pattern(id).spec;
    for (const auto& iface : spec.interfaces) {
      CAPTURE(iface.name);
      const BehaviorSpec* beh = spec.find_behavior(iface.name);
      REQUIRE(beh);
      const auto tokens = smv_tokens(emit_module(iface, *beh));
      REQUIRE(tokens.size() > 2);
      CHECK(tokens[0] == "MODULE");
      CHECK(tokens[1] == module_name(iface.name));
      const auto inputs = iface.ports_of(PortKind::Input);
      if (!inputs.empty()) {
        REQUIRE(tokens[2] == "(");
        for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(tokens[3 + 2 * i] == inputs[i]->name);
        CHECK(tokens[2 + 2 * inputs.size()] == ")");
      }
      CHECK(count(tokens, "VAR") == 1);
      CHECK(count(tokens, "controlState") >= 2);
      CHECK(count(tokens, "next") >= beh->local_updates.size());
      CHECK(count(tokens, "case") == count(tokens, "esac"));
      for (const auto* out : iface.ports_of(PortKind::Output)) CHECK(count(tokens, out->name) >= 1);
      for (const auto* local : iface.ports_of(PortKind::Local)) CHECK(count(tokens, local->name) >= 2);
    }
  }
}

TEST_CASE("a module without inputs has no parameter list") {
  const PatternSpec spec = parse_or_die(kClock);
  const std::string m = emit_module(spec.interfaces[0], spec.behaviors[0]);
  CHECK(m.rfind("MODULE osc\n", 0) == 0);
  const std::string main = emit_main(spec);
  CHECK(main.rfind("MODULE main\n", 0) == 0);
  CHECK(main.find("osc : osc;") != std::string::npos);
  const std::string doc = emit_file(spec).rendered;
  CHECK(doc.find("LTLSPEC G (osc.phase -> (X (!osc.phase)))") != std::string::npos);
}

TEST_CASE("LTL rendering") {
  CHECK(to_smv(*ltl_or_die("G true")) == "G TRUE");
  CHECK(to_smv(*ltl_or_die("F a & G b")) == "(F a) & (G b)");
  CHECK(to_smv(*ltl_or_die("a U b")) == "a U b");
  CHECK(to_smv(*ltl_or_die("(a U b) & c")) == "(a U b) & c");
  CHECK(to_smv(*ltl_or_die("G (a -> X b)")) == "G (a -> (X b))");
  CHECK(to_smv(*ltl_or_die("(F a | F b) & F c")) == "((F a) | (F b)) & (F c)");
  CHECK(emit_ltlspecs({{"T", ltl_or_die("G true"), {}}}) == "-- T\nLTLSPEC G TRUE\n");
  CHECK_THROWS_AS(to_smv(*ltl_or_die("G active(s1)")), UnsupportedAtom);
  CHECK(to_smv(*parse_expr("x[1] + 2 * -y").expr) == "x[1] + 2 * -y");
  CHECK(to_smv(*parse_expr("{1, 2}").expr) == "{1,2}");
}

TEST_CASE("emit_file refuses invalid specs and unsupported atoms") {
  PatternSpec spec = parse_or_die(kClock);
  spec.properties.push_back({"Act", ltl_or_die("G active(osc)"), {}});
  CHECK_THROWS_AS(emit_file(spec), UnsupportedAtom);

  std::string text = kClock;
  text.replace(text.find("next p := !p"), 12, "next p := !q");
  const auto bad = parse_pattern(text);
  REQUIRE(bad.spec);
  CHECK_THROWS_AS(emit_file(*bad.spec), std::invalid_argument);
}
