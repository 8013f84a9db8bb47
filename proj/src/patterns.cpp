#include "archpat/patterns.hpp"

#include "archpat/parser.hpp"

namespace archpat {

namespace {

ExprPtr E(std::string_view text) {
  auto r = parse_expr(text, "<builtin>");
  if (!r.expr) throw std::logic_error("built-in expression does not parse: " + std::string(text));
  return r.expr;
}

PortDecl local(std::string name, Sort sort) { return {std::move(name), PortKind::Local, std::move(sort), {}}; }
PortDecl in(std::string name, Sort sort) { return {std::move(name), PortKind::Input, std::move(sort), {}}; }
PortDecl out(std::string name, Sort sort) { return {std::move(name), PortKind::Output, std::move(sort), {}}; }

Assignment set(std::string port, std::string_view value) { return {std::move(port), std::nullopt, E(value), {}}; }
Assignment set_at(std::string port, std::int64_t element, std::string_view value) {
  return {std::move(port), element, E(value), {}};
}
Transition trans(std::string from, std::string to, std::string_view guard) {
  return {std::move(from), std::move(to), E(guard), {}};
}
Definition def(std::string name, std::string_view value) { return {std::move(name), E(value), {}}; }
Binding bind(std::string port, std::string_view value) { return {std::move(port), E(value), {}}; }
EnvVar env(std::string name, Sort sort, std::string_view init, std::string_view next) {
  return {std::move(name), std::move(sort), E(init), E(next), {}};
}

Sort boolean() { return Sort::boolean(); }
Sort range(std::int64_t lo, std::int64_t hi) { return Sort::range(lo, hi); }

std::string substitute(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [var, value] : values) {
    const std::string key = "${" + var + "}";
    for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + value.size()))
      text.replace(at, key.size(), value);
  }
  return text;
}

LtlPtr formula(const std::string& text) {
  auto r = parse_ltl(text, "<builtin>");
  if (!r.formula) throw std::logic_error("built-in formula does not parse: " + text);
  return r.formula;
}

FamilyBinding unquantified() { return {}; }

// ---------------------------------------------------------------------------
// Singleton
// ---------------------------------------------------------------------------

PatternSpec singleton_spec(bool guarded) {
  PatternSpec p;
  p.name = "Singleton";
  p.interfaces.push_back({"Singleton",
                          {local("active", boolean()), in("activate", boolean()), in("deactivate", boolean()),
                           out("is_active", boolean())},
                          {}});
  BehaviorSpec b;
  b.interface = "Singleton";
  b.control_states = {"dormant", "running"};
  b.initial_control = "dormant";
  b.local_init = {set("active", "false")};
  b.transitions = {trans("dormant", "running", "activate"), trans("running", "dormant", "deactivate")};
  b.local_updates = {set("active",
                         "case controlState = dormant & activate : true; "
                         "controlState = running & deactivate : false; true : active; esac")};
  b.defines = {def("is_active", "active")};
  p.behaviors.push_back(std::move(b));

  auto& a = p.architecture;
  a.instances = {{"s1", "Singleton", {bind("activate", "grant1"), bind("deactivate", "release")}, {}},
                 {"s2", "Singleton", {bind("activate", "grant2"), bind("deactivate", "release")}, {}}};
  a.env_vars = {env("request", boolean(), "false", "{false, true}"),
                env("release", boolean(), "false", "{false, true}"),
                env("pick", range(0, 1), "0", "{0, 1}"),
                env("pending", boolean(), "false", "case request : true; granted : false; true : pending; esac")};
  a.shared_defs = {def("any_active", "s1.is_active | s2.is_active"), def("granted", "pending & any_active")};
  if (guarded) {
    a.shared_defs.push_back(def("grant1", "pending & !any_active & pick = 0"));
    a.shared_defs.push_back(def("grant2", "pending & !any_active & pick = 1"));
  } else {
    a.shared_defs.push_back(def("grant1", "pending & pick = 0"));
    a.shared_defs.push_back(def("grant2", "pending & pick = 1"));
  }
  a.shared_defs.push_back(
      def("active_count", "case s1.is_active : 1; true : 0; esac + case s2.is_active : 1; true : 0; esac"));
  return p;
}

PatternCatalogEntry make_singleton() {
  PatternCatalogEntry e;
  e.id = "singleton";
  e.spec = singleton_spec(true);
  e.property_families = {
      {"S1", "G (request -> F granted)", "none", {unquantified()}},
      {"S2", "G (active_count <= 1)", "none", {unquantified()}},
  };
  e.alternatives = {{"S2-strict", formula("G (active(s1) -> G !active(s2)) & G (active(s2) -> G !active(s1))"), {}}};
  e.notes =
      "Reconstructed model. One component type (Singleton) with a pool of two potential instances s1 and s2, "
      "each carrying a boolean activation flag `active`. The activation manager lives in the architecture: "
      "env variables request, release and pick are free inputs, `pending` remembers an unanswered request, "
      "and grant1/grant2 activate an instance only while none is active. S1 and S2 follow the published "
      "property table; S2 uses the 'none or one' reading. S2-strict (the same instance for ever) is shipped "
      "as an alternative reading that is expected to fail.";
  return e;
}

// ---------------------------------------------------------------------------
// MVC
// ---------------------------------------------------------------------------

PatternSpec mvc_spec(const std::string& view_initial) {
  PatternSpec p;
  p.name = "MVC";
  const Sort data_sort = Sort::array(0, 2, range(0, 10));
  const Sort output_sort = Sort::array(0, 2, range(-1, 10));
  p.interfaces.push_back({"Model",
                          {in("service", range(-1, 2)), in("getData", boolean()), out("output", output_sort),
                           out("notificate", boolean()), local("service_ele", range(-1, 2)),
                           local("data", data_sort)},
                          {}});
  p.interfaces.push_back({"View",
                          {in("notification", boolean()), in("model_data", output_sort), in("element", range(0, 2)),
                           out("getData", boolean()), local("view_data", range(0, 10)),
                           local("view_ele", range(0, 2))},
                          {}});
  p.interfaces.push_back({"Controller",
                          {in("contr_id", range(0, 3)), in("random", range(0, 3)), out("service", range(-1, 2)),
                           local("event_actual", range(-1, 2))},
                          {}});

  BehaviorSpec model;
  model.interface = "Model";
  model.control_states = {"Update", "Notification"};
  model.initial_control = "Update";
  model.local_init = {set("service_ele", "-1"), set_at("data", 0, "7"), set_at("data", 1, "5"),
                      set_at("data", 2, "3")};
  model.transitions = {trans("Update", "Notification", "service != -1"), trans("Notification", "Update", "true")};
  model.local_updates = {set("service_ele", "service")};
  const char* increments[] = {"7", "5", "3"};
  for (int k = 0; k < 3; ++k) {
    const std::string i = std::to_string(k);
    model.local_updates.push_back(set_at("data", k,
                                         "case controlState = Notification & service_ele = " + i + " : (data[" + i +
                                             "] + " + increments[k] + ") mod 10; true : data[" + i + "]; esac"));
  }
  model.defines = {def("output", "case getData : data; true : output_empty; esac"),
                   def("output_empty", "[-1, -1, -1]"),
                   def("notificate", "case controlState = Notification : true; true : false; esac")};
  p.behaviors.push_back(std::move(model));

  BehaviorSpec view;
  view.interface = "View";
  view.control_states = {"busy", "idle"};
  view.initial_control = view_initial;
  view.local_init = {set("view_data", "0"), set("view_ele", "element")};
  view.transitions = {trans("busy", "idle", "true"), trans("idle", "busy", "notification")};
  view.local_updates = {set("view_data", "case controlState = busy : model_data[view_ele]; true : view_data; esac")};
  view.defines = {def("getData", "controlState = busy")};
  p.behaviors.push_back(std::move(view));

  BehaviorSpec controller;
  controller.interface = "Controller";
  controller.control_states = {"control"};
  controller.initial_control = "control";
  controller.local_init = {set("event_actual", "-1")};
  controller.local_updates = {
      set("event_actual", "case random = contr_id : {-1, 0, 1, 2}; true : -1; esac")};
  controller.defines = {def("service", "case random = contr_id : event_actual; true : -1; esac")};
  p.behaviors.push_back(std::move(controller));

  auto& a = p.architecture;
  for (int k = 1; k <= 3; ++k) {
    const std::string n = std::to_string(k);
    a.instances.push_back({"view" + n,
                           "View",
                           {bind("notification", "model.notificate"), bind("model_data", "model.output"),
                            bind("element", std::to_string(k - 1))},
                           {}});
    a.instances.push_back(
        {"controller" + n, "Controller", {bind("contr_id", n), bind("random", "random")}, {}});
  }
  a.instances.push_back({"model", "Model", {bind("service", "service"), bind("getData", "getData")}, {}});
  a.env_vars = {env("random", range(0, 3), "0", "{1, 2, 3}")};
  a.shared_defs = {def("service", "controller1.service + controller2.service + controller3.service + 2"),
                   def("getData", "view1.getData | view2.getData | view3.getData")};
  return p;
}

PatternCatalogEntry make_mvc() {
  PatternCatalogEntry e;
  e.id = "mvc";
  e.spec = mvc_spec("busy");
  PropertyFamily m1{"M1",
                    "G ((controller1.service + controller2.service + controller3.service) > -3 -> "
                    "(F view1.getData) & (F view2.getData) & (F view3.getData))",
                    "none: the conjunction over the three views is written out",
                    {unquantified()}};
  PropertyFamily m2{"M2", "G (model.data[${v}.view_ele] = ${x} -> F ${v}.view_data = ${x})",
                    "x in 0..9 (outer) and v in view1..view3 (inner), first 29 bindings", {}};
  for (int x = 0; x <= 9; ++x) {
    for (int v = 1; v <= 3; ++v) {
      if (m2.domain.size() == 29) break;
      const std::string view = "view" + std::to_string(v);
      m2.domain.push_back({view + "_v" + std::to_string(x), {{"v", view}, {"x", std::to_string(x)}}});
    }
  }
  e.property_families = {m1, m2};
  e.notes =
      "Model module reproduced from the published SMV listing (names as in the interface table: "
      "`notificate`). Main module wiring, `random` arbitration and the `+ 2` service shift are also published. "
      "View and Controller behaviors are reconstructed from the state-machine descriptions. Controllers emit "
      "an event only when `random` selects them; an event chosen in one step is offered in the next. The "
      "`output` port is typed -1..10 so that the empty output [-1, -1, -1] is in range. M2 expands in "
      "value-major order and is capped at 29 instances so that M1 + M2 = 30.";
  return e;
}

// ---------------------------------------------------------------------------
// Broker
// ---------------------------------------------------------------------------

PatternSpec broker_spec(bool acknowledges) {
  PatternSpec p;
  p.name = "Broker";
  const Sort svc = range(-1, 2);
  p.interfaces.push_back({"Driver",
                          {local("who", range(0, 4)), local("svc", range(0, 2)), out("want1", svc),
                           out("want2", svc), out("offer1", svc), out("offer2", svc)},
                          {}});
  p.interfaces.push_back({"Client",
                          {local("pending", svc), in("want", svc), in("avail0", boolean()), in("avail1", boolean()),
                           in("avail2", boolean()), in("done", boolean()), out("request", svc)},
                          {}});
  p.interfaces.push_back({"Server",
                          {local("offered", svc), local("current", svc), in("offer", svc), in("ack", boolean()),
                           in("job", svc), out("reg_request", svc), out("registered", svc),
                           out("ready", boolean()), out("executing", svc)},
                          {}});
  p.interfaces.push_back({"Broker",
                          {local("registry", Sort::array(0, 1, svc)), local("job_svc", svc),
                           local("job_client", range(0, 1)), local("turn", range(0, 1)), in("req1", svc),
                           in("req2", svc), in("reg1", svc), in("reg2", svc), in("ready1", boolean()),
                           in("ready2", boolean()), out("avail0", boolean()), out("avail1", boolean()),
                           out("avail2", boolean()), out("ack1", boolean()), out("ack2", boolean()),
                           out("job1", svc), out("job2", svc), out("done1", boolean()), out("done2", boolean())},
                          {}});

  BehaviorSpec driver;
  driver.interface = "Driver";
  driver.control_states = {"drive"};
  driver.initial_control = "drive";
  driver.local_init = {set("who", "0"), set("svc", "0")};
  driver.local_updates = {set("who", "{0, 1, 2, 3, 4}"), set("svc", "{0, 1, 2}")};
  driver.defines = {def("want1", "case who = 1 : svc; true : -1; esac"),
                    def("want2", "case who = 2 : svc; true : -1; esac"),
                    def("offer1", "case who = 3 : svc; true : -1; esac"),
                    def("offer2", "case who = 4 : svc; true : -1; esac")};
  p.behaviors.push_back(std::move(driver));

  BehaviorSpec client;
  client.interface = "Client";
  client.control_states = {"idle", "waiting"};
  client.initial_control = "idle";
  client.local_init = {set("pending", "-1")};
  client.transitions = {trans("idle", "waiting", "can_request"), trans("waiting", "idle", "done")};
  client.local_updates = {set("pending",
                              "case controlState = idle & can_request : want; "
                              "controlState = waiting & done : -1; true : pending; esac")};
  client.defines = {def("can_request", "want = 0 & avail0 | want = 1 & avail1 | want = 2 & avail2"),
                    def("request", "case controlState = waiting : pending; true : -1; esac")};
  p.behaviors.push_back(std::move(client));

  BehaviorSpec server;
  server.interface = "Server";
  server.control_states = {"unregistered", "registering", "serving", "busy"};
  server.initial_control = "unregistered";
  server.local_init = {set("offered", "-1"), set("current", "-1")};
  server.transitions = {trans("unregistered", "registering", "offer != -1"), trans("registering", "serving", "ack"),
                        trans("serving", "busy", "job != -1"), trans("busy", "serving", "true")};
  server.local_updates = {
      set("offered", "case controlState = unregistered & offer != -1 : offer; true : offered; esac"),
      set("current", "case controlState = serving & job != -1 : job; controlState = busy : -1; true : current; esac")};
  server.defines = {def("reg_request", "case controlState = registering : offered; true : -1; esac"),
                    def("registered", "case controlState = serving | controlState = busy : offered; true : -1; esac"),
                    def("ready", "controlState = serving"),
                    def("executing", "case controlState = busy : current; true : -1; esac")};
  p.behaviors.push_back(std::move(server));

  BehaviorSpec broker;
  broker.interface = "Broker";
  broker.control_states = {"free", "forwarding"};
  broker.initial_control = "free";
  broker.local_init = {set("registry", "[-1, -1]"), set("job_svc", "-1"), set("job_client", "0"), set("turn", "0")};
  broker.transitions = {trans("free", "forwarding", "has_request"), trans("forwarding", "free", "accepted")};
  broker.local_updates = {
      set_at("registry", 0, "case reg1 != -1 : reg1; true : registry[0]; esac"),
      set_at("registry", 1, "case reg2 != -1 : reg2; true : registry[1]; esac"),
      set("job_svc",
          "case controlState = free & has_request : case pick = 0 : req1; true : req2; esac; "
          "controlState = forwarding & accepted : -1; true : job_svc; esac"),
      set("job_client", "case controlState = free & has_request : pick; true : job_client; esac"),
      set("turn", "case controlState = free & has_request : (pick + 1) mod 2; true : turn; esac")};
  broker.defines = {
      def("has_request", "req1 != -1 | req2 != -1"),
      def("pick", "case turn = 0 & req1 != -1 : 0; turn = 1 & req2 != -1 : 1; req1 != -1 : 0; true : 1; esac"),
      def("target", "case registry[0] = job_svc : 0; true : 1; esac"),
      def("accepted", "case target = 0 : ready1; true : ready2; esac"),
      def("avail0", "registry[0] = 0 | registry[1] = 0"),
      def("avail1", "registry[0] = 1 | registry[1] = 1"),
      def("avail2", "registry[0] = 2 | registry[1] = 2"),
      def("ack1", acknowledges ? "reg1 != -1" : "false"),
      def("ack2", acknowledges ? "reg2 != -1" : "false"),
      def("job1", "case controlState = forwarding & target = 0 & accepted : job_svc; true : -1; esac"),
      def("job2", "case controlState = forwarding & target = 1 & accepted : job_svc; true : -1; esac"),
      def("done1", "controlState = forwarding & accepted & job_client = 0"),
      def("done2", "controlState = forwarding & accepted & job_client = 1")};
  p.behaviors.push_back(std::move(broker));

  auto& a = p.architecture;
  for (int k = 1; k <= 2; ++k) {
    const std::string n = std::to_string(k);
    a.instances.push_back({"client" + n,
                           "Client",
                           {bind("want", "driver.want" + n), bind("avail0", "broker.avail0"),
                            bind("avail1", "broker.avail1"), bind("avail2", "broker.avail2"),
                            bind("done", "broker.done" + n)},
                           {}});
  }
  for (int k = 1; k <= 2; ++k) {
    const std::string n = std::to_string(k);
    a.instances.push_back({"server" + n,
                           "Server",
                           {bind("offer", "driver.offer" + n), bind("ack", "broker.ack" + n),
                            bind("job", "broker.job" + n)},
                           {}});
  }
  a.instances.push_back({"broker",
                         "Broker",
                         {bind("req1", "client1.request"), bind("req2", "client2.request"),
                          bind("reg1", "server1.reg_request"), bind("reg2", "server2.reg_request"),
                          bind("ready1", "server1.ready"), bind("ready2", "server2.ready")},
                         {}});
  a.instances.push_back({"driver", "Driver", {}, {}});
  return p;
}

PatternCatalogEntry make_broker() {
  PatternCatalogEntry e;
  e.id = "broker";
  e.spec = broker_spec(true);
  std::vector<FamilyBinding> services;
  for (int s = 0; s <= 2; ++s) services.push_back({"s" + std::to_string(s), {{"s", std::to_string(s)}}});
  e.property_families = {
      {"B1",
       "G (client1.request = ${s} | client2.request = ${s} -> F (server1.executing = ${s} | server2.executing = ${s}))",
       "s in 0..2", services},
      {"B2",
       "G (server1.reg_request = ${s} | server2.reg_request = ${s} -> "
       "F (server1.registered = ${s} | server2.registered = ${s}))",
       "s in 0..2", services},
  };
  e.notes =
      "Reconstructed model with six components: two clients, two servers, one broker and an environment "
      "driver. Servers register one service id (0..2) with the broker and are acknowledged at once; clients "
      "may only request services currently registered (restricted requesting) and the broker forwards one "
      "request at a time, alternating between clients, to the first registered server. No bridge and no "
      "marshalling. B1 and B2 follow the published property table, instantiated per service id.";
  return e;
}

const std::vector<PatternCatalogEntry>& catalog() {
  static const std::vector<PatternCatalogEntry> entries = [] {
    std::vector<PatternCatalogEntry> entries{make_singleton(), make_mvc(), make_broker()};
    for (auto& e : entries) e.spec.properties = expand_properties(e);
    return entries;
  }();
  return entries;
}

const std::vector<Mutant>& mutants() {
  static const std::vector<Mutant> m = [] {
    std::vector<Mutant> m;
    auto add = [&](std::string id, const std::string& pattern, std::string name, PatternSpec spec,
                   std::string text) {
      spec.name = std::move(name);
      spec.properties = get_pattern(pattern).spec.properties;
      m.push_back({std::move(id), pattern, std::move(text), std::move(spec)});
    };
    add("mvc_mutant_idle", "mvc", "MVC_mutant_idle", mvc_spec("idle"),
        "views start in idle and skip the startup data request");
    add("singleton_mutant_noguard", "singleton", "Singleton_mutant_noguard", singleton_spec(false),
        "grants ignore whether an instance is already active");
    add("broker_mutant_noack", "broker", "Broker_mutant_noack", broker_spec(false),
        "the broker never acknowledges registrations");
    return m;
  }();
  return m;
}

}  // namespace

std::vector<std::string> pattern_ids() { return {"singleton", "mvc", "broker"}; }

const PatternCatalogEntry& get_pattern(const std::string& id) {
  for (const auto& e : catalog())
    if (e.id == id) return e;
  throw UnknownPattern(id);
}

std::vector<Property> expand_properties(const PatternCatalogEntry& entry) {
  std::vector<Property> out;
  for (const auto& family : entry.property_families) {
    for (const auto& binding : family.domain) {
      std::string name = family.name;
      if (!binding.suffix.empty()) name += "@" + binding.suffix;
      out.push_back({std::move(name), formula(substitute(family.template_text, binding.values)), {}});
    }
  }
  return out;
}

std::vector<std::string> mutant_ids() {
  std::vector<std::string> ids;
  for (const auto& m : mutants()) ids.push_back(m.id);
  return ids;
}

const Mutant& get_mutant(const std::string& id) {
  for (const auto& m : mutants())
    if (m.id == id) return m;
  throw UnknownPattern(id);
}

}  // namespace archpat
