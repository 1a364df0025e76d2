// chorrev: check, project, simulate and explore reversible choreographies.

#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "chorrev/ast.hpp"
#include "chorrev/causality.hpp"
#include "chorrev/explorer.hpp"
#include "chorrev/order.hpp"
#include "chorrev/projection.hpp"
#include "chorrev/session.hpp"
#include "chorrev/trace.hpp"

namespace {

using namespace chorrev;
using nlohmann::json;

enum Exit { kOk = 0, kFailed = 1, kParse = 2, kTruncated = 3 };

struct Style {
  bool on = false;
  std::string head(const std::string& s) const { return on ? "\033[1m" + s + "\033[0m" : s; }
  std::string good(const std::string& s) const { return on ? "\033[32m" + s + "\033[0m" : s; }
  std::string bad(const std::string& s) const { return on ? "\033[31m" + s + "\033[0m" : s; }
};

Style style_from_env() {
  const char* env = std::getenv("CHORREV_COLOR");
  if (env) return {std::string(env) == "1"};
  return {isatty(STDOUT_FILENO) != 0};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  std::optional<Choreography> g;
  int code = kOk;
};

Loaded load(const std::string& path, bool json_out, const std::string& command) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return {std::nullopt, kFailed};
  }
  try {
    return {parse_choreography(text), kOk};
  } catch (const ParseError& e) {
    if (json_out) {
      std::cout << envelope(command, false, {{"parseError", {{"line", e.line}, {"column", e.column}, {"message", e.what()}}}})
                       .dump(2)
                << "\n";
    } else {
      std::cerr << path << ":" << e.what() << "\n";
    }
    return {std::nullopt, kParse};
  }
}

void collect_choices(const Choreography& g, std::vector<const Choreography*>& out) {
  if (g.kind == Choreography::Kind::Choice) out.push_back(&g);
  for (const auto& c : g.children) collect_choices(c, out);
}

int cmd_check(const std::string& file, bool json_out, const Style& st) {
  auto loaded = load(file, json_out, "check");
  if (!loaded.g) return loaded.code;
  const Choreography& g = *loaded.g;

  json report;
  bool ok = true;
  json violations = json::array();
  auto v = validate(g);
  for (const auto& x : v.violations) {
    violations.push_back({{"kind", to_string(x.kind)}, {"cp", x.cp}, {"detail", x.detail}});
  }
  ok = ok && v.ok();
  report["violations"] = violations;

  json choices = json::array();
  json order = {{"defined", false}};
  if (v.ok()) {
    std::vector<const Choreography*> cs;
    collect_choices(g, cs);
    for (const auto* c : cs) {
      auto wb = well_branched(*c);
      auto active = active_participant(*c);
      json entry = {{"cp", c->cp}, {"wellBranched", wb.ok}, {"problems", wb.problems}};
      if (is_defined(active)) entry["active"] = std::get<Participant>(active);
      choices.push_back(entry);
      ok = ok && wb.ok;
    }
    auto sem = semantics(g);
    if (is_defined(sem)) {
      order = {{"defined", true}, {"events", std::get<EventOrder>(sem).size()}};
    } else {
      const auto& u = std::get<Undefined>(sem);
      order = {{"defined", false}, {"construct", u.construct}, {"reason", u.reason}};
      if (u.witness) order["witness"] = {u.witness->first, u.witness->second};
      ok = false;
    }
  }
  report["choices"] = choices;
  report["order"] = order;
  std::vector<std::string> parts;
  for (const auto& p : participants(g)) parts.push_back(p);
  report["participants"] = parts;
  report["controlPoints"] = control_points(g);

  if (json_out) {
    std::cout << envelope("check", ok, report).dump(2) << "\n";
  } else {
    for (const auto& x : v.violations) {
      std::cout << st.bad("violation") << " " << to_string(x.kind) << " at cp " << x.cp << ": " << x.detail << "\n";
    }
    for (const auto& c : choices) {
      if (!c["wellBranched"].get<bool>()) {
        std::cout << st.bad("choice") << " " << c["cp"] << " is not well-branched:";
        for (const auto& p : c["problems"]) std::cout << " " << p.get<std::string>() << ";";
        std::cout << "\n";
      }
    }
    if (v.ok() && !order["defined"].get<bool>()) {
      std::cout << st.bad("order") << " undefined at " << order.value("construct", "") << ": "
                << order.value("reason", "") << "\n";
    }
    std::cout << (ok ? st.good("ok") : st.bad("failed")) << ": " << parts.size() << " participants, "
              << control_points(g).size() << " control points\n";
  }
  return ok ? kOk : kFailed;
}

int cmd_project(const std::string& file, const std::string& participant, const std::string& dot_dir,
                const Style& st) {
  auto loaded = load(file, false, "project");
  if (!loaded.g) return loaded.code;
  System sys;
  try {
    sys = project_system(*loaded.g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  if (!participant.empty() && !sys.count(participant)) {
    std::cerr << "error: unknown participant '" << participant << "'\n";
    return kFailed;
  }
  for (const auto& [a, m] : sys) {
    if (!participant.empty() && a != participant) continue;
    if (!dot_dir.empty()) {
      std::filesystem::create_directories(dot_dir);
      auto path = std::filesystem::path(dot_dir) / (a + ".dot");
      std::ofstream out(path);
      out << to_dot(m);
      if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return kFailed;
      }
      std::cout << "wrote " << path.string() << "\n";
    } else {
      std::cout << st.head(a) << "\n" << describe(m);
    }
  }
  return kOk;
}

struct SimulateFlags {
  std::string schedule;
  bool interactive = false;
  std::optional<int> auto_steps;
  std::uint64_t seed = 0;
  int max_steps = 1000;
  std::string trace;
  std::string guard_scope = "full";
  bool block_on_guard = false;
  bool dump_causality = false;
};

json causality_dump(const Session& s) {
  CausalGraph graph(s.config().channels, s.context());
  json logs = json::array();
  for (const auto& r : graph.logs()) {
    const Log* l = find_log(s.config().channels, r);
    logs.push_back(to_json(make_log_record(r.channel, *l, s.system())));
  }
  auto pairs = [&](const std::vector<std::pair<LogRef, LogRef>>& es) {
    json out = json::array();
    for (const auto& [a, b] : es) out.push_back({*graph.index_of(a), *graph.index_of(b)});
    return out;
  };
  return {{"logs", logs},
          {"base", pairs(graph.base_edges())},
          {"closure", pairs(graph.closure_edges())},
          {"antisymmetryViolations", pairs(graph.antisymmetry_violations())}};
}

void print_state(const Session& s, const Style& st) {
  std::cout << st.head("configuration") << "\n" << describe(s.config(), s.system());
}

int repl(Session& s, std::mt19937_64& rng, int max_steps, const Style& st) {
  int steps = 0;
  std::string line;
  for (;;) {
    print_state(s, st);
    auto moves = s.moves();
    std::cout << st.head("enabled") << "\n";
    if (moves.empty()) std::cout << "  (none)\n";
    for (std::size_t i = 0; i < moves.size(); ++i) std::cout << "  [" << i << "] " << s.describe(moves[i]) << "\n";
    std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    if (cmd.empty()) continue;
    if (cmd == "quit" || cmd == "q" || cmd == "exit") break;
    if (cmd == "help") {
      std::cout << "  N        take move N\n  auto [K]  take K random moves (default 1)\n  quit\n";
      continue;
    }
    if (cmd == "auto") {
      int k = 1;
      in >> k;
      k = std::min(k, max_steps - steps);
      steps += static_cast<int>(s.run_random(static_cast<std::size_t>(std::max(0, k)), rng));
      continue;
    }
    try {
      std::size_t idx = std::stoul(cmd);
      if (idx >= moves.size()) throw std::out_of_range("index");
      if (steps >= max_steps) {
        std::cout << "step limit reached\n";
        continue;
      }
      auto rec = s.play(moves[idx]);
      ++steps;
      std::cout << to_json(rec).dump() << "\n";
    } catch (const std::exception&) {
      std::cout << "unknown command '" << line << "' (try help)\n";
    }
  }
  return kOk;
}

int cmd_simulate(const std::string& file, const SimulateFlags& f, const Style& st) {
  auto loaded = load(file, false, "simulate");
  if (!loaded.g) return loaded.code;
  RuntimeOptions opts;
  opts.scope = f.guard_scope == "pending" ? GuardScope::PendingOnly : GuardScope::Full;
  opts.block_on_guard = f.block_on_guard;

  std::optional<Session> session;
  try {
    session.emplace(*loaded.g, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  Session& s = *session;
  std::mt19937_64 rng(f.seed);
  int code = kOk;

  if (f.interactive) {
    code = repl(s, rng, f.max_steps, st);
  } else if (f.auto_steps) {
    s.run_random(static_cast<std::size_t>(std::min(*f.auto_steps, f.max_steps)), rng);
  } else {
    std::vector<Directive> schedule;
    try {
      schedule = schedule_from_json(json::parse(read_file(f.schedule)));
    } catch (const std::exception& e) {
      std::cerr << "error: bad schedule: " << e.what() << "\n";
      return kFailed;
    }
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      if (static_cast<int>(s.trace().size()) >= f.max_steps) break;
      Directive d = schedule[i];
      if (d.kind == Directive::Kind::Auto) d.count = std::min(d.count, f.max_steps - static_cast<int>(s.trace().size()));
      std::string why;
      if (!s.apply(d, rng, &why)) {
        std::cerr << "error: directive " << i << ": " << why << "\n";
        code = kFailed;
        break;
      }
    }
  }

  if (!f.interactive) {
    for (const auto& r : s.trace()) std::cout << to_json(r).dump() << "\n";
    print_state(s, st);
  }
  if (!f.trace.empty()) {
    std::ofstream out(f.trace);
    out << to_json(s.trace()).dump(2) << "\n";
    if (!out) {
      std::cerr << "error: cannot write " << f.trace << "\n";
      return kFailed;
    }
  }
  if (f.dump_causality) {
    std::cout << envelope("simulate", code == kOk,
                          {{"final", to_json(s.config(), s.system())}, {"causality", causality_dump(s)}})
                     .dump(2)
              << "\n";
  }
  return code;
}

int cmd_explore(const std::string& file, const std::string& bound_text, const std::string& check, bool json_out,
                const Style& st) {
  auto loaded = load(file, json_out, "explore");
  if (!loaded.g) return loaded.code;
  ExploreOptions opts;
  try {
    opts.bound = parse_bound(bound_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  System sys;
  std::optional<CausalContext> ctx;
  try {
    sys = project_system(*loaded.g);
    ctx.emplace(*loaded.g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }

  std::vector<Verdict> verdicts;
  if (check == "soundness" || check == "all") verdicts.push_back(check_soundness(sys, *ctx, opts));
  if (check == "completeness" || check == "all") verdicts.push_back(check_completeness(sys, *ctx, opts));
  if (check == "causal-consistency" || check == "all") verdicts.push_back(check_causal_consistency(sys, *ctx, opts));

  bool failed = false, truncated = false;
  json report = json::array();
  json counterexample = nullptr;
  for (const auto& v : verdicts) {
    report.push_back(to_json(v, sys));
    failed = failed || !v.pass;
    truncated = truncated || v.truncated;
    if (!v.pass && counterexample.is_null() && !v.counterexample.empty()) counterexample = to_json(v.counterexample);
  }
  const int code = failed ? kFailed : truncated ? kTruncated : kOk;
  if (json_out) {
    std::cout << envelope("explore", code == kOk, report, counterexample).dump(2) << "\n";
  } else {
    for (const auto& v : verdicts) {
      std::string tag = !v.pass ? st.bad("FAIL") : v.truncated ? st.bad("TRUNCATED") : st.good("PASS");
      std::cout << tag << " " << v.property << ": " << v.decorated_states << " decorated, " << v.plain_states
                << " plain, " << v.checked << " checked";
      if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
      std::cout << "\n";
    }
    if (!counterexample.is_null()) std::cout << counterexample.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversible choreographies: check, project, simulate, explore"};
  app.set_version_flag("--version", std::string(chorrev::kToolVersion));
  app.require_subcommand(1);
  const Style st = style_from_env();

  std::string file;
  bool json_out = false;

  auto* check = app.add_subcommand("check", "Validate a choreography");
  check->add_option("FILE", file, "Choreography source (.rchor)")->required();
  check->add_flag("--json", json_out, "Print the diagnostic envelope");

  std::string participant, dot_dir;
  auto* project = app.add_subcommand("project", "Project onto local machines");
  project->add_option("FILE", file, "Choreography source (.rchor)")->required();
  project->add_option("--participant", participant, "Only this participant");
  project->add_option("--dot", dot_dir, "Write one DOT file per machine into this directory");

  SimulateFlags sim;
  int auto_steps = 0;
  auto* simulate = app.add_subcommand("simulate", "Run the projected system");
  simulate->add_option("FILE", file, "Choreography source (.rchor)")->required();
  auto* o_schedule = simulate->add_option("--schedule", sim.schedule, "JSON schedule to execute");
  auto* o_interactive = simulate->add_flag("--interactive", sim.interactive, "Step through a REPL");
  auto* o_auto = simulate->add_option("--auto", auto_steps, "Take N random steps");
  o_schedule->excludes(o_interactive, o_auto);
  o_interactive->excludes(o_auto);
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--max-steps", sim.max_steps, "Upper bound on executed steps");
  simulate->add_option("--trace", sim.trace, "Write the executed trace as JSON");
  simulate->add_option("--guard-scope", sim.guard_scope, "Guard evaluation scope")
      ->check(CLI::IsMember({"pending", "full"}));
  simulate->add_flag("--block-on-guard", sim.block_on_guard, "Block branch outputs while their guard holds");
  simulate->add_flag("--dump-causality", sim.dump_causality, "Print the causality relation of the final configuration");

  std::string bound, which = "all";
  auto* explore = app.add_subcommand("explore", "Bounded verification of the reversibility properties");
  explore->add_option("FILE", file, "Choreography source (.rchor)")->required();
  explore->add_option("--bound", bound, "steps=N,rounds=R")->required();
  explore->add_option("--check", which, "Property to check")
      ->check(CLI::IsMember({"soundness", "completeness", "causal-consistency", "all"}));
  explore->add_flag("--json", json_out, "Print the diagnostic envelope");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kParse;
  }

  try {
    if (*check) return cmd_check(file, json_out, st);
    if (*project) return cmd_project(file, participant, dot_dir, st);
    if (*simulate) {
      if (o_auto->count()) sim.auto_steps = auto_steps;
      if (!sim.interactive && !sim.auto_steps && sim.schedule.empty()) {
        std::cerr << "error: one of --schedule, --interactive, --auto is required\n";
        return kParse;
      }
      return cmd_simulate(file, sim, st);
    }
    if (*explore) return cmd_explore(file, bound, which, json_out, st);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
