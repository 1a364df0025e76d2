#include "chorrev/explorer.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "chorrev/session.hpp"

namespace chorrev {

Bound parse_bound(const std::string& text) {
  Bound b;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bound entry '" + item + "' lacks '='");
    std::string key = item.substr(0, eq);
    int value = 0;
    try {
      value = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bound entry '" + item + "' is not an integer");
    }
    if (value < 0) throw std::invalid_argument("bound entry '" + item + "' is negative");
    if (key == "steps") {
      b.steps = value;
    } else if (key == "rounds") {
      b.rounds = value;
    } else {
      throw std::invalid_argument("unknown bound key '" + key + "'");
    }
  }
  return b;
}

std::vector<TraceRecord> ReachSet::trace_to(std::size_t i) const {
  std::vector<TraceRecord> out;
  for (int k = static_cast<int>(i); parent[k] >= 0; k = parent[k]) out.push_back(via[k]);
  std::reverse(out.begin(), out.end());
  return out;
}

bool within_rounds(const Configuration& cfg, const std::vector<LoopRef>& loops, int rounds) {
  for (const auto& L : loops) {
    for (const auto& [c, st] : cfg.channels) {
      if (c.sender != L.controller) continue;
      int starts = 0;
      for (const auto* side : {&st.consumed, &st.pending}) {
        for (const auto& l : *side) {
          if (l.cp == L.cp && l.message == kStartLoop) ++starts;
        }
      }
      if (starts > rounds) return false;
    }
  }
  return true;
}

ReachSet reachable(const System& s, const CausalContext* ctx, const ExploreOptions& opts) {
  if (opts.reversals && !ctx) throw std::invalid_argument("reachable: reversals need a causal context");
  std::vector<LoopRef> loop_list = ctx ? ctx->loop_refs() : std::vector<LoopRef>{};

  ReachSet r;
  auto add = [&](Configuration c, int depth, int parent, TraceRecord via) {
    std::string key = canonical(c);
    if (r.index.count(key)) return;
    r.index.emplace(std::move(key), r.configs.size());
    r.configs.push_back(std::move(c));
    r.depth.push_back(depth);
    r.parent.push_back(parent);
    r.via.push_back(std::move(via));
  };
  add(initial_configuration(s), 0, -1, {});

  for (std::size_t i = 0; i < r.configs.size(); ++i) {
    const int d = r.depth[i];
    std::vector<std::pair<Configuration, TraceRecord>> next;
    const Configuration cfg = r.configs[i];
    for (const auto& step : enabled_forward(cfg, s, opts.runtime)) {
      Configuration c = apply_forward(cfg, s, step, opts.runtime);
      next.emplace_back(std::move(c), forward_record(cfg, s, step));
    }
    if (opts.reversals) {
      for (const auto& cand : enabled_reversals(cfg, s, *ctx, opts.runtime)) {
        ReversalResult res = step_reverse(cfg, s, *ctx, cand, opts.runtime);
        TraceRecord rec = reverse_record(cfg, s, cand, res);
        next.emplace_back(std::move(res.config), std::move(rec));
      }
    }
    for (auto& [c, rec] : next) {
      if (!within_rounds(c, loop_list, opts.bound.rounds)) continue;
      ++r.edges;
      if (d >= opts.bound.steps) {
        if (!r.contains(c)) r.truncated = true;
        continue;
      }
      add(std::move(c), d + 1, static_cast<int>(i), std::move(rec));
    }
  }
  return r;
}

namespace {

// Independent standard semantics over forget(S), indexed by participant number.
struct PlainMove {
  bool send;
  int peer;
  Message message;
  ControlPoint cp;
  int to;
};

struct PlainState {
  std::vector<int> states;
  std::map<std::pair<int, int>, std::deque<Message>> queues;
  std::map<std::pair<ControlPoint, std::pair<int, int>>, int> starts;

  std::string key() const {
    std::ostringstream os;
    for (int q : states) os << q << ',';
    os << '#';
    for (const auto& [c, w] : queues) {
      if (w.empty()) continue;
      os << c.first << '>' << c.second << ':';
      for (const auto& m : w) os << m << ',';
      os << '/';
    }
    os << '#';
    for (const auto& [k, n] : starts) os << k.first << '@' << k.second.first << '>' << k.second.second << '=' << n << ',';
    return os.str();
  }
};

}  // namespace

PlainReach plain_reachable(const System& s, const std::vector<LoopRef>& loops, const Bound& bound) {
  std::vector<Participant> names;
  std::map<Participant, int> number;
  for (const auto& [a, _] : s) {
    number[a] = static_cast<int>(names.size());
    names.push_back(a);
  }
  std::vector<std::map<int, std::vector<PlainMove>>> moves(names.size());
  std::vector<int> initial;
  for (const auto& [a, m] : s) {
    RCfsm plain = forget_machine(m);
    int me = number[a];
    initial.push_back(plain.initial().value);
    for (const auto& t : plain.transitions()) {
      bool send = t.event.polarity == Polarity::Send;
      const Participant& peer = send ? t.event.channel.receiver : t.event.channel.sender;
      auto it = number.find(peer);
      if (it == number.end()) continue;
      moves[me][t.from.value].push_back({send, it->second, t.event.message, t.event.cp, t.to.value});
    }
  }
  std::set<ControlPoint> loop_cps;
  std::map<ControlPoint, Participant> controller;
  for (const auto& L : loops) {
    loop_cps.insert(L.cp);
    controller[L.cp] = L.controller;
  }

  auto image = [&](const PlainState& st) {
    PlainConfiguration pc;
    for (std::size_t i = 0; i < names.size(); ++i) pc.states[names[i]] = StateId{st.states[i]};
    for (const auto& [c, w] : st.queues) {
      if (w.empty()) continue;
      pc.words[Channel{names[c.first], names[c.second]}] = std::vector<Message>(w.begin(), w.end());
    }
    return canonical(pc);
  };

  PlainReach out;
  std::unordered_set<std::string> seen;
  std::deque<std::pair<PlainState, int>> work;
  PlainState init{initial, {}, {}};
  seen.insert(init.key());
  out.images.insert(image(init));
  work.emplace_back(std::move(init), 0);

  while (!work.empty()) {
    auto [st, depth] = std::move(work.front());
    work.pop_front();
    for (std::size_t p = 0; p < names.size(); ++p) {
      auto it = moves[p].find(st.states[p]);
      if (it == moves[p].end()) continue;
      for (const auto& mv : it->second) {
        PlainState next = st;
        if (mv.send) {
          auto ch = std::make_pair(static_cast<int>(p), mv.peer);
          next.queues[ch].push_back(mv.message);
          if (mv.message == kStartLoop && loop_cps.count(mv.cp) && controller[mv.cp] == names[p]) {
            if (++next.starts[{mv.cp, ch}] > bound.rounds) continue;
          }
        } else {
          auto& q = next.queues[{mv.peer, static_cast<int>(p)}];
          if (q.empty() || q.front() != mv.message) continue;
          q.pop_front();
        }
        next.states[p] = mv.to;
        std::string key = next.key();
        if (seen.count(key)) continue;
        if (depth >= bound.steps) {
          out.truncated = true;
          continue;
        }
        seen.insert(key);
        out.images.insert(image(next));
        work.emplace_back(std::move(next), depth + 1);
      }
    }
  }
  out.states = seen.size();
  return out;
}

nlohmann::json to_json(const Verdict& v, const System& s) {
  nlohmann::json j = {{"property", v.property},
                      {"pass", v.pass},
                      {"truncated", v.truncated},
                      {"decoratedStates", v.decorated_states},
                      {"plainStates", v.plain_states},
                      {"checked", v.checked},
                      {"detail", v.detail}};
  if (v.witness) j["witness"] = to_json(*v.witness, s);
  return j;
}

namespace {

ExploreOptions forward_only(ExploreOptions o) {
  o.reversals = false;
  return o;
}

}  // namespace

Verdict check_soundness(const System& s, const CausalContext& ctx, const ExploreOptions& opts) {
  Verdict v;
  v.property = "soundness";
  ReachSet dec = reachable(s, &ctx, forward_only(opts));
  PlainReach plain = plain_reachable(s, ctx.loop_refs(), opts.bound);
  v.decorated_states = dec.size();
  v.plain_states = plain.states;
  v.truncated = dec.truncated || plain.truncated;
  for (std::size_t i = 0; i < dec.size(); ++i) {
    ++v.checked;
    if (!plain.images.count(canonical(forget_config(dec.configs[i])))) {
      v.detail = "forget image of a decorated configuration is not plain-reachable";
      v.counterexample = dec.trace_to(i);
      v.witness = dec.configs[i];
      return v;
    }
  }
  v.pass = true;
  return v;
}

Verdict check_completeness(const System& s, const CausalContext& ctx, const ExploreOptions& opts) {
  Verdict v;
  v.property = "completeness";
  ReachSet dec = reachable(s, &ctx, forward_only(opts));
  PlainReach plain = plain_reachable(s, ctx.loop_refs(), opts.bound);
  v.decorated_states = dec.size();
  v.plain_states = plain.states;
  v.truncated = dec.truncated || plain.truncated;
  std::unordered_set<std::string> images;
  for (const auto& c : dec.configs) images.insert(canonical(forget_config(c)));
  std::vector<std::string> missing;
  for (const auto& img : plain.images) {
    ++v.checked;
    if (!images.count(img)) missing.push_back(img);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    v.detail = std::to_string(missing.size()) + " plain configuration(s) without decorated preimage, first: " +
               missing.front();
    return v;
  }
  v.pass = true;
  return v;
}

Verdict check_causal_consistency(const System& s, const CausalContext& ctx, const ExploreOptions& opts) {
  Verdict v;
  v.property = "causal-consistency";
  ExploreOptions mixed = opts;
  mixed.reversals = true;
  ReachSet dec = reachable(s, &ctx, mixed);
  PlainReach plain = plain_reachable(s, ctx.loop_refs(), opts.bound);
  v.decorated_states = dec.size();
  v.plain_states = plain.states;
  v.truncated = dec.truncated || plain.truncated;
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const Configuration& cfg = dec.configs[i];
    for (const auto& cand : enabled_reversals(cfg, s, ctx, opts.runtime)) {
      ++v.checked;
      ReversalResult res = step_reverse(cfg, s, ctx, cand, opts.runtime);
      if (!plain.images.count(canonical(forget_config(res.config)))) {
        v.detail = "reversal leads outside the forward-reachable forget images";
        v.counterexample = dec.trace_to(i);
        v.counterexample.push_back(reverse_record(cfg, s, cand, res));
        v.witness = res.config;
        return v;
      }
    }
  }
  v.pass = true;
  if (v.checked == 0) v.detail = "no reversal enabled";
  return v;
}

std::vector<AuditIssue> audit_configuration(const Configuration& cfg, const System& s) {
  std::vector<AuditIssue> issues;
  for (const auto& [a, m] : s) {
    struct Action {
      int seq;
      bool send;
      Channel channel;
      const Log* log;
    };
    std::vector<Action> actions;
    for (const auto& [c, st] : cfg.channels) {
      if (c.sender == a) {
        for (const auto* side : {&st.consumed, &st.pending}) {
          for (const auto& l : *side) actions.push_back({l.seq, true, c, &l});
        }
      }
      if (c.receiver == a) {
        for (const auto& l : st.consumed) {
          if (l.receipt) actions.push_back({l.receipt->seq, false, c, &l});
        }
      }
    }
    std::sort(actions.begin(), actions.end(), [](const Action& x, const Action& y) { return x.seq < y.seq; });

    StateId cur = m.initial();
    std::string problem;
    for (const auto& act : actions) {
      StateId recorded = act.send ? act.log->sender_state : act.log->receipt->receiver_state;
      if (recorded != cur) {
        problem = "action " + std::to_string(act.seq) + " recorded from " + m.alias(recorded) + " but replay is at " +
                  m.alias(cur);
        break;
      }
      Event e{act.channel, act.send ? Polarity::Send : Polarity::Receive, act.log->cp, act.log->message};
      std::optional<StateId> to;
      for (const auto& t : m.outgoing(cur)) {
        if (t.event == e) to = t.to;
      }
      if (!to) {
        problem = "no transition " + to_string(e) + " from " + m.alias(cur);
        break;
      }
      cur = *to;
    }
    if (problem.empty() && cur != cfg.states.at(a)) {
      problem = "replay ends in " + m.alias(cur) + " but the configuration has " + m.alias(cfg.states.at(a));
    }
    if (!problem.empty()) issues.push_back({a, problem});
  }
  return issues;
}

}  // namespace chorrev
