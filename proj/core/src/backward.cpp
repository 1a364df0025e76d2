#include "chorrev/backward.hpp"

#include <algorithm>
#include <stdexcept>

namespace chorrev {

std::set<LogRef> maximal_logs(const std::set<LogRef>& t, const CausalGraph& graph) {
  std::vector<std::size_t> idx;
  for (const auto& r : t) {
    auto i = graph.index_of(r);
    if (!i) throw std::logic_error("maximal_logs: log not in configuration");
    idx.push_back(*i);
  }
  std::set<LogRef> out;
  for (std::size_t i : idx) {
    bool maximal = true;
    for (std::size_t j : idx) {
      if (i != j && graph.precedes(i, j) && !graph.precedes(j, i)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.insert(graph.logs()[i]);
  }
  return out;
}

RollbackResult rho(const std::set<LogRef>& t, const Configuration& cfg, const CausalContext& ctx,
                   const RemovalChooser& choose, const RuntimeOptions& opts) {
  RollbackResult res{cfg, {}, {}};
  std::set<LogRef> left = t;
  while (!left.empty()) {
    CausalGraph graph(res.config.channels, ctx);
    std::set<LogRef> top = maximal_logs(left, graph);
    if (top.empty()) throw std::logic_error("rho: no maximal log");
    LogRef pick = choose ? choose(top) : *top.begin();
    if (!top.count(pick)) throw std::logic_error("rho: chooser returned a non-maximal log");

    ChannelState& st = res.config.channels.at(pick.channel);
    bool found = false;
    for (auto* side : {&st.consumed, &st.pending}) {
      auto it = std::find_if(side->begin(), side->end(), [&](const Log& l) { return l.timestamp == pick.timestamp; });
      if (it == side->end()) continue;
      Log l = *it;
      side->erase(it);
      if (opts.mutation != Mutation::RollbackKeepsSenderState) {
        res.config.states[pick.channel.sender] = l.sender_state;
        if (l.receipt) res.config.states[pick.channel.receiver] = l.receipt->receiver_state;
      }
      res.removed.push_back(std::move(l));
      res.removed_channels.push_back(pick.channel);
      found = true;
      break;
    }
    if (!found) throw std::logic_error("rho: log absent from configuration");
    left.erase(pick);
  }
  return res;
}

std::vector<ReversalCandidate> enabled_reversals(const Configuration& cfg, const System& s,
                                                 const CausalContext& ctx, const RuntimeOptions& opts) {
  std::vector<ReversalCandidate> out;
  std::optional<CausalGraph> graph;
  for (const auto& [a, m] : s) {
    auto st = cfg.states.find(a);
    if (st == cfg.states.end()) continue;
    std::set<Decoration> seen;
    for (const auto& t : m.outgoing(st->second)) {
      const Decoration& d = t.decoration;
      if (d.is_unit() || !seen.insert(d).second) continue;
      if (cfg.book.at(d.choice_state).exhausted) continue;
      if (!eval_guard(d.guard, cfg.channels, opts.scope)) continue;

      auto ch = cfg.channels.find(d.first_output.channel);
      if (ch == cfg.channels.end()) continue;
      std::optional<LogRef> anchor;
      for (const auto& l : ch->second.all()) {
        if (l.message == d.first_output.message && l.sender_state == d.choice_state && l.cp == d.first_output.cp) {
          anchor = LogRef{ch->first, l.timestamp};
        }
      }
      if (!anchor) continue;
      if (!graph) graph.emplace(cfg.channels, ctx);
      if (!is_rollback_point(*anchor, cfg.channels, *graph, ctx)) continue;
      out.push_back({a, d, *anchor, graph->effects(*anchor)});
    }
  }
  return out;
}

ReversalResult step_reverse(const Configuration& cfg, const System& s, const CausalContext& ctx,
                            const ReversalCandidate& cand, const RuntimeOptions& opts) {
  bool live = false;
  for (const auto& c : enabled_reversals(cfg, s, ctx, opts)) {
    if (c.participant == cand.participant && c.decoration == cand.decoration && c.anchor == cand.anchor) {
      live = true;
      break;
    }
  }
  if (!live) throw std::logic_error("step_reverse: stale reversal candidate");

  RollbackResult rb = rho(cand.effects, cfg, ctx, {}, opts);
  const Decoration& d = cand.decoration;
  BookEntry entry = cfg.book.at(d.choice_state);
  entry.tried.insert({d.first_output, d.guard});

  // Exhaustion is judged on the rolled-back channels.
  bool exhausted = true;
  for (const auto& t : s.at(cand.participant).outgoing(d.choice_state)) {
    if (t.decoration.is_unit()) continue;
    if (entry.tried.count({t.decoration.first_output, t.decoration.guard})) continue;
    if (eval_guard(t.decoration.guard, rb.config.channels, opts.scope)) continue;
    exhausted = false;
  }
  entry.exhausted = exhausted;
  rb.config.book.set(d.choice_state, std::move(entry));
  return {std::move(rb.config), std::move(rb.removed), std::move(rb.removed_channels), exhausted};
}

}  // namespace chorrev
