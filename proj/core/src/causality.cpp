#include "chorrev/causality.hpp"

#include <stdexcept>

namespace chorrev {

namespace {

void collect(const Choreography& g, std::vector<LoopRef>& out) {
  if (g.kind == Choreography::Kind::Loop) {
    auto cps = control_points(g.body());
    out.push_back({g.cp, std::set<ControlPoint>(cps.begin(), cps.end()), g.controller});
  }
  for (const auto& c : g.children) collect(c, out);
}

bool is_start(const Log& l, const LoopRef& loop) { return l.cp == loop.cp && l.message == kStartLoop; }
bool is_end(const Log& l, const LoopRef& loop) { return l.cp == loop.cp && l.message == kEndLoop; }

}  // namespace

std::vector<LoopRef> loops(const Choreography& g) {
  std::vector<LoopRef> out;
  collect(g, out);
  return out;
}

bool log_in_loop(const Log& l, const LoopRef& loop) { return l.cp == loop.cp || loop.body.count(l.cp) > 0; }

std::optional<int> round_of(const Log& l, const LoopRef& loop, const ChannelState& channel) {
  int starts = 0;
  for (const auto& x : channel.all()) {
    if (x.timestamp > l.timestamp) break;
    if (is_start(x, loop)) ++starts;
  }
  if (starts == 0) return std::nullopt;
  return starts - 1;
}

std::optional<int> log_round(const LogRef& ref, const LoopRef& loop, const Channels& chi) {
  const Log* l = find_log(chi, ref);
  if (!l) return std::nullopt;
  const ChannelState& own = chi.at(ref.channel);
  if (ref.channel.sender == loop.controller) return round_of(*l, loop, own);

  auto in = chi.find(Channel{loop.controller, ref.channel.sender});
  if (in == chi.end()) return std::nullopt;
  int starts = 0;
  for (const auto& x : in->second.consumed) {
    if (is_start(x, loop) && x.receipt && x.receipt->seq < l->seq) ++starts;
  }
  if (starts == 0) return std::nullopt;
  return starts - 1;
}

bool ongoing(const LoopRef& loop, const Channels& chi) {
  for (const auto& [_, st] : chi) {
    for (const auto& l : st.pending) {
      if (is_end(l, loop)) return true;
    }
    bool open = false;
    for (const auto& l : st.all()) {
      if (is_start(l, loop)) open = true;
      if (is_end(l, loop)) open = false;
    }
    if (open) return true;
  }
  return false;
}

CausalContext::CausalContext(const Choreography& g) : g_(g) {
  auto sem = semantics(g);
  if (!is_defined(sem)) {
    throw std::invalid_argument("undefined order: " + std::get<Undefined>(sem).reason);
  }
  order_ = std::move(std::get<EventOrder>(sem));
  loops_ = loops(g);
  for (auto cp : control_points(g)) {
    const Choreography* n = find_node(g, cp);
    if (n->kind == Choreography::Kind::Interaction) {
      Event send{{n->sender, n->receiver}, Polarity::Send, cp, n->message};
      if (auto i = order_.find_event(send)) send_node_[cp] = *i;
    } else if (n->kind == Choreography::Kind::Loop) {
      auto s = order_.find_gate(OrderNode::Kind::LoopStart, cp);
      auto e = order_.find_gate(OrderNode::Kind::LoopEnd, cp);
      if (s && e) loop_gates_[cp] = {*s, *e};
    }
  }
}

std::optional<std::size_t> CausalContext::node_of(ControlPoint cp, const Message& m) const {
  if (auto it = loop_gates_.find(cp); it != loop_gates_.end()) {
    if (m == kStartLoop) return it->second.first;
    if (m == kEndLoop) return it->second.second;
    return std::nullopt;
  }
  if (auto it = send_node_.find(cp); it != send_node_.end()) return it->second;
  return std::nullopt;
}

bool CausalContext::static_le(const Log& a, const Log& b) const {
  auto i = node_of(a.cp, a.message);
  auto j = node_of(b.cp, b.message);
  return i && j && order_.precedes(*i, *j);
}

const LoopRef* CausalContext::innermost(const Log& l) const {
  const LoopRef* best = nullptr;
  for (const auto& L : loops_) {
    if (log_in_loop(l, L) && (!best || L.body.size() < best->body.size())) best = &L;
  }
  return best;
}

const LoopRef* CausalContext::outermost(const Log& l) const {
  const LoopRef* best = nullptr;
  for (const auto& L : loops_) {
    if (log_in_loop(l, L) && (!best || L.body.size() > best->body.size())) best = &L;
  }
  return best;
}

const LoopRef* CausalContext::smallest_common(const Log& a, const Log& b) const {
  const LoopRef* best = nullptr;
  for (const auto& L : loops_) {
    if (log_in_loop(a, L) && log_in_loop(b, L) && (!best || L.body.size() < best->body.size())) best = &L;
  }
  return best;
}

CausalGraph::CausalGraph(const Channels& chi, const CausalContext& ctx) {
  std::vector<const Log*> ptrs;
  for (const auto& [c, st] : chi) {
    for (const auto* side : {&st.consumed, &st.pending}) {
      for (const auto& l : *side) {
        logs_.push_back({c, l.timestamp});
        ptrs.push_back(&l);
      }
    }
  }
  const std::size_t n = logs_.size();
  base_.assign(n, std::vector<char>(n, 0));

  std::map<std::pair<std::size_t, const LoopRef*>, std::optional<int>> rounds;
  auto round = [&](std::size_t k, const LoopRef* L) {
    auto key = std::make_pair(k, L);
    auto it = rounds.find(key);
    if (it == rounds.end()) it = rounds.emplace(key, log_round(logs_[k], *L, chi)).first;
    return it->second;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Log& a = *ptrs[i];
      const Log& b = *ptrs[j];
      if (logs_[i].channel == logs_[j].channel) {
        if (a.timestamp < b.timestamp) base_[i][j] = 1;
        continue;
      }
      if (!ctx.static_le(a, b)) continue;
      const LoopRef* L = ctx.smallest_common(a, b);
      if (!L) {
        base_[i][j] = 1;
        continue;
      }
      auto ra = round(i, L), rb = round(j, L);
      if (!ra || !rb) continue;
      if (*ra < *rb) {
        base_[i][j] = 1;
      } else if (*ra > *rb) {
        base_[j][i] = 1;
      } else if (a.cp == b.cp && a.message == b.message) {
        // Same control message of one batch on two channels: sender order.
        if (a.timestamp < b.timestamp) base_[i][j] = 1;
      } else {
        base_[i][j] = 1;
      }
    }
  }

  closure_ = base_;
  for (std::size_t i = 0; i < n; ++i) closure_[i][i] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!closure_[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (closure_[k][j]) closure_[i][j] = 1;
      }
    }
  }
}

std::optional<std::size_t> CausalGraph::index_of(const LogRef& ref) const {
  for (std::size_t i = 0; i < logs_.size(); ++i) {
    if (logs_[i] == ref) return i;
  }
  return std::nullopt;
}

bool CausalGraph::precedes(const LogRef& a, const LogRef& b) const {
  auto i = index_of(a), j = index_of(b);
  return i && j && precedes(*i, *j);
}

std::set<LogRef> CausalGraph::effects(const LogRef& ref) const {
  std::set<LogRef> out;
  auto i = index_of(ref);
  if (!i) return out;
  for (std::size_t j = 0; j < logs_.size(); ++j) {
    if (closure_[*i][j]) out.insert(logs_[j]);
  }
  return out;
}

namespace {

std::vector<std::pair<LogRef, LogRef>> edges(const std::vector<LogRef>& logs, const std::vector<std::vector<char>>& m,
                                             bool skip_diagonal) {
  std::vector<std::pair<LogRef, LogRef>> out;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    for (std::size_t j = 0; j < logs.size(); ++j) {
      if (m[i][j] && !(skip_diagonal && i == j)) out.emplace_back(logs[i], logs[j]);
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<LogRef, LogRef>> CausalGraph::base_edges() const { return edges(logs_, base_, false); }

std::vector<std::pair<LogRef, LogRef>> CausalGraph::closure_edges() const { return edges(logs_, closure_, true); }

std::vector<std::pair<LogRef, LogRef>> CausalGraph::antisymmetry_violations() const {
  std::vector<std::pair<LogRef, LogRef>> out;
  for (std::size_t i = 0; i < logs_.size(); ++i) {
    for (std::size_t j = i + 1; j < logs_.size(); ++j) {
      if (closure_[i][j] && closure_[j][i]) out.emplace_back(logs_[i], logs_[j]);
    }
  }
  return out;
}

bool precedes(const LogRef& a, const LogRef& b, const Channels& chi, const CausalContext& ctx) {
  return CausalGraph(chi, ctx).precedes(a, b);
}

bool is_rollback_point(const LogRef& ref, const Channels& chi, const CausalGraph& graph, const CausalContext& ctx) {
  const Log* l = find_log(chi, ref);
  if (!l) return false;
  const LoopRef* outer = ctx.outermost(*l);
  const bool outer_ongoing = outer && ongoing(*outer, chi);
  for (const auto& e : graph.effects(ref)) {
    const Log* x = find_log(chi, e);
    if (!x->receipt) continue;  // not in history
    if (!outer) return false;
    if (!log_in_loop(*x, *outer) || !outer_ongoing) return false;
  }
  return true;
}

std::vector<LogRef> rollback_points(const Channels& chi, const CausalContext& ctx, const Channel& c) {
  std::vector<LogRef> out;
  auto it = chi.find(c);
  if (it == chi.end()) return out;
  CausalGraph graph(chi, ctx);
  for (const auto& l : it->second.all()) {
    LogRef ref{c, l.timestamp};
    if (is_rollback_point(ref, chi, graph, ctx)) out.push_back(ref);
  }
  return out;
}

}  // namespace chorrev
