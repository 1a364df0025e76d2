#include "chorrev/order.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace chorrev {

std::string to_string(const OrderNode& n) {
  switch (n.kind) {
    case OrderNode::Kind::Event: return to_string(n.event);
    case OrderNode::Kind::LoopStart: return "start(" + std::to_string(n.cp) + ")";
    case OrderNode::Kind::LoopEnd: return "end(" + std::to_string(n.cp) + ")";
    case OrderNode::Kind::ChoiceGate: return "gate(" + std::to_string(n.cp) + ")";
  }
  return "?";
}

std::optional<std::size_t> EventOrder::find_event(const Event& e) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == OrderNode::Kind::Event && nodes_[i].event == e) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> EventOrder::find_gate(OrderNode::Kind kind, ControlPoint cp) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == kind && nodes_[i].cp == cp) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> EventOrder::minimal() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    bool has_pred = false;
    for (std::size_t i = 0; i < nodes_.size() && !has_pred; ++i) {
      has_pred = i != j && rel_[i][j];
    }
    if (!has_pred) out.push_back(j);
  }
  return out;
}

bool EventOrder::is_partial_order() const {
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!rel_[i][i]) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && rel_[i][j] && rel_[j][i]) return false;
      if (!rel_[i][j]) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (rel_[j][k] && !rel_[i][k]) return false;
      }
    }
  }
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> EventOrder::strict_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (i != j && rel_[i][j]) out.emplace_back(i, j);
    }
  }
  return out;
}

std::size_t EventOrder::add_node(OrderNode n) {
  nodes_.push_back(std::move(n));
  for (auto& row : rel_) row.push_back(0);
  rel_.emplace_back(nodes_.size(), 0);
  rel_.back().back() = 1;
  return nodes_.size() - 1;
}

void EventOrder::enclose_in_branch(std::size_t i, ControlPoint choice, int branch) {
  auto& ctx = nodes_.at(i).context;
  ctx.insert(ctx.begin(), {choice, branch});
}

std::size_t EventOrder::absorb(const EventOrder& other) {
  const std::size_t offset = nodes_.size();
  for (const auto& n : other.nodes_) add_node(n);
  for (std::size_t i = 0; i < other.size(); ++i) {
    for (std::size_t j = 0; j < other.size(); ++j) {
      if (other.rel_[i][j]) rel_[offset + i][offset + j] = 1;
    }
  }
  return offset;
}

void EventOrder::close() {
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) rel_[i][i] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!rel_[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (rel_[k][j]) rel_[i][j] = 1;
      }
    }
  }
}

namespace {

std::string node_key(const OrderNode& n) { return to_string(n); }

}  // namespace

bool operator==(const EventOrder& a, const EventOrder& b) {
  if (a.size() != b.size()) return false;
  // Compare as relations over node keys, independent of insertion order.
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < b.size(); ++i) index[node_key(b.node(i))] = i;
  std::vector<std::size_t> to_b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto it = index.find(node_key(a.node(i)));
    if (it == index.end()) return false;
    to_b[i] = it->second;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a.precedes(i, j) != b.precedes(to_b[i], to_b[j])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

OrderNode event_node(const Event& e) {
  OrderNode n;
  n.kind = OrderNode::Kind::Event;
  n.event = e;
  n.cp = e.cp;
  n.subject = e.subject();
  return n;
}

OrderNode gate_node(OrderNode::Kind kind, ControlPoint cp, Participant subject) {
  OrderNode n;
  n.kind = kind;
  n.cp = cp;
  n.subject = std::move(subject);
  return n;
}

bool resolved(const OrderNode& n, const std::map<ControlPoint, int>& resolution) {
  return std::all_of(n.context.begin(), n.context.end(), [&](const auto& c) {
    auto it = resolution.find(c.first);
    return it == resolution.end() || it->second == c.second;
  });
}

// Every combination of branch choices for the choices mentioned in `orders`.
std::vector<std::map<ControlPoint, int>> resolutions(std::initializer_list<const EventOrder*> orders) {
  std::map<ControlPoint, int> arity;
  for (const auto* o : orders) {
    for (const auto& n : o->nodes()) {
      for (const auto& [cp, branch] : n.context) arity[cp] = std::max(arity[cp], branch + 1);
    }
  }
  std::vector<std::map<ControlPoint, int>> out{{}};
  for (const auto& [cp, k] : arity) {
    std::vector<std::map<ControlPoint, int>> next;
    for (const auto& partial : out) {
      for (int b = 0; b < k; ++b) {
        auto r = partial;
        r[cp] = b;
        next.push_back(std::move(r));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

Defined<EventOrder> seq_compose(const EventOrder& left, const EventOrder& right, const Choreography& g) {
  EventOrder combined;
  combined.absorb(left);
  const std::size_t offset = combined.absorb(right);
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (left.node(i).subject == right.node(j).subject) combined.add_edge(i, offset + j);
    }
  }

  for (const auto& resolution : resolutions({&left, &right})) {
    // Closure restricted to the nodes that co-occur under this resolution.
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < combined.size(); ++i) {
      if (resolved(combined.node(i), resolution)) live.push_back(i);
    }
    EventOrder sub;
    for (std::size_t i : live) sub.add_node(combined.node(i));
    for (std::size_t a = 0; a < live.size(); ++a) {
      for (std::size_t b = 0; b < live.size(); ++b) {
        if (combined.precedes(live[a], live[b])) sub.add_edge(a, b);
      }
    }
    sub.close();

    std::size_t left_live = 0;
    while (left_live < live.size() && live[left_live] < offset) ++left_live;
    if (left_live == 0) continue;

    std::map<ControlPoint, std::vector<std::size_t>> right_interactions;
    for (std::size_t b = left_live; b < live.size(); ++b) {
      if (sub.node(b).kind == OrderNode::Kind::Event) right_interactions[sub.node(b).cp].push_back(b);
    }
    for (const auto& [cp, members] : right_interactions) {
      bool aware = false;
      for (std::size_t b : members) {
        for (std::size_t a = 0; a < left_live && !aware; ++a) aware = sub.precedes(a, b);
      }
      if (!aware) {
        std::size_t witness_left = 0;
        for (std::size_t a = 0; a < left_live; ++a) {
          if (sub.node(a).kind == OrderNode::Kind::Event) {
            witness_left = a;
            break;
          }
        }
        std::size_t witness_right = members.front();
        for (std::size_t b : members) {
          if (sub.node(b).event.polarity == Polarity::Send) witness_right = b;
        }
        return Undefined{"seq", "no participant of the interaction at control point " + std::to_string(cp) +
                                    " is aware of the preceding choreography",
                         std::make_pair(to_string(sub.node(witness_left)), to_string(sub.node(witness_right)))};
      }
    }
  }
  (void)g;
  combined.close();
  return combined;
}

Defined<EventOrder> semantics(const Choreography& g) {
  using K = Choreography::Kind;
  switch (g.kind) {
    case K::Interaction: {
      EventOrder order;
      Channel ch{g.sender, g.receiver};
      auto send = order.add_node(event_node({ch, Polarity::Send, g.cp, g.message}));
      auto recv = order.add_node(event_node({ch, Polarity::Receive, g.cp, g.message}));
      order.add_edge(send, recv);
      return order;
    }
    case K::Seq: {
      auto left = semantics(g.left());
      if (!is_defined(left)) return left;
      auto right = semantics(g.right());
      if (!is_defined(right)) return right;
      return seq_compose(std::get<EventOrder>(left), std::get<EventOrder>(right), g);
    }
    case K::Par: {
      EventOrder order;
      for (const auto& thread : g.children) {
        auto sub = semantics(thread);
        if (!is_defined(sub)) return sub;
        order.absorb(std::get<EventOrder>(sub));
      }
      return order;
    }
    case K::Loop: {
      auto body = semantics(g.body());
      if (!is_defined(body)) return body;
      EventOrder order;
      auto start = order.add_node(gate_node(OrderNode::Kind::LoopStart, g.cp, g.controller));
      auto end = order.add_node(gate_node(OrderNode::Kind::LoopEnd, g.cp, g.controller));
      const std::size_t offset = order.absorb(std::get<EventOrder>(body));
      order.add_edge(start, end);
      for (std::size_t i = offset; i < order.size(); ++i) {
        order.add_edge(start, i);
        order.add_edge(i, end);
      }
      order.close();
      return order;
    }
    case K::Choice: {
      auto report = well_branched(g);
      if (!report.ok) {
        std::string reason;
        for (const auto& p : report.problems) reason += (reason.empty() ? "" : "; ") + p;
        return Undefined{"choice " + std::to_string(g.cp), "not well-branched: " + reason, std::nullopt};
      }
      auto active = std::get<Participant>(active_participant(g));
      EventOrder order;
      auto gate = order.add_node(gate_node(OrderNode::Kind::ChoiceGate, g.cp, active));
      for (std::size_t b = 0; b < g.children.size(); ++b) {
        auto sub = std::get<EventOrder>(semantics(g.children[b]));
        const std::size_t offset = order.absorb(sub);
        for (std::size_t i = offset; i < order.size(); ++i) {
          order.enclose_in_branch(i, g.cp, static_cast<int>(b));
          order.add_edge(gate, i);
        }
      }
      order.close();
      return order;
    }
  }
  return Undefined{"?", "unknown construct", std::nullopt};
}

Defined<Participant> active_participant(const Choreography& choice) {
  if (choice.kind != Choreography::Kind::Choice) {
    return Undefined{"choice", "not a choice node", std::nullopt};
  }
  std::optional<Participant> active;
  for (std::size_t b = 0; b < choice.children.size(); ++b) {
    auto sem = semantics(choice.children[b]);
    if (!is_defined(sem)) return std::get<Undefined>(sem);
    const auto& order = std::get<EventOrder>(sem);
    for (std::size_t i : order.minimal()) {
      const auto& n = order.node(i);
      const std::string where = "choice " + std::to_string(choice.cp) + " branch " + std::to_string(b + 1);
      if (!n.is_output_like()) {
        return Undefined{where, "minimal event " + to_string(n) + " is an input", std::nullopt};
      }
      if (active && *active != n.subject) {
        return Undefined{where, "minimal events have distinct subjects " + *active + " and " + n.subject,
                         std::nullopt};
      }
      active = n.subject;
    }
  }
  if (!active) return Undefined{"choice " + std::to_string(choice.cp), "no events", std::nullopt};
  return *active;
}

bool guard_local(const Guard& guard, const Participant& active) {
  for (const auto& c : guard.channels()) {
    if (c.sender != active && c.receiver != active) return false;
  }
  return true;
}

CheckReport well_branched(const Choreography& choice) {
  CheckReport report;
  auto fail = [&](std::string why) {
    report.ok = false;
    report.problems.push_back(std::move(why));
  };
  auto active_or = active_participant(choice);
  if (!is_defined(active_or)) {
    const auto& u = std::get<Undefined>(active_or);
    fail("no active participant (" + u.construct + ": " + u.reason + ")");
    return report;
  }
  const auto& active = std::get<Participant>(active_or);
  if (choice.active_hint && *choice.active_hint != active) {
    fail("annotated active participant " + *choice.active_hint + " differs from inferred " + active);
  }

  std::vector<EventOrder> orders;
  std::vector<std::set<Participant>> parts;
  for (const auto& branch : choice.children) {
    orders.push_back(std::get<EventOrder>(semantics(branch)));
    parts.push_back(participants(branch));
  }
  std::set<Participant> everyone;
  for (const auto& p : parts) everyone.insert(p.begin(), p.end());

  for (const auto& who : everyone) {
    if (who == active) continue;
    std::size_t occurs = 0;
    for (const auto& p : parts) occurs += p.contains(who) ? 1 : 0;
    if (occurs != parts.size()) {
      fail(who + " occurs in some branches but not all");
      continue;
    }
    // First receives of `who` in each branch.
    std::vector<std::set<std::pair<Participant, Message>>> firsts(orders.size());
    for (std::size_t b = 0; b < orders.size(); ++b) {
      const auto& order = orders[b];
      for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& n = order.node(j);
        if (n.subject != who) continue;
        bool first = true;
        for (std::size_t i = 0; i < order.size() && first; ++i) {
          first = !(i != j && order.node(i).subject == who && order.precedes(i, j));
        }
        if (!first) continue;
        if (n.is_output_like()) {
          fail(who + " acts with " + to_string(n) + " before learning the branch of choice " +
               std::to_string(choice.cp));
        } else {
          firsts[b].insert({n.event.channel.sender, n.event.message});
        }
      }
    }
    for (std::size_t a = 0; a < firsts.size(); ++a) {
      for (std::size_t b = a + 1; b < firsts.size(); ++b) {
        for (const auto& x : firsts[a]) {
          if (firsts[b].contains(x)) {
            fail(who + " cannot distinguish branches " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                 " (both start with " + x.second + " from " + x.first + ")");
          }
        }
      }
    }
  }
  for (std::size_t b = 0; b < choice.guards.size(); ++b) {
    if (!guard_local(choice.guards[b], active)) {
      fail("guard of branch " + std::to_string(b + 1) + " mentions channels not incident to " + active);
    }
  }
  return report;
}

}  // namespace chorrev
