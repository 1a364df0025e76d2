#include "chorrev/runtime.hpp"

#include <algorithm>
#include <sstream>

namespace chorrev {

std::vector<Log> ChannelState::all() const {
  std::vector<Log> out = consumed;
  out.insert(out.end(), pending.begin(), pending.end());
  return out;
}

BookEntry BranchBook::at(StateId q) const {
  auto it = entries_.find(q);
  return it == entries_.end() ? BookEntry{} : it->second;
}

void BranchBook::set(StateId q, BookEntry e) {
  if (e.tried.empty() && !e.exhausted) {
    entries_.erase(q);
  } else {
    entries_[q] = std::move(e);
  }
}

std::vector<Channel> system_channels(const System& s) {
  std::vector<Channel> out;
  for (const auto& [a, _] : s) {
    for (const auto& [b, __] : s) {
      if (a != b) out.push_back({a, b});
    }
  }
  return out;
}

Configuration initial_configuration(const System& s) {
  Configuration cfg;
  for (const auto& [a, m] : s) cfg.states[a] = m.initial();
  for (const auto& c : system_channels(s)) cfg.channels[c];
  return cfg;
}

int next_timestamp(const Channels& chi, const Participant& a) {
  int t = 0;
  for (const auto& [c, st] : chi) {
    if (c.sender != a) continue;
    for (const auto& l : st.consumed) t = std::max(t, l.timestamp);
    for (const auto& l : st.pending) t = std::max(t, l.timestamp);
  }
  return t + 1;
}

int next_seq(const Channels& chi, const Participant& a) {
  int n = 0;
  for (const auto& [c, st] : chi) {
    if (c.sender == a) n += static_cast<int>(st.consumed.size() + st.pending.size());
    if (c.receiver == a) n += static_cast<int>(st.consumed.size());
  }
  return n + 1;
}

namespace {

int count_logs(const Message& m, const Channel& c, const Channels& chi, GuardScope scope) {
  auto it = chi.find(c);
  if (it == chi.end()) return 0;
  auto match = [&](const Log& l) { return l.message == m; };
  int n = static_cast<int>(std::count_if(it->second.pending.begin(), it->second.pending.end(), match));
  if (scope == GuardScope::Full) {
    n += static_cast<int>(std::count_if(it->second.consumed.begin(), it->second.consumed.end(), match));
  }
  return n;
}

}  // namespace

bool eval_guard(const Guard& g, const Channels& chi, GuardScope scope) {
  using K = Guard::Kind;
  switch (g.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::Count: return compare(g.cmp, count_logs(g.message, g.channel, chi, scope), g.bound);
    case K::Member: return count_logs(g.message, g.channel, chi, scope) >= 1;
    case K::Not: return !eval_guard(g.operands[0], chi, scope);
    case K::Or: return eval_guard(g.operands[0], chi, scope) || eval_guard(g.operands[1], chi, scope);
    case K::And: return eval_guard(g.operands[0], chi, scope) && eval_guard(g.operands[1], chi, scope);
  }
  return false;
}

bool decoration_valid(const Decoration& d, const BranchBook& book) {
  if (d.is_unit()) return true;
  BookEntry e = book.at(d.choice_state);
  return !e.tried.count({d.first_output, d.guard}) || e.exhausted;
}

std::optional<BranchBook> upd_out(const Decoration& d, const BranchBook& book) {
  if (!decoration_valid(d, book)) return std::nullopt;
  return upd_inp(d, book);
}

BranchBook upd_inp(const Decoration& d, const BranchBook& book) {
  BranchBook out = book;
  if (d.kind == Decoration::Kind::Committed) out.reset(d.choice_state);
  return out;
}

std::optional<Configuration> step_output(const Configuration& cfg, const System& s, const Participant& a,
                                         const Transition& t, const RuntimeOptions& opts) {
  (void)s;
  auto st = cfg.states.find(a);
  if (st == cfg.states.end() || st->second != t.from) return std::nullopt;
  if (t.event.polarity != Polarity::Send || t.event.channel.sender != a) return std::nullopt;
  auto book = upd_out(t.decoration, cfg.book);
  if (!book) return std::nullopt;
  if (opts.block_on_guard && !t.decoration.is_unit() && !cfg.book.at(t.decoration.choice_state).exhausted &&
      eval_guard(t.decoration.guard, cfg.channels, opts.scope)) {
    return std::nullopt;
  }
  Configuration next = cfg;
  Log log{t.event.message, t.from, t.event.cp, next_timestamp(cfg.channels, a), next_seq(cfg.channels, a), {}};
  if (opts.mutation != Mutation::OutputDropsLog) next.channels[t.event.channel].pending.push_back(std::move(log));
  next.states[a] = t.to;
  next.book = std::move(*book);
  return next;
}

std::optional<Configuration> step_input(const Configuration& cfg, const System& s, const Participant& a,
                                        const Transition& t, const RuntimeOptions& opts) {
  (void)s;
  (void)opts;
  auto st = cfg.states.find(a);
  if (st == cfg.states.end() || st->second != t.from) return std::nullopt;
  if (t.event.polarity != Polarity::Receive || t.event.channel.receiver != a) return std::nullopt;
  auto ch = cfg.channels.find(t.event.channel);
  if (ch == cfg.channels.end() || ch->second.pending.empty()) return std::nullopt;
  if (ch->second.pending.front().message != t.event.message) return std::nullopt;

  Configuration next = cfg;
  ChannelState& target = next.channels[t.event.channel];
  Log head = target.pending.front();
  target.pending.erase(target.pending.begin());
  head.receipt = Receipt{t.from, next_seq(cfg.channels, a)};
  target.consumed.push_back(std::move(head));
  next.states[a] = t.to;
  next.book = upd_inp(t.decoration, cfg.book);
  return next;
}

std::vector<ForwardStep> enabled_forward(const Configuration& cfg, const System& s, const RuntimeOptions& opts) {
  std::vector<ForwardStep> out;
  for (const auto& [a, m] : s) {
    auto st = cfg.states.find(a);
    if (st == cfg.states.end()) continue;
    for (const auto& t : m.outgoing(st->second)) {
      if (t.event.polarity == Polarity::Send) {
        if (step_output(cfg, s, a, t, opts)) out.push_back({ForwardStep::Kind::Out, a, t});
      } else if (step_input(cfg, s, a, t, opts)) {
        out.push_back({ForwardStep::Kind::Inp, a, t});
      }
    }
  }
  return out;
}

Configuration apply_forward(const Configuration& cfg, const System& s, const ForwardStep& step,
                            const RuntimeOptions& opts) {
  auto next = step.kind == ForwardStep::Kind::Out ? step_output(cfg, s, step.participant, step.transition, opts)
                                                   : step_input(cfg, s, step.participant, step.transition, opts);
  if (!next) throw std::logic_error("apply_forward: step not enabled");
  return std::move(*next);
}

PlainConfiguration forget_config(const Configuration& cfg) {
  PlainConfiguration out;
  out.states = cfg.states;
  for (const auto& [c, st] : cfg.channels) {
    if (st.pending.empty()) continue;
    auto& w = out.words[c];
    for (const auto& l : st.pending) w.push_back(l.message);
  }
  return out;
}

namespace {

void encode(std::ostringstream& os, const Log& l) {
  os << l.message << ',' << l.sender_state.value << ',' << l.cp << ',' << l.timestamp << ',' << l.seq;
  if (l.receipt) os << ',' << l.receipt->receiver_state.value << ',' << l.receipt->seq;
  os << '|';
}

}  // namespace

std::string canonical(const Configuration& cfg) {
  std::ostringstream os;
  for (const auto& [a, q] : cfg.states) os << a << '=' << q.value << ';';
  os << '#';
  for (const auto& [c, st] : cfg.channels) {
    if (st.empty()) continue;
    os << c.sender << '>' << c.receiver << ':';
    for (const auto& l : st.consumed) encode(os, l);
    os << ';';
    for (const auto& l : st.pending) encode(os, l);
    os << '/';
  }
  os << '#';
  for (const auto& [q, e] : cfg.book.entries()) {
    os << q.value << (e.exhausted ? "!" : "") << '{';
    for (const auto& [ev, g] : e.tried) os << to_string(ev) << '^' << to_string(g) << ',';
    os << '}';
  }
  return os.str();
}

std::string canonical(const PlainConfiguration& cfg) {
  std::ostringstream os;
  for (const auto& [a, q] : cfg.states) os << a << '=' << q.value << ';';
  os << '#';
  for (const auto& [c, w] : cfg.words) {
    os << c.sender << '>' << c.receiver << ':';
    for (const auto& m : w) os << m << ',';
    os << '/';
  }
  return os.str();
}

const Log* find_log(const Channels& chi, const LogRef& ref) {
  auto it = chi.find(ref.channel);
  if (it == chi.end()) return nullptr;
  for (const auto* side : {&it->second.consumed, &it->second.pending}) {
    for (const auto& l : *side) {
      if (l.timestamp == ref.timestamp) return &l;
    }
  }
  return nullptr;
}

const RCfsm* owner_of(const System& s, StateId q) {
  for (const auto& [_, m] : s) {
    if (m.states().count(q)) return &m;
  }
  return nullptr;
}

std::string to_string(const Log& l, const System* s) {
  std::string state = "#" + std::to_string(l.sender_state.value);
  if (s) {
    if (const RCfsm* m = owner_of(*s, l.sender_state)) state = m->alias(l.sender_state);
  }
  return "(" + l.message + ", " + state + ", " + std::to_string(l.cp) + ", " + std::to_string(l.timestamp) + ")";
}

std::string describe(const Configuration& cfg, const System& s) {
  std::ostringstream os;
  os << "states:\n";
  for (const auto& [a, q] : cfg.states) os << "  " << a << " = " << s.at(a).alias(q) << "\n";
  os << "channels:\n";
  for (const auto& [c, st] : cfg.channels) {
    os << "  " << to_string(c) << ": ";
    auto seq = [&](const std::vector<Log>& ls) {
      if (ls.empty()) {
        os << "\xCE\xB5";
        return;
      }
      for (std::size_t i = 0; i < ls.size(); ++i) os << (i ? " " : "") << to_string(ls[i], &s);
    };
    seq(st.consumed);
    os << " ; ";
    seq(st.pending);
    os << "\n";
  }
  os << "book:\n";
  if (cfg.book.entries().empty()) os << "  (all clear)\n";
  for (const auto& [q, e] : cfg.book.entries()) {
    const RCfsm* m = owner_of(s, q);
    os << "  " << (m ? m->alias(q) : "#" + std::to_string(q.value)) << ": tried {";
    bool first = true;
    for (const auto& [ev, g] : e.tried) {
      os << (first ? "" : ", ") << "(" << to_string(ev) << ", " << to_string(g) << ")";
      first = false;
    }
    os << "} exhausted=" << (e.exhausted ? "tt" : "ff") << "\n";
  }
  return os.str();
}

}  // namespace chorrev
