#include "chorrev/session.hpp"

#include "chorrev/projection.hpp"

namespace chorrev {

Session::Session(const Choreography& g, RuntimeOptions opts)
    : system_(project_system(g)), ctx_(g), opts_(opts), config_(initial_configuration(system_)) {}

std::vector<Session::Move> Session::moves() const {
  std::vector<Move> out;
  for (auto& f : enabled_forward(config_, system_, opts_)) out.push_back({false, std::move(f), {}});
  for (auto& r : enabled_reversals(config_, system_, ctx_, opts_)) out.push_back({true, {}, std::move(r)});
  return out;
}

std::string Session::describe(const Move& m) const {
  if (m.reverse) {
    const Log* anchor = find_log(config_.channels, m.reversal.anchor);
    return "rev " + m.reversal.participant + " anchored at " + to_string(m.reversal.anchor.channel) + " " +
           (anchor ? to_string(*anchor, &system_) : "?") + ", removes " + std::to_string(m.reversal.effects.size()) +
           " log(s)";
  }
  const auto& t = m.forward.transition;
  std::string s = (m.forward.kind == ForwardStep::Kind::Out ? "out " : "inp ") + m.forward.participant + " " +
                  to_string(t.event);
  if (!t.decoration.is_unit()) s += " " + to_string(t.decoration, &system_.at(m.forward.participant));
  return s;
}

TraceRecord forward_record(const Configuration& before, const System& s, const ForwardStep& step) {
  const auto& t = step.transition;
  const RCfsm& machine = s.at(step.participant);
  TraceRecord r;
  r.kind = step.kind == ForwardStep::Kind::Out ? TraceRecord::Kind::Out : TraceRecord::Kind::Inp;
  r.participant = step.participant;
  r.channel = t.event.channel;
  r.message = t.event.message;
  r.cp = t.event.cp;
  r.from_state = machine.alias(t.from);
  r.to_state = machine.alias(t.to);
  if (step.kind == ForwardStep::Kind::Out) {
    r.timestamp = next_timestamp(before.channels, step.participant);
  } else {
    r.timestamp = before.channels.at(t.event.channel).pending.front().timestamp;
  }
  return r;
}

TraceRecord reverse_record(const Configuration& before, const System& s, const ReversalCandidate& cand,
                           const ReversalResult& result) {
  const Log* anchor = find_log(before.channels, cand.anchor);
  if (!anchor) throw std::logic_error("reverse_record: anchor log missing");
  TraceRecord r;
  r.kind = TraceRecord::Kind::Rev;
  r.participant = cand.participant;
  r.choice_state = s.at(cand.participant).alias(cand.decoration.choice_state);
  r.anchor = make_log_record(cand.anchor.channel, *anchor, s);
  for (std::size_t i = 0; i < result.removed.size(); ++i) {
    r.removed.push_back(make_log_record(result.removed_channels[i], result.removed[i], s));
  }
  r.exhausted = result.exhausted;
  return r;
}

TraceRecord Session::play(const Move& m) {
  TraceRecord r;
  if (m.reverse) {
    ReversalResult res = step_reverse(config_, system_, ctx_, m.reversal, opts_);
    r = reverse_record(config_, system_, m.reversal, res);
    config_ = std::move(res.config);
  } else {
    r = forward_record(config_, system_, m.forward);
    config_ = apply_forward(config_, system_, m.forward, opts_);
  }
  trace_.push_back(r);
  return r;
}

namespace {

bool matches(const Directive& d, const Session::Move& m) {
  if (d.kind == Directive::Kind::Rev) {
    if (!m.reverse || m.reversal.participant != d.participant) return false;
    if (d.channel && m.reversal.anchor.channel != *d.channel) return false;
    if (d.anchor_timestamp && m.reversal.anchor.timestamp != *d.anchor_timestamp) return false;
    return true;
  }
  if (m.reverse || m.forward.participant != d.participant) return false;
  const bool out = m.forward.kind == ForwardStep::Kind::Out;
  if (out != (d.kind == Directive::Kind::Out)) return false;
  const Event& e = m.forward.transition.event;
  if (d.cp && e.cp != *d.cp) return false;
  if (d.channel && e.channel != *d.channel) return false;
  if (d.message && e.message != *d.message) return false;
  return true;
}

}  // namespace

bool Session::apply(const Directive& d, std::mt19937_64& rng, std::string* error) {
  if (d.kind == Directive::Kind::Auto) {
    run_random(static_cast<std::size_t>(std::max(0, d.count)), rng);
    return true;
  }
  for (const auto& m : moves()) {
    if (matches(d, m)) {
      play(m);
      return true;
    }
  }
  if (error) {
    *error = std::string(d.kind == Directive::Kind::Rev ? "no enabled reversal" : "no enabled step") + " for " +
             d.participant;
  }
  return false;
}

std::size_t Session::run_random(std::size_t n, std::mt19937_64& rng) {
  std::size_t done = 0;
  for (; done < n; ++done) {
    auto ms = moves();
    if (ms.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
    play(ms[pick(rng)]);
  }
  return done;
}

}  // namespace chorrev
