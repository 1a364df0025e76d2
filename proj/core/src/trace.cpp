#include "chorrev/trace.hpp"

#include <stdexcept>

namespace chorrev {

using nlohmann::json;

namespace {

std::string state_name(const System& s, StateId q) {
  if (const RCfsm* m = owner_of(s, q)) return m->alias(q);
  return "#" + std::to_string(q.value);
}

const char* kind_name(TraceRecord::Kind k) {
  switch (k) {
    case TraceRecord::Kind::Out: return "out";
    case TraceRecord::Kind::Inp: return "inp";
    case TraceRecord::Kind::Rev: return "rev";
  }
  return "?";
}

LogRecord log_record_from_json(const json& j) {
  LogRecord r;
  r.channel = channel_from_string(j.at("channel").get<std::string>());
  r.message = j.at("message").get<std::string>();
  r.sender_state = j.value("senderState", "");
  r.cp = j.at("cp").get<int>();
  r.timestamp = j.at("timestamp").get<int>();
  return r;
}

}  // namespace

LogRecord make_log_record(const Channel& c, const Log& l, const System& s) {
  return {c, l.message, state_name(s, l.sender_state), l.cp, l.timestamp};
}

json to_json(const Channel& c) { return to_string(c); }

Channel channel_from_string(const std::string& text) {
  auto arrow = text.find("->");
  if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= text.size()) {
    throw std::invalid_argument("bad channel '" + text + "', expected A->B");
  }
  return {text.substr(0, arrow), text.substr(arrow + 2)};
}

json to_json(const LogRecord& r) {
  return {{"channel", to_string(r.channel)},
          {"message", r.message},
          {"senderState", r.sender_state},
          {"cp", r.cp},
          {"timestamp", r.timestamp}};
}

json to_json(const TraceRecord& r) {
  if (r.kind == TraceRecord::Kind::Rev) {
    json removed = json::array();
    for (const auto& l : r.removed) removed.push_back(to_json(l));
    return {{"kind", "rev"},           {"participant", r.participant}, {"choiceState", r.choice_state},
            {"anchor", to_json(r.anchor)}, {"removed", removed},          {"exhausted", r.exhausted}};
  }
  return {{"kind", kind_name(r.kind)},  {"participant", r.participant}, {"channel", to_string(r.channel)},
          {"message", r.message},       {"cp", r.cp},                   {"timestamp", r.timestamp},
          {"fromState", r.from_state}, {"toState", r.to_state}};
}

json to_json(const std::vector<TraceRecord>& trace) {
  json out = json::array();
  for (const auto& r : trace) out.push_back(to_json(r));
  return out;
}

TraceRecord trace_record_from_json(const json& j) {
  TraceRecord r;
  const std::string kind = j.at("kind").get<std::string>();
  r.participant = j.at("participant").get<std::string>();
  if (kind == "rev") {
    r.kind = TraceRecord::Kind::Rev;
    r.choice_state = j.value("choiceState", "");
    r.anchor = log_record_from_json(j.at("anchor"));
    for (const auto& l : j.value("removed", json::array())) r.removed.push_back(log_record_from_json(l));
    r.exhausted = j.value("exhausted", false);
    return r;
  }
  if (kind == "out") {
    r.kind = TraceRecord::Kind::Out;
  } else if (kind == "inp") {
    r.kind = TraceRecord::Kind::Inp;
  } else {
    throw std::invalid_argument("unknown trace kind '" + kind + "'");
  }
  r.channel = channel_from_string(j.at("channel").get<std::string>());
  r.message = j.at("message").get<std::string>();
  r.cp = j.at("cp").get<int>();
  r.timestamp = j.value("timestamp", 0);
  r.from_state = j.value("fromState", "");
  r.to_state = j.value("toState", "");
  return r;
}

Directive directive_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("directive must be an object");
  Directive d;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "auto") {
    d.kind = Directive::Kind::Auto;
    d.count = j.value("n", j.value("count", 1));
    return d;
  }
  d.participant = j.at("participant").get<std::string>();
  if (kind == "rev") {
    d.kind = Directive::Kind::Rev;
    if (j.contains("anchor")) {
      const auto& a = j.at("anchor");
      if (a.contains("timestamp")) d.anchor_timestamp = a.at("timestamp").get<int>();
      if (a.contains("channel")) d.channel = channel_from_string(a.at("channel").get<std::string>());
    }
    return d;
  }
  if (kind == "out") {
    d.kind = Directive::Kind::Out;
  } else if (kind == "inp") {
    d.kind = Directive::Kind::Inp;
  } else {
    throw std::invalid_argument("unknown directive kind '" + kind + "'");
  }
  if (j.contains("cp")) d.cp = j.at("cp").get<int>();
  if (j.contains("channel")) d.channel = channel_from_string(j.at("channel").get<std::string>());
  if (j.contains("message")) d.message = j.at("message").get<std::string>();
  return d;
}

std::vector<Directive> schedule_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("schedule must be a JSON array");
  std::vector<Directive> out;
  for (const auto& e : j) out.push_back(directive_from_json(e));
  return out;
}

Directive directive_from(const TraceRecord& r) {
  Directive d;
  d.participant = r.participant;
  if (r.kind == TraceRecord::Kind::Rev) {
    d.kind = Directive::Kind::Rev;
    d.channel = r.anchor.channel;
    d.anchor_timestamp = r.anchor.timestamp;
    return d;
  }
  d.kind = r.kind == TraceRecord::Kind::Out ? Directive::Kind::Out : Directive::Kind::Inp;
  d.cp = r.cp;
  d.channel = r.channel;
  d.message = r.message;
  return d;
}

json to_json(const Configuration& cfg, const System& s) {
  json states = json::object();
  for (const auto& [a, q] : cfg.states) states[a] = state_name(s, q);
  json channels = json::object();
  for (const auto& [c, st] : cfg.channels) {
    json consumed = json::array(), pending = json::array();
    for (const auto& l : st.consumed) consumed.push_back(to_json(make_log_record(c, l, s)));
    for (const auto& l : st.pending) pending.push_back(to_json(make_log_record(c, l, s)));
    channels[to_string(c)] = {{"consumed", consumed}, {"pending", pending}};
  }
  json book = json::array();
  for (const auto& [q, e] : cfg.book.entries()) {
    json tried = json::array();
    for (const auto& [ev, g] : e.tried) tried.push_back({{"event", to_string(ev)}, {"guard", to_string(g)}});
    book.push_back({{"state", state_name(s, q)}, {"tried", tried}, {"exhausted", e.exhausted}});
  }
  return {{"states", states}, {"channels", channels}, {"book", book}};
}

json envelope(const std::string& command, bool ok, json report, json counterexample) {
  return {{"tool", kToolName},          {"version", kToolVersion}, {"schema", kSchemaVersion},
          {"command", command},         {"ok", ok},                {"report", std::move(report)},
          {"counterexample", std::move(counterexample)}};
}

}  // namespace chorrev
