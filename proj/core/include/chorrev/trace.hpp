#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chorrev/backward.hpp"
#include "chorrev/runtime.hpp"

namespace chorrev {

inline constexpr const char* kToolName = "chorrev";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct LogRecord {
  Channel channel;
  Message message;
  std::string sender_state;
  ControlPoint cp = 0;
  int timestamp = 0;
  bool operator==(const LogRecord&) const = default;
};

/// One executed step.
struct TraceRecord {
  enum class Kind { Out, Inp, Rev };
  Kind kind = Kind::Out;
  Participant participant;
  // out / inp
  Channel channel;
  Message message;
  ControlPoint cp = 0;
  int timestamp = 0;
  std::string from_state;
  std::string to_state;
  // rev
  std::string choice_state;
  LogRecord anchor;
  std::vector<LogRecord> removed;
  bool exhausted = false;

  bool operator==(const TraceRecord&) const = default;
};

/// Schedule entry. Unset optional fields match anything.
struct Directive {
  enum class Kind { Out, Inp, Rev, Auto };
  Kind kind = Kind::Out;
  Participant participant;
  std::optional<ControlPoint> cp;
  std::optional<Channel> channel;
  std::optional<Message> message;
  std::optional<int> anchor_timestamp;
  int count = 0;  // Auto
};

LogRecord make_log_record(const Channel& c, const Log& l, const System& s);

nlohmann::json to_json(const Channel& c);
Channel channel_from_string(const std::string& text);
nlohmann::json to_json(const LogRecord& r);
nlohmann::json to_json(const TraceRecord& r);
nlohmann::json to_json(const std::vector<TraceRecord>& trace);
TraceRecord trace_record_from_json(const nlohmann::json& j);

/// Accepts trace records and bare directives alike.
Directive directive_from_json(const nlohmann::json& j);
std::vector<Directive> schedule_from_json(const nlohmann::json& j);
Directive directive_from(const TraceRecord& r);

nlohmann::json to_json(const Configuration& cfg, const System& s);

/// {tool, version, schema, command, ok, report, counterexample}.
nlohmann::json envelope(const std::string& command, bool ok, nlohmann::json report,
                        nlohmann::json counterexample = nullptr);

}  // namespace chorrev
