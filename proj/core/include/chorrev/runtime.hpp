#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chorrev/machine.hpp"
#include "chorrev/order.hpp"

namespace chorrev {

/// Bookkeeping attached to a consumed log so that rollback can restore the
/// receiver. Not part of the log as seen by guards or traces.
struct Receipt {
  StateId receiver_state;  // state before the input
  int seq = 0;             // receiver's local action index
  auto operator<=>(const Receipt&) const = default;
};

struct Log {
  Message message;
  StateId sender_state;
  ControlPoint cp = 0;
  int timestamp = 0;
  int seq = 0;  // sender's local action index
  std::optional<Receipt> receipt;

  auto operator<=>(const Log&) const = default;
  bool operator==(const Log&) const = default;
};

/// Identity of a log inside a configuration.
struct LogRef {
  Channel channel;
  int timestamp = 0;
  auto operator<=>(const LogRef&) const = default;
};

struct ChannelState {
  std::vector<Log> consumed;
  std::vector<Log> pending;

  /// consumed ++ pending.
  std::vector<Log> all() const;
  bool empty() const { return consumed.empty() && pending.empty(); }
  auto operator<=>(const ChannelState&) const = default;
  bool operator==(const ChannelState&) const = default;
};

using Channels = std::map<Channel, ChannelState>;

struct BookEntry {
  std::set<std::pair<Event, Guard>> tried;
  bool exhausted = false;
  auto operator<=>(const BookEntry&) const = default;
  bool operator==(const BookEntry&) const = default;
};

/// Branch book β. Absent entries read as (∅, false).
class BranchBook {
 public:
  BookEntry at(StateId q) const;
  void set(StateId q, BookEntry e);
  void reset(StateId q) { entries_.erase(q); }
  const std::map<StateId, BookEntry>& entries() const { return entries_; }

  auto operator<=>(const BranchBook&) const = default;
  bool operator==(const BranchBook&) const = default;

 private:
  std::map<StateId, BookEntry> entries_;
};

struct Configuration {
  std::map<Participant, StateId> states;
  Channels channels;
  BranchBook book;

  auto operator<=>(const Configuration&) const = default;
  bool operator==(const Configuration&) const = default;
};

enum class GuardScope { Full, PendingOnly };

/// Deliberate defects used to show that the checks can fail.
enum class Mutation { None, OutputDropsLog, RollbackKeepsSenderState };

struct RuntimeOptions {
  GuardScope scope = GuardScope::Full;
  /// Prose reading: a decorated output whose branch can still be reverted is
  /// blocked while its guard holds.
  bool block_on_guard = false;
  Mutation mutation = Mutation::None;
};

/// All ordered pairs of distinct participants.
std::vector<Channel> system_channels(const System& s);

Configuration initial_configuration(const System& s);

int next_timestamp(const Channels& chi, const Participant& a);

/// Next local action index of `a`: its sent logs plus its receipts.
int next_seq(const Channels& chi, const Participant& a);

bool eval_guard(const Guard& g, const Channels& chi, GuardScope scope = GuardScope::Full);

bool decoration_valid(const Decoration& d, const BranchBook& book);

std::optional<BranchBook> upd_out(const Decoration& d, const BranchBook& book);
BranchBook upd_inp(const Decoration& d, const BranchBook& book);

struct ForwardStep {
  enum class Kind { Out, Inp };
  Kind kind = Kind::Out;
  Participant participant;
  Transition transition;
};

/// Rule [OUT]; nullopt when not enabled.
std::optional<Configuration> step_output(const Configuration& cfg, const System& s, const Participant& a,
                                         const Transition& t, const RuntimeOptions& opts = {});
/// Rule [INP]; nullopt when not enabled.
std::optional<Configuration> step_input(const Configuration& cfg, const System& s, const Participant& a,
                                        const Transition& t, const RuntimeOptions& opts = {});

std::vector<ForwardStep> enabled_forward(const Configuration& cfg, const System& s,
                                         const RuntimeOptions& opts = {});

Configuration apply_forward(const Configuration& cfg, const System& s, const ForwardStep& step,
                            const RuntimeOptions& opts = {});

/// Standard configuration: states and pending message words.
struct PlainConfiguration {
  std::map<Participant, StateId> states;
  std::map<Channel, std::vector<Message>> words;  // non-empty words only

  auto operator<=>(const PlainConfiguration&) const = default;
  bool operator==(const PlainConfiguration&) const = default;
};

PlainConfiguration forget_config(const Configuration& cfg);

/// Deterministic text encoding; equal iff the configurations are equal.
std::string canonical(const Configuration& cfg);
std::string canonical(const PlainConfiguration& cfg);

/// Locates a log by reference.
const Log* find_log(const Channels& chi, const LogRef& ref);

/// Human-readable rendering of logs, channels and configurations.
std::string to_string(const Log& l, const System* s = nullptr);
std::string describe(const Configuration& cfg, const System& s);

/// Machine of the participant owning state `q`, or nullptr.
const RCfsm* owner_of(const System& s, StateId q);

}  // namespace chorrev
