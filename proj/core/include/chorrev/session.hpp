#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chorrev/backward.hpp"
#include "chorrev/causality.hpp"
#include "chorrev/trace.hpp"

namespace chorrev {

TraceRecord forward_record(const Configuration& before, const System& s, const ForwardStep& step);
TraceRecord reverse_record(const Configuration& before, const System& s, const ReversalCandidate& cand,
                           const ReversalResult& result);

/// A running system: projection, current configuration and the steps taken.
class Session {
 public:
  struct Move {
    bool reverse = false;
    ForwardStep forward;
    ReversalCandidate reversal;
  };

  /// Throws ProjectionError or MachineError when `g` does not project.
  explicit Session(const Choreography& g, RuntimeOptions opts = {});

  const System& system() const { return system_; }
  const CausalContext& context() const { return ctx_; }
  const Configuration& config() const { return config_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  const RuntimeOptions& options() const { return opts_; }

  /// Enabled forward steps followed by enabled reversals.
  std::vector<Move> moves() const;
  std::string describe(const Move& m) const;

  TraceRecord play(const Move& m);

  /// Runs one directive. Auto directives draw from `rng`. On failure returns
  /// false and fills `error`.
  bool apply(const Directive& d, std::mt19937_64& rng, std::string* error = nullptr);

  /// Up to `n` uniformly random moves; stops early on deadlock.
  std::size_t run_random(std::size_t n, std::mt19937_64& rng);

 private:
  System system_;
  CausalContext ctx_;
  RuntimeOptions opts_;
  Configuration config_;
  std::vector<TraceRecord> trace_;
};

}  // namespace chorrev
