#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delaylab/environments.hpp"
#include "delaylab/rng.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

struct FeedbackEvent {
  Step origin_step = 1;  // t' whose decision this feedback concerns
  Payload payload;
};

// H_t: every event with origin + delay == arrival_step, sorted by origin.
struct FeedbackBatch {
  Step arrival_step = 1;
  std::vector<FeedbackEvent> events;
};

// Learner as seen by the protocol engine. One select() per step, then the
// step's batch is delivered through absorb(). `actions[s-1]` is a_s for all
// s <= the current step.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::size_t num_actions() const = 0;
  // Resets all state; `seed` is the learner substream of the run.
  virtual void begin(std::uint64_t seed) = 0;
  virtual Action select(Step t) = 0;
  virtual void absorb(const FeedbackBatch& batch, std::span<const Action> actions) = 0;
  // Optional per-step diagnostics, appended to trace CSVs.
  virtual std::vector<std::string> diagnostic_columns() const { return {}; }
  virtual std::vector<std::string> diagnostics() const { return {}; }
};

struct RunTrace {
  Step horizon = 0;
  std::vector<Action> actions;
  std::vector<double> rewards;
  std::vector<std::int64_t> delays;
  std::vector<FeedbackBatch> batches;
  std::vector<std::int64_t> outstanding;  // G_t at prediction time
  // Events whose arrival step lies beyond the horizon.
  std::vector<FeedbackEvent> undelivered;
  std::vector<std::string> diagnostic_columns;
  std::vector<std::vector<std::string>> diagnostics;
};

struct EpisodeOptions {
  // Test hook: silently drop the feedback of this origin step.
  std::optional<Step> drop_origin;
};

// Stepwise driver for the delayed interaction loop. run_episode() is the
// usual entry point; Episode allows continuing past the horizon.
class Episode {
 public:
  Episode(const Environment& env, Learner& learner, const DelayModel& delays,
          std::uint64_t master_seed, std::uint64_t run_index = 0, EpisodeOptions options = {});

  void step();
  Step steps_done() const noexcept { return t_; }
  const RunTrace& trace() const noexcept { return trace_; }
  // Copy of the trace so far, with in-flight events listed as undelivered.
  RunTrace snapshot() const;
  // Pending events become undelivered; the episode is spent afterwards.
  RunTrace finish() &&;

 private:
  const Environment& env_;
  Learner& learner_;
  const DelayModel& delays_;
  EpisodeOptions options_;
  Rng env_rng_;
  Rng delay_rng_;
  Step t_ = 0;
  std::int64_t in_flight_ = 0;
  std::map<Step, std::vector<FeedbackEvent>> pending_;
  RunTrace trace_;
};

RunTrace run_episode(const Environment& env, Learner& learner, const DelayModel& delays,
                     Step horizon, std::uint64_t master_seed, std::uint64_t run_index = 0,
                     EpisodeOptions options = {});

// G_t = sum_{s<t} 1{s + tau_s >= t}, straight from the definition.
std::int64_t outstanding_count(std::span<const std::int64_t> delays, Step t);

// G*_n = max_{1<=t<=n} G_t.
std::int64_t max_outstanding(std::span<const std::int64_t> delays, Step n);

// G_{i,t} = T_i(t-1) - S_i(t-1), counted from the trace's deliveries.
std::int64_t per_action_gap(const RunTrace& trace, Action action, Step t);

// G_{i,t} from the delay schedule alone: sum_{s<t, a_s=i} 1{s + tau_s >= t}.
std::int64_t scheduled_action_gap(const RunTrace& trace, Action action, Step t);

// Row t-1 holds G_{i,t} (schedule-based) for every action i.
std::vector<std::vector<std::int64_t>> action_gap_series(const RunTrace& trace,
                                                         std::size_t num_actions);

// G*_{i,n} for every action.
std::vector<std::int64_t> max_action_gaps(const RunTrace& trace, std::size_t num_actions);

// CSV: t,action,reward,delay,g_t,arrivals[,diagnostics...]; arrivals are
// semicolon-joined origin steps; reals carry 17 significant digits.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

std::string format_real(double value);

}  // namespace delaylab
