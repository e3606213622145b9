#include "delaylab/protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "delaylab/errors.hpp"

namespace delaylab {

Episode::Episode(const Environment& env, Learner& learner, const DelayModel& delays,
                 std::uint64_t master_seed, std::uint64_t run_index, EpisodeOptions options)
    : env_(env),
      learner_(learner),
      delays_(delays),
      options_(options),
      env_rng_(substream_seed(master_seed, Stream::environment, run_index)),
      delay_rng_(substream_seed(master_seed, Stream::delay, run_index)) {
  if (learner_.num_actions() != env_.num_actions()) {
    throw ProtocolError("learner and environment disagree on the number of actions");
  }
  learner_.begin(substream_seed(master_seed, Stream::learner, run_index));
  trace_.diagnostic_columns = learner_.diagnostic_columns();
}

void Episode::step() {
  const Step t = ++t_;
  trace_.outstanding.push_back(in_flight_);

  const Action a = learner_.select(t);
  if (a >= env_.num_actions()) {
    throw ProtocolError("learner returned out-of-range action at step " + std::to_string(t));
  }
  if (!trace_.diagnostic_columns.empty()) trace_.diagnostics.push_back(learner_.diagnostics());

  Outcome outcome = env_.draw(t, a, env_rng_);
  const std::int64_t tau = delays_.sample(t, a, delay_rng_);
  if (tau < 0) throw ProtocolError("delay model produced a negative delay");

  trace_.actions.push_back(a);
  trace_.rewards.push_back(outcome.reward);
  trace_.delays.push_back(tau);
  ++in_flight_;
  pending_[t + tau].push_back({t, std::move(outcome.payload)});

  FeedbackBatch batch{t, {}};
  if (auto it = pending_.find(t); it != pending_.end()) {
    // Buckets fill in origin order, so each is already sorted.
    batch.events = std::move(it->second);
    pending_.erase(it);
  }
  in_flight_ -= static_cast<std::int64_t>(batch.events.size());
  if (options_.drop_origin) {
    std::erase_if(batch.events,
                  [&](const FeedbackEvent& e) { return e.origin_step == *options_.drop_origin; });
  }
  learner_.absorb(batch, trace_.actions);
  trace_.batches.push_back(std::move(batch));
  trace_.horizon = t;
}

namespace {

void move_pending(const std::map<Step, std::vector<FeedbackEvent>>& pending, RunTrace& trace) {
  for (const auto& [arrival, events] : pending) {
    trace.undelivered.insert(trace.undelivered.end(), events.begin(), events.end());
  }
  std::sort(trace.undelivered.begin(), trace.undelivered.end(),
            [](const FeedbackEvent& x, const FeedbackEvent& y) { return x.origin_step < y.origin_step; });
}

}  // namespace

RunTrace Episode::snapshot() const {
  RunTrace copy = trace_;
  move_pending(pending_, copy);
  return copy;
}

RunTrace Episode::finish() && {
  move_pending(pending_, trace_);
  pending_.clear();
  return std::move(trace_);
}

RunTrace run_episode(const Environment& env, Learner& learner, const DelayModel& delays,
                     Step horizon, std::uint64_t master_seed, std::uint64_t run_index,
                     EpisodeOptions options) {
  if (horizon < 1) throw EmptyRunError();
  Episode episode(env, learner, delays, master_seed, run_index, options);
  for (Step t = 1; t <= horizon; ++t) episode.step();
  return std::move(episode).finish();
}

std::int64_t outstanding_count(std::span<const std::int64_t> delays, Step t) {
  std::int64_t g = 0;
  for (Step s = 1; s < t; ++s) {
    if (s + delays[static_cast<std::size_t>(s - 1)] >= t) ++g;
  }
  return g;
}

std::int64_t max_outstanding(std::span<const std::int64_t> delays, Step n) {
  std::int64_t best = 0;
  for (Step t = 1; t <= n; ++t) best = std::max(best, outstanding_count(delays, t));
  return best;
}

std::int64_t per_action_gap(const RunTrace& trace, Action action, Step t) {
  std::int64_t plays = 0;
  for (Step s = 1; s < t; ++s) {
    if (trace.actions[static_cast<std::size_t>(s - 1)] == action) ++plays;
  }
  std::int64_t observed = 0;
  for (Step s = 1; s < t; ++s) {
    for (const auto& e : trace.batches[static_cast<std::size_t>(s - 1)].events) {
      if (trace.actions[static_cast<std::size_t>(e.origin_step - 1)] == action) ++observed;
    }
  }
  return plays - observed;
}

std::int64_t scheduled_action_gap(const RunTrace& trace, Action action, Step t) {
  std::int64_t g = 0;
  for (Step s = 1; s < t; ++s) {
    const auto i = static_cast<std::size_t>(s - 1);
    if (trace.actions[i] == action && s + trace.delays[i] >= t) ++g;
  }
  return g;
}

std::vector<std::vector<std::int64_t>> action_gap_series(const RunTrace& trace,
                                                         std::size_t num_actions) {
  const auto n = static_cast<std::size_t>(trace.horizon);
  std::vector<std::vector<std::int64_t>> series(n, std::vector<std::int64_t>(num_actions, 0));
  // leaving[s] = per-action count of events whose feedback lands at the end of step s
  std::vector<std::vector<std::int64_t>> leaving(n + 1, std::vector<std::int64_t>(num_actions, 0));
  std::vector<std::int64_t> in_flight(num_actions, 0);
  for (std::size_t s = 1; s <= n; ++s) {
    series[s - 1] = in_flight;
    const Action a = trace.actions[s - 1];
    const auto arrival = static_cast<std::size_t>(static_cast<std::int64_t>(s) + trace.delays[s - 1]);
    ++in_flight[a];
    if (arrival <= n) ++leaving[arrival][a];
    for (std::size_t i = 0; i < num_actions; ++i) in_flight[i] -= leaving[s][i];
  }
  return series;
}

std::vector<std::int64_t> max_action_gaps(const RunTrace& trace, std::size_t num_actions) {
  std::vector<std::int64_t> best(num_actions, 0);
  for (const auto& row : action_gap_series(trace, num_actions)) {
    for (std::size_t i = 0; i < num_actions; ++i) best[i] = std::max(best[i], row[i]);
  }
  return best;
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "t,action,reward,delay,g_t,arrivals";
  for (const auto& c : trace.diagnostic_columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    out << i + 1 << ',' << trace.actions[i] << ',' << format_real(trace.rewards[i]) << ','
        << trace.delays[i] << ',' << trace.outstanding[i] << ',';
    const auto& events = trace.batches[i].events;
    for (std::size_t j = 0; j < events.size(); ++j) {
      if (j) out << ';';
      out << events[j].origin_step;
    }
    if (i < trace.diagnostics.size()) {
      for (const auto& d : trace.diagnostics[i]) out << ',' << d;
    }
    out << '\n';
  }
}

}  // namespace delaylab
