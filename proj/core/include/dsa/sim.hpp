#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsa/belief.hpp"
#include "dsa/markov.hpp"
#include "dsa/observation.hpp"
#include "dsa/policy.hpp"

namespace dsa {

/// Full description of one Monte Carlo experiment cell.
struct SimConfig {
  ChannelSetModel model;
  ObservationModel obs;
  PolicyKind policy = PolicyKind::GreedyObservation;
  double zeta = 0.01;             ///< interference cap per occupied slot
  double alpha = 0.999;           ///< discount factor
  long long horizon = 10000;      ///< slots per episode
  long long runs = 500;           ///< independent episodes
  std::uint64_t master_seed = 0;
  long long round_robin_C = 0;    ///< 0 = horizon + 1 (forced sensing off after warmup)
  std::vector<int> channel_order; ///< empty = identity
  bool use_no_access_info = true; ///< ack-only scheme: exploit the no-access event
  bool trace_posterior = false;   ///< record amplitude-posterior mass on the truth
  bool trace_beliefs = false;     ///< record per-slot occupancy beliefs
  int threads = 1;                ///< 0 = hardware concurrency
};

/// Violations preventing a simulation from running; empty means runnable.
std::vector<std::string> validate(const SimConfig& config);

/// What happened in one slot of one episode.
struct SlotRecord {
  std::int16_t sensed = 0;        ///< channel sensed this slot
  std::uint32_t state_bits = 0;   ///< true joint state (bit a = channel a occupied)
  std::uint8_t accessed = 0;
  std::uint8_t ack = 0;
  double y = 0;                   ///< sensed sample
  double reward = 0;              ///< realized reward this slot (undiscounted)
};

/// Complete record of one episode.
struct EpisodeTrace {
  std::vector<SlotRecord> slots;
  std::vector<std::vector<double>> belief_snapshots;  ///< per slot, per channel (optional)
  /// Channel-averaged amplitude-posterior mass on the true hypothesis at each
  /// slot boundary: horizon+1 entries, index 0 the prior, the last entry the
  /// posterior after the final update (optional).
  std::vector<double> posterior_mass_on_truth;
  double discounted_reward = 0;
  double discounted_reward_expected_form = 0;  ///< B (1-eps) 1{free} accumulator
  long long occupied_sensed = 0;               ///< slots whose sensed channel was occupied
  long long interfering_accesses = 0;          ///< accesses among those slots
  long long underflow_fallbacks = 0;
};

/// Deterministic per-episode seed: element `index` of a splitmix64 stream
/// seeded at master_seed.
std::uint64_t episode_seed(std::uint64_t master_seed, long long index);

/// Runs one episode with the given seed.
EpisodeTrace run_episode(const SimConfig& config, std::uint64_t seed);

/// Recomputes the discounted reward of a trace from its per-slot state and
/// access records.  Matches the engine's accumulation exactly.
double replay_discounted_reward(const EpisodeTrace& trace, double bandwidth,
                                double alpha);

/// Interference rate with a Wilson 95% confidence interval.
struct InterferenceEstimate {
  long long occupied_sensed = 0;
  long long accesses = 0;
  bool sufficient = false;  ///< false when no occupied slot was ever sensed
  double rate = 0;
  double ci_lo = 0;
  double ci_hi = 0;
};

InterferenceEstimate interference_estimate(long long occupied_sensed,
                                           long long accesses);
InterferenceEstimate interference_estimate(std::span<const EpisodeTrace> traces);

/// Aggregated Monte Carlo outcome of one experiment cell.
struct SimResult {
  long long runs = 0;
  long long horizon = 0;
  double mean_discounted_reward = 0;
  double std_err = 0;  ///< standard error of the mean (0 when runs == 1)
  double mean_discounted_reward_expected_form = 0;
  InterferenceEstimate interference;
  long long underflow_fallbacks = 0;
  // Filled only when trace_posterior is set:
  std::vector<double> posterior_mean;
  std::vector<double> posterior_q05;
  std::vector<double> posterior_q95;
  std::vector<double> final_mass_per_run;
};

/// Runs all episodes (in parallel when configured) and aggregates them in
/// episode order, so results are identical for any thread count.
SimResult run_monte_carlo(const SimConfig& config);

/// Order-insensitive pairwise summation used for all reward aggregation.
double pairwise_sum(std::span<const double> xs);

}  // namespace dsa
