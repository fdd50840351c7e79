#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsa/belief.hpp"
#include "dsa/observation.hpp"

namespace dsa {

/// Channel-selection and access strategies implemented by the simulator.
enum class PolicyKind {
  GreedyObservation,  ///< beliefs updated from the sensed sample (amplitude known)
  GreedyAck,          ///< beliefs updated from acknowledgements only
  GreedyCombined,     ///< beliefs updated from sample and acknowledgement
  Robust,             ///< amplitude unknown; design against the smallest candidate
  Learning,           ///< amplitude unknown; joint Bayesian learning
};

/// Canonical lowercase token for a policy (used in configs and CSV output).
std::string to_string(PolicyKind kind);

/// Inverse of to_string; empty optional for an unrecognized token.
std::optional<PolicyKind> policy_from_token(std::string_view token);

/// All recognized policy tokens, comma separated (for error messages).
std::string policy_token_list();

/// Picks the channel most likely to be free: argmax_a (1 - q[a]), ties going
/// to the lowest index.
int greedy_select(std::span<const double> q);

/// Access test with a known amplitude: transmit iff y < tau (strict).
bool access_known(double y, double tau);

/// Access test of the robust design: transmit iff y clears the threshold of
/// the smallest candidate amplitude.  Equivalent to requiring the test to
/// pass for every candidate simultaneously.
bool access_worst_case(double y, std::span<const double> theta_set, double sigma,
                       double zeta);

/// Outcome of splitting the amplitude posterior of one channel into a
/// low-confidence part (total mass below zeta, ignored) and the rest.
struct PartitionResult {
  int num_ignored = 0;              ///< hypotheses dropped from the access rule
  std::vector<double> theta_upper;  ///< retained candidate amplitudes, ascending
  double theta_sharp = 0;           ///< smallest retained amplitude
  double tau_r = 0;                 ///< access threshold at theta_sharp
  double epsilon_a = 0;             ///< false-alarm rate of that threshold
};

/// Sorts hypotheses by ascending posterior (ties by ascending amplitude) and
/// ignores the longest prefix whose total mass stays below zeta.  The
/// retained set is never empty and the ignored mass is strictly below zeta.
PartitionResult partition(std::span<const double> posterior,
                          std::span<const double> theta_set, double zeta,
                          double sigma);

/// Allocation-free variant reusing the buffers inside `out`.
void partition(std::span<const double> posterior, std::span<const double> theta_set,
               double zeta, double sigma, PartitionResult& out);

/// Access test of the learning scheme: transmit iff y < tau_r of the sensed
/// channel's current partition.
bool access_learning(double y, const PartitionResult& part);

/// Learning-scheme channel choice: argmax_a P(channel a free | history) *
/// (1 - epsilon_a), ties going to the lowest index.  The slabs of predicted
/// joint beliefs provide the free-state marginals.
int learning_greedy_select(const JointBeliefArray& predicted,
                           std::span<const PartitionResult> parts);

/// Periodic forced exploration: slots whose index modulo (C * L) falls in
/// [0, L) sense channel_order[slot mod C*L]; every other slot defers to the
/// fallback choice.  Guarantees each channel is sensed at least once every
/// C * L slots.
int modified_select(long long slot, long long C, std::span<const int> channel_order,
                    int fallback_choice);

}  // namespace dsa
