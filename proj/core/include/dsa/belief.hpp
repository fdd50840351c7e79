#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dsa/markov.hpp"
#include "dsa/observation.hpp"

namespace dsa {

/// Per-channel occupancy probabilities conditioned on the decision history.
struct BeliefState {
  std::vector<double> p;  ///< p[a] = P(channel a occupied | history)
};

/// Every channel starts at the stationary occupancy probability.
BeliefState initial_belief(const ChannelSetModel& model);

/// Outcome of one access attempt.  An acknowledgement can only arrive for a
/// slot in which the channel was actually accessed.
struct AckEvent {
  bool accessed = false;
  bool ack_received = false;
};

/// Counters for rare numerical fallbacks, surfaced through the simulator.
struct BeliefDiagnostics {
  long long underflow_fallbacks = 0;
};

/// Bayes update of the predicted occupancy q after observing sample y on the
/// sensed channel whose occupied-mean amplitude is theta:
///   p' = q f_theta(y) / (q f_theta(y) + (1 - q) f_0(y)).
/// Computed in log space.  If y is not finite the update degenerates; q is
/// returned unchanged and a fallback is counted.
double update_known(double q, double y, double theta, double sigma,
                    BeliefDiagnostics* diag = nullptr);

/// Belief propagation for a channel that was not sensed this slot.
double propagate_unsensed(double p_prev, const TransitionMatrix& P);

/// Acknowledgement-only update of the predicted occupancy q.  Accessing and
/// hearing an ACK proves the channel was free (p' = 0); accessing without an
/// ACK proves a collision (p' = 1).  When the channel was sensed but not
/// accessed, the event {Y >= tau} itself carries information:
///   p' = q (1 - zeta) / (q (1 - zeta) + (1 - q) epsilon),
/// where epsilon is the false-alarm rate of the access test.  Passing
/// use_no_access_info = false discards that information and returns q.
double update_ack(double q, const AckEvent& event, double zeta, double epsilon,
                  bool use_no_access_info = true);

/// Combined update using both the sample and the acknowledgement: an access
/// resolves the state exactly through the ACK bit, otherwise the sample is
/// fully informative and the update equals update_known.
double update_combined(double q, double y, const AckEvent& event, double theta,
                       double sigma, BeliefDiagnostics* diag = nullptr);

/// Joint posterior over (candidate amplitude, occupancy) per channel:
/// entry (a, i, j) = P(theta_a = theta_set[i], S_a = j | history).
class JointBeliefArray {
 public:
  JointBeliefArray() = default;
  JointBeliefArray(int num_channels, int num_candidates);

  int num_channels() const { return L_; }
  int num_candidates() const { return N_; }

  double at(int a, int i, int j) const { return data_[index(a, i, j)]; }
  double& at(int a, int i, int j) { return data_[index(a, i, j)]; }

  /// Flat (candidate, occupancy) slab of one channel, laid out as [i * 2 + j].
  std::span<double> channel(int a);
  std::span<const double> channel(int a) const;

 private:
  std::size_t index(int a, int i, int j) const {
    return (static_cast<std::size_t>(a) * N_ + i) * 2 + j;
  }
  int L_ = 0;
  int N_ = 0;
  std::vector<double> data_;
};

/// Joint beliefs start at prior(theta) x (stationary occupancy) per channel.
JointBeliefArray initial_joint_belief(const ChannelSetModel& model,
                                      const ObservationModel& obs);

/// One-step prediction of a channel slab: h[i][j] = sum_l P(l, j) q[i][l].
/// Preserves the amplitude marginal.
void joint_predict(std::span<const double> q_channel, const TransitionMatrix& P,
                   std::span<double> h_channel);

/// Measurement update of a predicted slab with sample y:
///   q[i][0] ~ h[i][0] f_0(y),  q[i][1] ~ h[i][1] f_theta_i(y),
/// normalized over all (i, j).  Computed in log space; if the total mass
/// degenerates the slab is propagated unchanged and a fallback is counted.
void joint_update(std::span<const double> h_channel, double y,
                  std::span<const double> theta_set, double sigma,
                  std::span<double> q_channel, BeliefDiagnostics* diag = nullptr);

/// Amplitude posterior of a slab: b[i] = sum_j slab[i][j].
std::vector<double> theta_posterior(std::span<const double> channel_slab);

/// Allocation-free variant writing into a caller-provided buffer.
void theta_posterior(std::span<const double> channel_slab, std::span<double> out);

/// Probability that the channel is free: sum_i slab[i][0].
double free_marginal(std::span<const double> channel_slab);

/// Probability that the channel is occupied: sum_i slab[i][1].
double occupancy_marginal(std::span<const double> channel_slab);

}  // namespace dsa
