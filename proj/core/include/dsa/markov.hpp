#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dsa {

/// Two-state occupancy chain for one channel. State 0 = free, 1 = occupied.
struct TransitionMatrix {
  double p00 = 0;  ///< P(free -> free)
  double p01 = 0;  ///< P(free -> occupied)
  double p10 = 0;  ///< P(occupied -> free)
  double p11 = 0;  ///< P(occupied -> occupied)

  double operator()(int from, int to) const {
    return from == 0 ? (to == 0 ? p00 : p01) : (to == 0 ? p10 : p11);
  }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;
};

/// A set of independent, identically distributed channels.
struct ChannelSetModel {
  int num_channels = 0;    ///< L >= 1
  TransitionMatrix transition;
  double bandwidth = 1.0;  ///< reward collected by one successful access
};

/// Dense transition matrix of the joint state chain on {0,1}^L.
/// Joint state x encodes channel a's state in bit a (bit 0 = channel 0).
using JointTransitionMatrix = Eigen::MatrixXd;

/// Largest L for which the joint chain (2^L states) may be materialized.
inline constexpr int kMaxJointChannels = 16;

/// Returns the list of model violations; empty means the model is usable.
/// Checks row stochasticity, 0 < p00 < 1, 0 < p11 < 1 (both states
/// persistent but not absorbing), p00 > p10 (a free channel is more likely
/// to stay free than an occupied one is to free up), L >= 1, bandwidth > 0.
std::vector<std::string> validate(const ChannelSetModel& model);

/// Long-run probability that a channel is occupied: p01 / (p01 + p10).
double stationary_occupancy(const TransitionMatrix& P);

/// One-step occupancy prediction: q = p11 * p + p01 * (1 - p).
double predict(double p, const TransitionMatrix& P);

/// L-fold product chain over the joint state space, as a 2^L x 2^L matrix.
/// Throws CapacityError for L > kMaxJointChannels.
JointTransitionMatrix joint_matrix(const ChannelSetModel& model);

/// Probability of each joint state when channel a is occupied independently
/// with probability q[a].  Entry x is prod_a (x_a ? q[a] : 1 - q[a]).
std::vector<double> joint_state_distribution(std::span<const double> q);

}  // namespace dsa
