#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "dsa/markov.hpp"

namespace dsa {

/// Discounted expected visit weight of the all-occupied joint state:
/// w = (I - alpha * JointP)^{-1} e, where e indicates the all-ones state.
/// Solved densely with partially pivoted LU; the residual is verified to be
/// at most 1e-10 in the infinity norm.
Eigen::VectorXd solve_w(const JointTransitionMatrix& joint, double alpha);

/// Same system without materializing the joint matrix: a Richardson
/// iteration using the product structure of the chain.  Used automatically
/// for large channel counts; exact same residual contract.
Eigen::VectorXd solve_w(const ChannelSetModel& model, double alpha);

/// Value of knowing the previous joint state to be `state_bits` when every
/// later slot also reveals the state:
///   kappa * (p00 / (1 - alpha) - (p00 - p10) * w[state_bits]),
/// where kappa is the per-slot reward scale B * (1 - epsilon).
double j_tilde(std::uint32_t state_bits, const Eigen::VectorXd& w, double kappa,
               double alpha, const TransitionMatrix& P);

/// Upper bound on the discounted reward of any belief-based policy, obtained
/// by granting full state information from the second slot on:
///   B (1 - epsilon) (1 - p*) + alpha * sum_x P(x | q = p* 1) j_tilde(x).
double upper_bound(const ChannelSetModel& model, double alpha, double epsilon);

/// Independent check of j_tilde: value iteration on the fully observed MDP
/// whose per-slot reward is kappa * P(x_u, 0) for the chosen channel u.  The
/// returned vector is within tol of the true fixed point in sup norm.
/// Channel count is capped at 8.
Eigen::VectorXd full_observation_value_oracle(const ChannelSetModel& model,
                                              double alpha, double kappa,
                                              double tol = 1e-10);

}  // namespace dsa
