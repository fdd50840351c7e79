// Independent reference implementations used only by tests.  These
// deliberately avoid the code paths of the library under test: the normal
// CDF is built from a Maclaurin series / continued fraction rather than the
// C library's erfc, the quantile is found by bisection, and the belief
// recursions are brute-force forward filters in plain probability space.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dsa/markov.hpp"

namespace oracle {

/// Standard normal CDF via an erf Maclaurin series for small arguments and a
/// continued fraction for the tails.  Accurate to ~1e-15 on |x| <= 37.
double norm_cdf(double x);

/// Standard normal quantile by bisection on norm_cdf; |Phi(result)-p| < 1e-14.
double norm_quantile(double p);

/// Forward-filtered occupancy probabilities for a single two-state channel.
/// Slot k first propagates one step from the previous filtered estimate and,
/// when sensed[k] is nonzero, conditions on observation y[k] with densities
/// N(theta, sigma^2) when occupied and N(0, sigma^2) when free.  Returns the
/// filtered occupancy probability after each slot.
std::vector<double> hmm_forward_occupancy(const dsa::TransitionMatrix& P,
                                          double prior_occupied,
                                          std::span<const double> y,
                                          std::span<const unsigned char> sensed,
                                          double theta, double sigma);

/// Forward filter on the (hypothesis, state) product chain: the hypothesis
/// component is static, the state component follows P.  Returns the filtered
/// N x 2 joint posterior after each slot, flattened slot-major as
/// [slot][hypothesis*2 + state].
std::vector<double> joint_forward(const dsa::TransitionMatrix& P,
                                  std::span<const double> prior_hypothesis,
                                  double prior_occupied,
                                  std::span<const double> y,
                                  std::span<const unsigned char> sensed,
                                  std::span<const double> theta_set,
                                  double sigma);

/// One-sided Kolmogorov-Smirnov statistic D+ = sup_x (F_n(x) - F(x)): how far
/// the empirical CDF of `samples` rises above the reference CDF.  Sorts a
/// copy of the samples.
double ks_dplus(std::vector<double> samples,
                const std::function<double(double)>& cdf);

/// Critical value for the one-sided KS statistic at significance alpha:
/// P(D+ > c) ~ exp(-2 n c^2).
double ks_dplus_critical(std::size_t n, double alpha);

}  // namespace oracle
