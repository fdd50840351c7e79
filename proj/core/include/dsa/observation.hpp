#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

namespace dsa {

/// Gaussian sensing model shared by all channels: a sensed sample is
/// N(0, sigma^2) on a free channel and N(theta_a, sigma^2) on an occupied
/// one, where theta_a is the (possibly unknown) primary amplitude of the
/// sensed channel drawn from the finite candidate set theta_set.
struct ObservationModel {
  double sigma = 1.0;
  std::vector<double> theta_set;       ///< candidate amplitudes, ascending, all > 0
  std::vector<double> prior;           ///< prior over theta_set (empty = uniform)
  std::vector<int> true_theta_index;   ///< per channel, used by the simulator
};

/// Violations of the observation-model invariants; empty means usable.
std::vector<std::string> validate(const ObservationModel& m, int num_channels);

/// Signal amplitude for a given SNR in dB: sigma * 10^(db/20).
double amplitude_from_snr_db(double snr_db, double sigma);

/// SNR in dB of a given amplitude: 20 * log10(theta / sigma).
double snr_db_from_amplitude(double theta, double sigma);

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile.  Rational initial guess (Acklam's algorithm,
/// |relative error| < 1.15e-9) polished by one Halley step against erfc,
/// leaving |norm_cdf(result) - p| at machine precision.  Rejects p outside
/// (0, 1).
double inv_norm_cdf(double p);

/// Log density of N(mean, sigma^2) at y.
double log_normal_pdf(double y, double mean, double sigma);

/// Draws one sensing sample for a channel in the given state (0 = free).
double sample(int state, double theta, double sigma, std::mt19937_64& rng);

/// Log-likelihood ratio of occupied vs free at sample y:
/// (theta / sigma^2) * y - theta^2 / (2 sigma^2).  Strictly increasing in y.
double llr(double y, double theta, double sigma);

/// Observation-space access threshold: access when Y < tau with
/// tau = theta + sigma * inv_norm_cdf(zeta), so that
/// P(Y < tau | occupied, theta) = zeta.
double access_threshold(double zeta, double theta, double sigma);

/// False-alarm probability of the access test: P(Y > tau | free) =
/// 1 - norm_cdf(tau / sigma).
double false_alarm(double tau, double sigma);

/// Design point of the robust scheme: the smallest candidate amplitude.
/// All candidates must be positive.
double worst_case_theta(std::span<const double> theta_set);

/// Per-candidate access thresholds and false-alarm rates at a common zeta.
struct AccessThresholds {
  double zeta = 0;
  std::vector<double> tau;      ///< tau[i] for theta_set[i], strictly increasing
  std::vector<double> epsilon;  ///< epsilon[i] = false_alarm(tau[i]), strictly decreasing
};

AccessThresholds make_access_thresholds(double zeta, std::span<const double> theta_set,
                                        double sigma);

/// Result of the exceedance-dominance check below.
struct Condition26Result {
  bool ok = true;
  double tau = 0;    ///< counterexample threshold (LLR space) when !ok
  double theta = 0;  ///< counterexample candidate when !ok
};

/// Verifies that for every tau in the grid and every theta in the set,
/// P_theta(llr(Y, theta*, sigma) > tau | occupied) >=
/// P_theta*(llr(Y, theta*, sigma) > tau | occupied), where theta* is the
/// smallest candidate.  This is what lets the robust access rule collapse a
/// per-candidate product of threshold tests into the single worst-case test.
/// The grid must hold at least 100 thresholds.
Condition26Result verify_condition_26(std::span<const double> theta_set, double sigma,
                                      std::span<const double> tau_grid);

/// Default LLR-space threshold grid: n points whose observation-space
/// preimages span [min(theta_set) - 6 sigma, max(theta_set) + 6 sigma].
std::vector<double> default_tau_grid(std::span<const double> theta_set, double sigma,
                                     int n = 201);

}  // namespace dsa
