#include "dsa/observation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsa {

namespace {

constexpr double kPriorSumTol = 1e-12;

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be a positive finite number");
}

void require_zeta(double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("zeta must lie strictly inside (0, 1)");
}

}  // namespace

std::vector<std::string> validate(const ObservationModel& m, int num_channels) {
  std::vector<std::string> violations;
  if (!(m.sigma > 0.0) || !std::isfinite(m.sigma))
    violations.push_back("sigma must be a positive finite number");
  if (m.theta_set.empty())
    violations.push_back("the candidate amplitude set must be nonempty");
  for (std::size_t i = 0; i < m.theta_set.size(); ++i) {
    if (!(m.theta_set[i] > 0.0) || !std::isfinite(m.theta_set[i])) {
      violations.push_back("candidate amplitudes must be positive finite numbers");
      break;
    }
  }
  for (std::size_t i = 1; i < m.theta_set.size(); ++i) {
    if (!(m.theta_set[i] > m.theta_set[i - 1])) {
      violations.push_back("candidate amplitudes must be strictly increasing");
      break;
    }
  }
  if (!m.prior.empty()) {
    if (m.prior.size() != m.theta_set.size()) {
      violations.push_back("prior length must match the candidate set");
    } else {
      double sum = 0.0;
      bool negative = false;
      for (double v : m.prior) {
        sum += v;
        negative = negative || v < 0.0;
      }
      if (negative) violations.push_back("prior weights must be nonnegative");
      if (std::abs(sum - 1.0) > kPriorSumTol)
        violations.push_back("prior weights must sum to 1");
    }
  }
  if (!m.true_theta_index.empty()) {
    if (num_channels >= 0 &&
        m.true_theta_index.size() != static_cast<std::size_t>(num_channels))
      violations.push_back("true amplitude indices must cover every channel");
    for (int idx : m.true_theta_index)
      if (idx < 0 || idx >= static_cast<int>(m.theta_set.size())) {
        violations.push_back("true amplitude index out of range");
        break;
      }
  }
  return violations;
}

double amplitude_from_snr_db(double snr_db, double sigma) {
  require_sigma(sigma);
  return sigma * std::pow(10.0, snr_db / 20.0);
}

double snr_db_from_amplitude(double theta, double sigma) {
  require_sigma(sigma);
  if (!(theta > 0.0)) throw std::invalid_argument("amplitude must be positive");
  return 20.0 * std::log10(theta / sigma);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double inv_norm_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("quantile argument must lie strictly inside (0, 1)");

  // Solve upper-tail arguments through the mirrored lower-tail problem:
  // 1 - p is exact for p in [0.5, 1), and the lower tail is where the
  // erfc-based CDF keeps full relative accuracy, so the polish step below
  // retains its strength arbitrarily far out.
  if (p > 0.5) return -inv_norm_cdf(1.0 - p);

  // Acklam's rational approximation (lower tail and central region).
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // One Halley step against the erfc-based CDF removes the 1e-9 tail of the
  // rational fit.
  const double err = norm_cdf(x) - p;
  const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  x -= u / (1.0 + x * u / 2.0);
  return x;
}

double log_normal_pdf(double y, double mean, double sigma) {
  require_sigma(sigma);
  const double z = (y - mean) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double sample(int state, double theta, double sigma, std::mt19937_64& rng) {
  require_sigma(sigma);
  if (state != 0 && state != 1) throw std::invalid_argument("state must be 0 or 1");
  std::normal_distribution<double> noise(0.0, sigma);
  const double n = noise(rng);
  return state == 1 ? theta + n : n;
}

double llr(double y, double theta, double sigma) {
  require_sigma(sigma);
  const double s2 = sigma * sigma;
  return theta * y / s2 - theta * theta / (2.0 * s2);
}

double access_threshold(double zeta, double theta, double sigma) {
  require_zeta(zeta);
  require_sigma(sigma);
  return theta + sigma * inv_norm_cdf(zeta);
}

double false_alarm(double tau, double sigma) {
  require_sigma(sigma);
  return 1.0 - norm_cdf(tau / sigma);
}

double worst_case_theta(std::span<const double> theta_set) {
  if (theta_set.empty())
    throw std::invalid_argument("the candidate amplitude set must be nonempty");
  double min_theta = theta_set[0];
  for (double t : theta_set) {
    if (!(t > 0.0)) throw std::invalid_argument("candidate amplitudes must be positive");
    min_theta = std::min(min_theta, t);
  }
  return min_theta;
}

AccessThresholds make_access_thresholds(double zeta, std::span<const double> theta_set,
                                        double sigma) {
  require_zeta(zeta);
  require_sigma(sigma);
  AccessThresholds t;
  t.zeta = zeta;
  t.tau.reserve(theta_set.size());
  t.epsilon.reserve(theta_set.size());
  for (double theta : theta_set) {
    const double tau = access_threshold(zeta, theta, sigma);
    t.tau.push_back(tau);
    t.epsilon.push_back(false_alarm(tau, sigma));
  }
  return t;
}

Condition26Result verify_condition_26(std::span<const double> theta_set, double sigma,
                                      std::span<const double> tau_grid) {
  require_sigma(sigma);
  if (tau_grid.size() < 100)
    throw std::invalid_argument("the threshold grid must hold at least 100 points");
  const double theta_star = worst_case_theta(theta_set);
  const double s2 = sigma * sigma;
  Condition26Result res;
  for (double tau : tau_grid) {
    // llr(y, theta*, sigma) > tau  <=>  y > y_tau
    const double y_tau = (tau + theta_star * theta_star / (2.0 * s2)) * s2 / theta_star;
    const double base = 1.0 - norm_cdf((y_tau - theta_star) / sigma);
    for (double theta : theta_set) {
      const double exceed = 1.0 - norm_cdf((y_tau - theta) / sigma);
      if (exceed < base - 1e-15) {
        res.ok = false;
        res.tau = tau;
        res.theta = theta;
        return res;
      }
    }
  }
  return res;
}

std::vector<double> default_tau_grid(std::span<const double> theta_set, double sigma,
                                     int n) {
  require_sigma(sigma);
  if (n < 100) throw std::invalid_argument("the threshold grid must hold at least 100 points");
  const double theta_star = worst_case_theta(theta_set);
  const double lo = theta_star - 6.0 * sigma;
  const double hi = *std::max_element(theta_set.begin(), theta_set.end()) + 6.0 * sigma;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    grid[i] = llr(y, theta_star, sigma);
  }
  return grid;
}

}  // namespace dsa
