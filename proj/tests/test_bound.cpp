#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dsa/bound.hpp"
#include "dsa/errors.hpp"
#include "dsa/markov.hpp"
#include "dsa/observation.hpp"

namespace {

dsa::TransitionMatrix reference_matrix() { return {0.9, 0.1, 0.2, 0.8}; }

dsa::ChannelSetModel reference_model(int channels) {
  dsa::ChannelSetModel m;
  m.num_channels = channels;
  m.transition = reference_matrix();
  m.bandwidth = 1.0;
  return m;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Closed-form discounted visit weight of the all-occupied joint state from
// start state x, derived by spectral decomposition of the per-channel chain:
// P^k(s -> occupied) = p* + ((s == 1) - p*) lambda^k with lambda the second
// eigenvalue, so the product over channels expands into a double binomial sum
// and the geometric series in k can be summed termwise.
double closed_form_w(std::uint32_t x, int L, const dsa::TransitionMatrix& P,
                     double alpha) {
  const double p_star = dsa::stationary_occupancy(P);
  const double lambda = P.p00 - P.p10;
  const int m = std::popcount(x);
  double total = 0.0;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= L - m; ++j) {
      const double coeff = binom(m, i) * binom(L - m, j) *
                           std::pow(1.0 - p_star, i) *
                           ((j % 2 == 0) ? 1.0 : -1.0) * std::pow(p_star, L - i);
      total += coeff / (1.0 - alpha * std::pow(lambda, i + j));
    }
  return total;
}

}  // namespace

TEST_CASE("visit weights with no discounting reduce to the indicator") {
  for (int L : {1, 2, 3}) {
    const auto w = dsa::solve_w(reference_model(L), 0.0);
    const Eigen::Index n = w.size();
    REQUIRE(n == (Eigen::Index{1} << L));
    for (Eigen::Index x = 0; x < n; ++x)
      CHECK(w(x) == doctest::Approx(x == n - 1 ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single-channel visit weights match the hand-solved 2x2 system") {
  const auto w = dsa::solve_w(reference_model(1), 0.5);
  REQUIRE(w.size() == 2);
  CHECK(w(0) == doctest::Approx(2.0 / 13.0).epsilon(1e-5));   // 0.15385
  CHECK(w(1) == doctest::Approx(22.0 / 13.0).epsilon(1e-5));  // 1.69231
}

TEST_CASE("dense visit weights match the spectral closed form") {
  for (int L : {1, 2, 3, 6})
    for (double alpha : {0.5, 0.999}) {
      const auto w = dsa::solve_w(reference_model(L), alpha);
      for (Eigen::Index x = 0; x < w.size(); ++x)
        CHECK(std::abs(w(x) - closed_form_w(static_cast<std::uint32_t>(x), L,
                                            reference_matrix(), alpha)) <= 1e-8);
    }
}

TEST_CASE("matrix-free visit weights match the spectral closed form") {
  // 13 channels exceeds the dense-solve cutoff, forcing the iterative path.
  const int L = 13;
  const double alpha = 0.9;
  const auto w = dsa::solve_w(reference_model(L), alpha);
  REQUIRE(w.size() == (Eigen::Index{1} << L));
  for (Eigen::Index x = 0; x < w.size(); x += 37)
    CHECK(std::abs(w(x) - closed_form_w(static_cast<std::uint32_t>(x), L,
                                        reference_matrix(), alpha)) <= 1e-8);
  // The all-occupied corner state carries the largest weight.
  for (Eigen::Index x = 0; x + 1 < w.size(); ++x) CHECK(w(x) < w(w.size() - 1));
}

TEST_CASE("visit-weight solves satisfy the linear system to the stated residual") {
  for (int L : {1, 3, 6})
    for (double alpha : {0.5, 0.999}) {
      const auto model = reference_model(L);
      const auto w = dsa::solve_w(model, alpha);
      const auto joint = dsa::joint_matrix(model);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(w.size());
      e(w.size() - 1) = 1.0;
      const double residual =
          (e - (w - alpha * (joint * w))).lpNorm<Eigen::Infinity>();
      CHECK(residual <= 1e-10);
    }
}

TEST_CASE("visit-weight solver rejects malformed inputs") {
  CHECK_THROWS_AS(dsa::solve_w(reference_model(1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dsa::solve_w(reference_model(1), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(dsa::solve_w(reference_model(17), 0.5), dsa::CapacityError);
  CHECK_THROWS_AS(dsa::solve_w(reference_model(0), 0.5), std::invalid_argument);
  Eigen::MatrixXd bad(3, 3);
  bad.setZero();
  CHECK_THROWS_AS(dsa::solve_w(bad, 0.5), std::invalid_argument);
  Eigen::MatrixXd rect(4, 2);
  rect.setZero();
  CHECK_THROWS_AS(dsa::solve_w(rect, 0.5), std::invalid_argument);
}

TEST_CASE("full-information continuation value: undiscounted corner cases") {
  const auto P = reference_matrix();
  const double kappa = 0.7;
  const auto w = dsa::solve_w(reference_model(2), 0.0);
  // With no discounting only the immediate slot counts: any state with a free
  // channel earns kappa * p00, the all-occupied state earns kappa * p10.
  for (std::uint32_t x : {0u, 1u, 2u})
    CHECK(dsa::j_tilde(x, w, kappa, 0.0, P) ==
          doctest::Approx(kappa * 0.9).epsilon(1e-12));
  CHECK(dsa::j_tilde(3u, w, kappa, 0.0, P) ==
        doctest::Approx(kappa * 0.2).epsilon(1e-12));
  CHECK_THROWS_AS(dsa::j_tilde(4u, w, kappa, 0.0, P), std::invalid_argument);
}

TEST_CASE("all-occupied is the worst state to start from") {
  for (double alpha : {0.5, 0.9, 0.999}) {
    const auto w = dsa::solve_w(reference_model(3), alpha);
    const auto P = reference_matrix();
    const double worst = dsa::j_tilde(7u, w, 1.0, alpha, P);
    for (std::uint32_t x = 0; x < 7; ++x)
      CHECK(dsa::j_tilde(x, w, 1.0, alpha, P) > worst);
  }
}

TEST_CASE("continuation value matches the value-iteration oracle") {
  const double alpha = 0.9;
  const double kappa = 0.7;
  for (int L : {1, 2, 3}) {
    const auto model = reference_model(L);
    const auto w = dsa::solve_w(model, alpha);
    const auto v = dsa::full_observation_value_oracle(model, alpha, kappa);
    REQUIRE(v.size() == (Eigen::Index{1} << L));
    for (Eigen::Index x = 0; x < v.size(); ++x)
      CHECK(std::abs(dsa::j_tilde(static_cast<std::uint32_t>(x), w, kappa, alpha,
                                  model.transition) -
                     v(x)) <= 1e-8);
  }
  CHECK_THROWS_AS(dsa::full_observation_value_oracle(reference_model(9), 0.9, 1.0),
                  dsa::CapacityError);
}

TEST_CASE("reward ceiling with no discounting is the first-slot reward") {
  const auto model = reference_model(2);
  const double eps = 0.3;
  // One slot, stationary prior: expected reward kappa * P(channel free).
  CHECK(dsa::upper_bound(model, 0.0, eps) ==
        doctest::Approx((1.0 - eps) * (2.0 / 3.0)).epsilon(1e-12));
  auto wide = reference_model(2);
  wide.bandwidth = 2.5;
  CHECK(dsa::upper_bound(wide, 0.0, eps) ==
        doctest::Approx(2.5 * (1.0 - eps) * (2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("reward ceiling matches a from-first-principles recomputation") {
  const auto model = reference_model(2);
  const auto P = model.transition;
  const double alpha = 0.999;
  const double theta5 = dsa::amplitude_from_snr_db(5.0, 1.0);
  const double eps = dsa::false_alarm(dsa::access_threshold(0.1, theta5, 1.0), 1.0);
  const double kappa = model.bandwidth * (1.0 - eps);
  const double p_star = dsa::stationary_occupancy(P);
  // Rebuild the bound from the spectral closed form for w.
  double continuation = 0.0;
  for (std::uint32_t x = 0; x < 4; ++x) {
    const double w_x = closed_form_w(x, 2, P, alpha);
    const double jt = kappa * (P.p00 / (1.0 - alpha) - (P.p00 - P.p10) * w_x);
    const int occ = std::popcount(x);
    const double prob = std::pow(p_star, occ) * std::pow(1.0 - p_star, 2 - occ);
    continuation += prob * jt;
  }
  const double expected = kappa * (1.0 - p_star) + alpha * continuation;
  CHECK(dsa::upper_bound(model, alpha, eps) ==
        doctest::Approx(expected).epsilon(1e-10));
  // Frozen sweep anchors for the two experiment operating points.
  CHECK(dsa::upper_bound(model, 0.999, eps) ==
        doctest::Approx(567.480436152).epsilon(1e-9));
  const double eps001 =
      dsa::false_alarm(dsa::access_threshold(0.01, theta5, 1.0), 1.0);
  CHECK(dsa::upper_bound(model, 0.999, eps001) ==
        doctest::Approx(239.897506062).epsilon(1e-9));
}

TEST_CASE("reward ceiling falls with false alarms and rises with patience") {
  const auto model = reference_model(2);
  double prev = 1e300;
  for (double eps : {0.0, 0.1, 0.3, 0.7, 1.0}) {
    const double ub = dsa::upper_bound(model, 0.999, eps);
    CHECK(ub < prev);
    CHECK(ub >= 0.0);
    prev = ub;
  }
  CHECK(dsa::upper_bound(model, 0.999, 1.0) == doctest::Approx(0.0).scale(1.0));
  double prev_alpha = -1.0;
  for (double alpha : {0.0, 0.5, 0.9, 0.99, 0.999}) {
    const double ub = dsa::upper_bound(model, alpha, 0.3);
    CHECK(ub > prev_alpha);
    prev_alpha = ub;
  }
  CHECK_THROWS_AS(dsa::upper_bound(model, 0.999, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(dsa::upper_bound(model, 0.999, 1.1), std::invalid_argument);
  auto bad = reference_model(2);
  bad.transition = {0.2, 0.8, 0.9, 0.1};  // anticorrelated occupancy
  CHECK_THROWS_AS(dsa::upper_bound(bad, 0.999, 0.1), std::invalid_argument);
}
