#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dsa/belief.hpp"
#include "dsa/markov.hpp"
#include "dsa/observation.hpp"
#include "oracles.hpp"

namespace {

dsa::TransitionMatrix reference_matrix() { return {0.9, 0.1, 0.2, 0.8}; }

dsa::ChannelSetModel reference_model(int channels) {
  dsa::ChannelSetModel m;
  m.num_channels = channels;
  m.transition = reference_matrix();
  m.bandwidth = 1.0;
  return m;
}

std::vector<double> experiment_amplitudes() {
  std::vector<double> theta;
  for (double db : {-5.0, -3.0, -1.0, 1.0, 3.0, 5.0})
    theta.push_back(dsa::amplitude_from_snr_db(db, 1.0));
  return theta;
}

}  // namespace

TEST_CASE("initial belief puts every channel at the stationary occupancy") {
  const auto b = dsa::initial_belief(reference_model(4));
  REQUIRE(b.p.size() == 4);
  for (double p : b.p) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(dsa::initial_belief(reference_model(0)), std::invalid_argument);
}

TEST_CASE("sample update: frozen values, fixed points, monotonicity") {
  // Equal likelihoods at the midpoint leave the belief unchanged.
  CHECK(dsa::update_known(0.5, 0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  // Posterior odds = prior odds * exp(llr): 1 / (1 + e^{1/2}) at y = 0.
  CHECK(dsa::update_known(0.5, 0.0, 1.0, 1.0) ==
        doctest::Approx(0.377540668798145435361099434254).epsilon(1e-12));
  // Certainty is absorbing.
  CHECK(dsa::update_known(0.0, 3.0, 1.0, 1.0) == 0.0);
  CHECK(dsa::update_known(1.0, -3.0, 1.0, 1.0) == 1.0);
  // Strictly increasing in the sample.
  double prev = dsa::update_known(0.3, -5.0, 1.0, 1.0);
  for (double y = -4.5; y <= 5.0; y += 0.5) {
    const double cur = dsa::update_known(0.3, y, 1.0, 1.0);
    CHECK(cur > prev);
    prev = cur;
  }
  // Log-space evaluation keeps extreme samples finite and saturating.
  const double hi = dsa::update_known(0.5, 1e6, 1.0, 1.0);
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
  const double lo = dsa::update_known(0.5, -1e6, 1.0, 1.0);
  CHECK(lo == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(std::isfinite(hi));
  CHECK(std::isfinite(lo));
  CHECK_THROWS_AS(dsa::update_known(-0.1, 0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dsa::update_known(1.1, 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("sample update survives a non-finite sample via the fallback path") {
  dsa::BeliefDiagnostics diag;
  const double q = 0.42;
  CHECK(dsa::update_known(q, std::numeric_limits<double>::quiet_NaN(), 1.0, 1.0,
                          &diag) == q);
  CHECK(dsa::update_known(q, std::numeric_limits<double>::infinity(), 1.0, 1.0,
                          &diag) == q);
  CHECK(diag.underflow_fallbacks == 2);
}

TEST_CASE("unsensed propagation is the one-step prediction") {
  const auto P = reference_matrix();
  CHECK(dsa::propagate_unsensed(1.0, P) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(dsa::propagate_unsensed(0.0, P) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(dsa::propagate_unsensed(1.0 / 3.0, P) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  for (double p : {0.0, 0.2, 0.5, 0.9, 1.0})
    CHECK(dsa::propagate_unsensed(p, P) == doctest::Approx(dsa::predict(p, P)));
}

TEST_CASE("acknowledgement update resolves accessed slots exactly") {
  const double eps = 0.708;
  CHECK(dsa::update_ack(0.7, {true, true}, 0.01, eps) == 0.0);
  CHECK(dsa::update_ack(0.2, {true, false}, 0.01, eps) == 1.0);
}

TEST_CASE("acknowledgement update exploits the decision not to access") {
  const double q = 1.0 / 3.0;
  const double zeta = 0.01;
  // With the rounded false-alarm rate 0.708 the posterior lands on the
  // frozen reference value.
  CHECK(dsa::update_ack(q, {false, false}, zeta, 0.708) ==
        doctest::Approx(0.411471321695760598503740648379).epsilon(1e-12));
  // With the exactly computed false-alarm rate the closed form must match.
  const double theta5 = dsa::amplitude_from_snr_db(5.0, 1.0);
  const double eps = dsa::false_alarm(dsa::access_threshold(zeta, theta5, 1.0), 1.0);
  const double expected = q * (1.0 - zeta) / (q * (1.0 - zeta) + (1.0 - q) * eps);
  CHECK(dsa::update_ack(q, {false, false}, zeta, eps) ==
        doctest::Approx(expected).epsilon(1e-14));
  // Not accessing means the sample looked busy, so occupancy belief rises.
  CHECK(dsa::update_ack(q, {false, false}, zeta, eps) > q);
  // Discarding the no-access information leaves the prediction unchanged.
  CHECK(dsa::update_ack(q, {false, false}, zeta, eps, false) == q);
  CHECK_THROWS_AS(dsa::update_ack(q, {false, true}, zeta, eps),
                  std::invalid_argument);
  CHECK_THROWS_AS(dsa::update_ack(q, {false, false}, 0.0, eps),
                  std::invalid_argument);
  CHECK_THROWS_AS(dsa::update_ack(q, {false, false}, zeta, 1.0),
                  std::invalid_argument);
}

TEST_CASE("combined update: ACK when accessed, sample otherwise") {
  CHECK(dsa::update_combined(0.6, 2.0, {true, true}, 1.0, 1.0) == 0.0);
  CHECK(dsa::update_combined(0.6, -2.0, {true, false}, 1.0, 1.0) == 1.0);
  CHECK(dsa::update_combined(0.5, 0.0, {false, false}, 1.0, 1.0) ==
        doctest::Approx(dsa::update_known(0.5, 0.0, 1.0, 1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(dsa::update_combined(0.5, 0.0, {false, true}, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("initial joint belief is prior times stationary occupancy") {
  dsa::ObservationModel obs;
  obs.sigma = 1.0;
  obs.theta_set = experiment_amplitudes();
  const auto q = dsa::initial_joint_belief(reference_model(2), obs);
  REQUIRE(q.num_channels() == 2);
  REQUIRE(q.num_candidates() == 6);
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 6; ++i) {
      CHECK(q.at(a, i, 0) == doctest::Approx((1.0 / 6.0) * (2.0 / 3.0)).epsilon(1e-14));
      CHECK(q.at(a, i, 1) == doctest::Approx((1.0 / 6.0) * (1.0 / 3.0)).epsilon(1e-14));
    }
  // An explicit prior is honored.
  obs.prior = {0.5, 0.1, 0.1, 0.1, 0.1, 0.1};
  const auto q2 = dsa::initial_joint_belief(reference_model(1), obs);
  CHECK(q2.at(0, 0, 1) == doctest::Approx(0.5 / 3.0).epsilon(1e-14));
  const auto b = dsa::theta_posterior(q2.channel(0));
  CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("joint prediction copies transition rows and preserves the amplitude marginal") {
  const auto P = reference_matrix();
  // All mass on (candidate 1, occupied): the predicted slab is row 1 of P.
  std::vector<double> slab = {0, 0, 0, 1, 0, 0};
  std::vector<double> h(slab.size());
  dsa::joint_predict(slab, P, h);
  CHECK(h[2] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(h[3] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(h[0] == 0.0);
  CHECK(h[5] == 0.0);

  std::vector<double> slab2 = {0, 0, 0, 0, 1, 0};  // (candidate 2, free)
  dsa::joint_predict(slab2, P, h);
  CHECK(h[4] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(h[5] == doctest::Approx(0.1).epsilon(1e-15));

  // Random slab: prediction moves occupancy mass but never amplitude mass.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r(8);
  double total = 0.0;
  for (double& v : r) total += (v = u(rng));
  for (double& v : r) v /= total;
  std::vector<double> hr(r.size());
  dsa::joint_predict(r, P, hr);
  std::vector<double> before(4), after(4);
  dsa::theta_posterior(r, before);
  dsa::theta_posterior(hr, after);
  for (int i = 0; i < 4; ++i)
    CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-14));

  // The stationary slab is a fixed point.
  std::vector<double> stat = {0.25 * 2 / 3.0, 0.25 / 3.0, 0.75 * 2 / 3.0, 0.75 / 3.0};
  std::vector<double> hstat(stat.size());
  dsa::joint_predict(stat, P, hstat);
  for (std::size_t k = 0; k < stat.size(); ++k)
    CHECK(hstat[k] == doctest::Approx(stat[k]).epsilon(1e-14));

  CHECK_THROWS_AS(dsa::joint_predict(std::vector<double>{0.5, 0.5, 0.0}, P, h),
                  std::invalid_argument);
}

TEST_CASE("joint measurement update reduces to the scalar update for one candidate") {
  const double q = 0.41;
  const std::vector<double> theta = {1.3};
  for (double y : {-2.0, -0.3, 0.0, 0.9, 3.1}) {
    std::vector<double> h = {1.0 - q, q};
    std::vector<double> out(2);
    dsa::joint_update(h, y, theta, 1.0, out);
    CHECK(out[1] == doctest::Approx(dsa::update_known(q, y, theta[0], 1.0)).epsilon(1e-13));
    CHECK(out[0] + out[1] == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("joint measurement update concentrates mass where the sample points") {
  const auto theta = experiment_amplitudes();
  std::vector<double> h(theta.size() * 2, 1.0 / (theta.size() * 2.0));
  std::vector<double> out(h.size());
  dsa::joint_update(h, 10.0, theta, 1.0, out);
  double total = 0.0;
  for (double v : out) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  // A ten-sigma sample screams "occupied, strongest candidate".
  CHECK(dsa::occupancy_marginal(out) > 0.9999);
  std::size_t best = 0;
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (out[i * 2 + 1] > out[best * 2 + 1]) best = i;
  CHECK(best == theta.size() - 1);

  // A strongly negative sample screams "free".  Twenty sigma below zero the
  // smallest candidate's occupied likelihood is already e^-11 of the free
  // one, so the free marginal saturates.
  dsa::joint_update(h, -20.0, theta, 1.0, out);
  CHECK(dsa::free_marginal(out) > 0.9999);
}

TEST_CASE("joint measurement update falls back gracefully on a bad sample") {
  const std::vector<double> theta = {1.0, 2.0};
  const std::vector<double> h = {0.1, 0.2, 0.3, 0.4};
  std::vector<double> out(4);
  dsa::BeliefDiagnostics diag;
  dsa::joint_update(h, std::numeric_limits<double>::quiet_NaN(), theta, 1.0, out,
                    &diag);
  for (std::size_t k = 0; k < 4; ++k) CHECK(out[k] == h[k]);
  CHECK(diag.underflow_fallbacks == 1);
  // An all-zero slab cannot be normalized; it is passed through and counted.
  const std::vector<double> zero = {0.0, 0.0, 0.0, 0.0};
  dsa::joint_update(zero, 0.5, theta, 1.0, out, &diag);
  CHECK(diag.underflow_fallbacks == 2);
}

TEST_CASE("amplitude posterior and state marginals decompose the slab") {
  // Slab for two candidates: rows (free, occupied).
  const std::vector<double> slab = {0.30, 0.15, 0.35, 0.20};
  const auto b = dsa::theta_posterior(slab);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(dsa::free_marginal(slab) == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(dsa::occupancy_marginal(slab) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(dsa::free_marginal(slab) + dsa::occupancy_marginal(slab) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // The allocation-free variant writes the same numbers.
  std::vector<double> out(2);
  dsa::theta_posterior(slab, out);
  CHECK(out[0] == b[0]);
  CHECK(out[1] == b[1]);
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(dsa::theta_posterior(slab, wrong), std::invalid_argument);

  // Stationary initial slab: free marginal 2/3.
  dsa::ObservationModel obs;
  obs.theta_set = experiment_amplitudes();
  const auto q = dsa::initial_joint_belief(reference_model(1), obs);
  CHECK(dsa::free_marginal(q.channel(0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(dsa::occupancy_marginal(q.channel(0)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("scalar filter matches the brute-force forward filter") {
  const auto P = reference_matrix();
  const double theta = 1.0;
  const double sigma = 1.0;
  std::mt19937_64 rng(314159);
  for (int traj = 0; traj < 10; ++traj) {
    const int T = 100;
    std::vector<double> y(T);
    std::vector<unsigned char> sensed(T, 1);
    int state = std::bernoulli_distribution(1.0 / 3.0)(rng) ? 1 : 0;
    for (int k = 0; k < T; ++k) {
      const double stay = state == 0 ? P.p00 : P.p10;
      state = std::bernoulli_distribution(1.0 - stay)(rng) ? 1 : 0;
      y[k] = dsa::sample(state, theta, sigma, rng);
      // Leave a few slots unsensed to exercise pure propagation.
      if (k % 7 == 3) sensed[k] = 0;
    }
    const auto ref = oracle::hmm_forward_occupancy(P, 1.0 / 3.0, y, sensed, theta, sigma);
    double p = 1.0 / 3.0;
    for (int k = 0; k < T; ++k) {
      const double q = dsa::predict(p, P);
      p = sensed[k] ? dsa::update_known(q, y[k], theta, sigma) : q;
      CHECK(std::abs(p - ref[k]) <= 1e-10);
    }
  }
}

TEST_CASE("joint filter matches the brute-force product-chain filter") {
  const auto P = reference_matrix();
  const auto theta = experiment_amplitudes();
  const double sigma = 1.0;
  const std::vector<double> prior(theta.size(), 1.0 / theta.size());
  std::mt19937_64 rng(271828);
  for (int traj = 0; traj < 5; ++traj) {
    const int T = 60;
    std::vector<double> y(T);
    std::vector<unsigned char> sensed(T);
    int state = 0;
    const double true_theta = theta[5];
    for (int k = 0; k < T; ++k) {
      const double stay = state == 0 ? P.p00 : P.p10;
      state = std::bernoulli_distribution(1.0 - stay)(rng) ? 1 : 0;
      sensed[k] = (k % 3 != 1) ? 1 : 0;
      y[k] = dsa::sample(state, true_theta, sigma, rng);
    }
    const auto ref =
        oracle::joint_forward(P, prior, 1.0 / 3.0, y, sensed, theta, sigma);
    // Run the library's slab recursion.
    std::vector<double> slab(theta.size() * 2);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      slab[i * 2] = prior[i] * (2.0 / 3.0);
      slab[i * 2 + 1] = prior[i] * (1.0 / 3.0);
    }
    std::vector<double> h(slab.size());
    for (int k = 0; k < T; ++k) {
      dsa::joint_predict(slab, P, h);
      if (sensed[k])
        dsa::joint_update(h, y[k], theta, sigma, slab);
      else
        std::copy(h.begin(), h.end(), slab.begin());
      for (std::size_t idx = 0; idx < slab.size(); ++idx)
        CHECK(std::abs(slab[idx] - ref[k * slab.size() + idx]) <= 1e-9);
    }
  }
}

TEST_CASE("worst-case-tuned updates from a stronger signal dominate stochastically") {
  // Design the update around the weakest candidate but feed it samples from a
  // stronger primary.  The resulting occupancy beliefs must be stochastically
  // at least as large as the design-point law predicts; the one-sided KS
  // statistic against that law stays below the 1% critical value.
  const double theta_star = dsa::amplitude_from_snr_db(-5.0, 1.0);
  const double gamma = dsa::amplitude_from_snr_db(5.0, 1.0);
  const double sigma = 1.0;
  const double q0 = 1.0 / 3.0;
  const std::size_t n = 20000;
  std::mt19937_64 rng(5551202);
  std::vector<double> beliefs(n);
  for (std::size_t i = 0; i < n; ++i)
    beliefs[i] = dsa::update_known(q0, dsa::sample(1, gamma, sigma, rng), theta_star, sigma);
  // CDF of the belief when the sample really follows the design point:
  // invert the update in y (it is strictly increasing) and evaluate the
  // occupied-sample law at the preimage.
  const auto design_cdf = [&](double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double odds = (u / (1.0 - u)) * ((1.0 - q0) / q0);
    const double s2 = sigma * sigma;
    const double y = (std::log(odds) + theta_star * theta_star / (2.0 * s2)) * s2 /
                     theta_star;
    return oracle::norm_cdf((y - theta_star) / sigma);
  };
  const double dplus = oracle::ks_dplus(beliefs, design_cdf);
  CHECK(dplus <= oracle::ks_dplus_critical(n, 0.01));
}
