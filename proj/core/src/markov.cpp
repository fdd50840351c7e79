#include "dsa/markov.hpp"

#include <cmath>
#include <stdexcept>

#include "dsa/errors.hpp"

namespace dsa {

namespace {

constexpr double kRowSumTol = 1e-12;

bool row_ok(double a, double b) {
  return a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0 &&
         std::abs(a + b - 1.0) <= kRowSumTol;
}

void require_valid(const TransitionMatrix& P) {
  if (!row_ok(P.p00, P.p01) || !row_ok(P.p10, P.p11))
    throw std::invalid_argument("transition matrix rows must be stochastic");
  if (!(P.p00 > 0.0 && P.p00 < 1.0 && P.p11 > 0.0 && P.p11 < 1.0))
    throw std::invalid_argument("transition matrix must satisfy 0 < p00, p11 < 1");
}

}  // namespace

std::vector<std::string> validate(const ChannelSetModel& model) {
  std::vector<std::string> violations;
  const TransitionMatrix& P = model.transition;
  if (!row_ok(P.p00, P.p01))
    violations.push_back("row 0 of the transition matrix is not stochastic");
  if (!row_ok(P.p10, P.p11))
    violations.push_back("row 1 of the transition matrix is not stochastic");
  if (!(P.p00 > 0.0 && P.p00 < 1.0))
    violations.push_back("p00 must lie strictly inside (0, 1)");
  if (!(P.p11 > 0.0 && P.p11 < 1.0))
    violations.push_back("p11 must lie strictly inside (0, 1)");
  if (row_ok(P.p00, P.p01) && row_ok(P.p10, P.p11) && !(P.p00 > P.p10))
    violations.push_back("p00 must exceed p10 (staying free must be likelier than freeing up)");
  if (model.num_channels < 1)
    violations.push_back("number of channels must be at least 1");
  if (!(model.bandwidth > 0.0) || !std::isfinite(model.bandwidth))
    violations.push_back("bandwidth must be a positive finite number");
  return violations;
}

double stationary_occupancy(const TransitionMatrix& P) {
  require_valid(P);
  return P.p01 / (P.p01 + P.p10);
}

double predict(double p, const TransitionMatrix& P) {
  require_valid(P);
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("occupancy probability must lie in [0, 1]");
  return P.p11 * p + P.p01 * (1.0 - p);
}

JointTransitionMatrix joint_matrix(const ChannelSetModel& model) {
  if (model.num_channels < 1)
    throw std::invalid_argument("number of channels must be at least 1");
  if (model.num_channels > kMaxJointChannels)
    throw CapacityError("joint chain supports at most " +
                        std::to_string(kMaxJointChannels) + " channels, got " +
                        std::to_string(model.num_channels));
  require_valid(model.transition);
  const int L = model.num_channels;
  const std::int64_t n = std::int64_t{1} << L;
  JointTransitionMatrix M(n, n);
  const TransitionMatrix& P = model.transition;
  for (std::int64_t x = 0; x < n; ++x) {
    for (std::int64_t y = 0; y < n; ++y) {
      double prob = 1.0;
      for (int a = 0; a < L; ++a)
        prob *= P(static_cast<int>((x >> a) & 1), static_cast<int>((y >> a) & 1));
      M(x, y) = prob;
    }
  }
  return M;
}

std::vector<double> joint_state_distribution(std::span<const double> q) {
  const int L = static_cast<int>(q.size());
  if (L < 1) throw std::invalid_argument("need at least one channel probability");
  if (L > kMaxJointChannels)
    throw CapacityError("joint distribution supports at most " +
                        std::to_string(kMaxJointChannels) + " channels");
  for (double v : q)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("occupancy probabilities must lie in [0, 1]");
  const std::size_t n = std::size_t{1} << L;
  std::vector<double> dist(n);
  for (std::size_t x = 0; x < n; ++x) {
    double prob = 1.0;
    for (int a = 0; a < L; ++a) prob *= ((x >> a) & 1) ? q[a] : 1.0 - q[a];
    dist[x] = prob;
  }
  return dist;
}

}  // namespace dsa
