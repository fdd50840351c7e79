#include "dsa/bound.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dsa/errors.hpp"

namespace dsa {

namespace {

constexpr double kResidualTarget = 1e-10;
// Largest joint dimension for which the dense solve is preferable.
constexpr int kDenseSolveMaxChannels = 12;

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("discount factor must lie in [0, 1)");
}

// y = JointP * x for the L-fold product chain, applied factor by factor.
void joint_apply(const TransitionMatrix& P, int L, std::vector<double>& x) {
  for (int a = 0; a < L; ++a) {
    const std::size_t bit = std::size_t{1} << a;
    for (std::size_t base = 0; base < x.size(); ++base) {
      if (base & bit) continue;
      const double v0 = x[base];
      const double v1 = x[base | bit];
      x[base] = P.p00 * v0 + P.p01 * v1;
      x[base | bit] = P.p10 * v0 + P.p11 * v1;
    }
  }
}

double residual_inf_norm(const TransitionMatrix& P, int L, double alpha,
                         const std::vector<double>& w) {
  std::vector<double> pw = w;
  joint_apply(P, L, pw);
  double worst = 0.0;
  const std::size_t ones = w.size() - 1;
  for (std::size_t x = 0; x < w.size(); ++x) {
    const double e = x == ones ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(e - (w[x] - alpha * pw[x])));
  }
  return worst;
}

}  // namespace

Eigen::VectorXd solve_w(const JointTransitionMatrix& joint, double alpha) {
  require_alpha(alpha);
  const Eigen::Index n = joint.rows();
  if (n < 2 || joint.cols() != n || (n & (n - 1)) != 0)
    throw std::invalid_argument("joint matrix must be square with a power-of-two size");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(n - 1) = 1.0;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - alpha * joint;
  Eigen::VectorXd w = A.partialPivLu().solve(e);
  const double residual = (e - A * w).lpNorm<Eigen::Infinity>();
  if (!(residual <= kResidualTarget))
    throw SolverError("dense solve residual " + std::to_string(residual) +
                      " exceeds target");
  return w;
}

Eigen::VectorXd solve_w(const ChannelSetModel& model, double alpha) {
  require_alpha(alpha);
  const int L = model.num_channels;
  if (L < 1) throw std::invalid_argument("number of channels must be at least 1");
  if (L > kMaxJointChannels)
    throw CapacityError("joint chain supports at most " +
                        std::to_string(kMaxJointChannels) + " channels, got " +
                        std::to_string(L));
  if (L <= kDenseSolveMaxChannels) return solve_w(joint_matrix(model), alpha);

  // Richardson iteration w <- alpha * JointP * w + e; the residual contracts
  // by at least alpha per step because the chain is row stochastic.
  const TransitionMatrix& P = model.transition;
  const std::size_t n = std::size_t{1} << L;
  std::vector<double> w(n, 0.0);
  w[n - 1] = 1.0;
  const long long max_iters =
      alpha == 0.0 ? 1
                   : static_cast<long long>(std::log(kResidualTarget / 2.0) /
                                            std::log(alpha)) +
                         1000;
  for (long long it = 0; it < max_iters; ++it) {
    std::vector<double> next = w;
    joint_apply(P, L, next);
    for (std::size_t x = 0; x < n; ++x) next[x] *= alpha;
    next[n - 1] += 1.0;
    w.swap(next);
    if (it % 128 == 0 && residual_inf_norm(P, L, alpha, w) <= kResidualTarget / 2.0)
      break;
  }
  if (residual_inf_norm(P, L, alpha, w) > kResidualTarget)
    throw SolverError("iterative solve failed to reach the residual target");
  Eigen::VectorXd out(n);
  for (std::size_t x = 0; x < n; ++x) out(static_cast<Eigen::Index>(x)) = w[x];
  return out;
}

double j_tilde(std::uint32_t state_bits, const Eigen::VectorXd& w, double kappa,
               double alpha, const TransitionMatrix& P) {
  require_alpha(alpha);
  if (state_bits >= w.size())
    throw std::invalid_argument("joint state index out of range");
  return kappa * (P.p00 / (1.0 - alpha) - (P.p00 - P.p10) * w(state_bits));
}

double upper_bound(const ChannelSetModel& model, double alpha, double epsilon) {
  require_alpha(alpha);
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("false-alarm rate must lie in [0, 1]");
  const auto violations = validate(model);
  if (!violations.empty()) throw std::invalid_argument(violations.front());

  const double p_star = stationary_occupancy(model.transition);
  const double kappa = model.bandwidth * (1.0 - epsilon);
  const Eigen::VectorXd w = solve_w(model, alpha);
  const std::vector<double> q(model.num_channels, p_star);
  const std::vector<double> dist = joint_state_distribution(q);

  double continuation = 0.0;
  for (std::size_t x = 0; x < dist.size(); ++x)
    continuation += dist[x] * j_tilde(static_cast<std::uint32_t>(x), w, kappa, alpha,
                                      model.transition);
  return kappa * (1.0 - p_star) + alpha * continuation;
}

Eigen::VectorXd full_observation_value_oracle(const ChannelSetModel& model,
                                              double alpha, double kappa,
                                              double tol) {
  require_alpha(alpha);
  if (model.num_channels > 8)
    throw CapacityError("the value-iteration oracle supports at most 8 channels");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto violations = validate(model);
  if (!violations.empty()) throw std::invalid_argument(violations.front());

  const int L = model.num_channels;
  const Eigen::Index n = Eigen::Index{1} << L;
  const JointTransitionMatrix joint = joint_matrix(model);
  const TransitionMatrix& P = model.transition;

  // Transitions do not depend on the chosen channel, so the maximization sits
  // entirely in the immediate reward.
  Eigen::VectorXd reward(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double best = 0.0;
    for (int u = 0; u < L; ++u)
      best = std::max(best, kappa * P(static_cast<int>((x >> u) & 1), 0));
    reward(x) = best;
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  // Standard contraction bound: ||v_k - v*|| <= alpha / (1 - alpha) * ||dv||.
  const double stop = alpha == 0.0 ? tol : tol * (1.0 - alpha) / alpha;
  for (long long it = 0; it < 10'000'000; ++it) {
    Eigen::VectorXd next = reward + alpha * (joint * v);
    const double dv = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (dv <= stop) return v;
  }
  throw SolverError("value iteration failed to converge");
}

}  // namespace dsa
