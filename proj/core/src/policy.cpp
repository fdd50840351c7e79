#include "dsa/policy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dsa {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::GreedyObservation: return "obs";
    case PolicyKind::GreedyAck: return "ack";
    case PolicyKind::GreedyCombined: return "combined";
    case PolicyKind::Robust: return "robust";
    case PolicyKind::Learning: return "learning";
  }
  throw std::invalid_argument("unknown policy kind");
}

std::optional<PolicyKind> policy_from_token(std::string_view token) {
  if (token == "obs") return PolicyKind::GreedyObservation;
  if (token == "ack") return PolicyKind::GreedyAck;
  if (token == "combined") return PolicyKind::GreedyCombined;
  if (token == "robust") return PolicyKind::Robust;
  if (token == "learning") return PolicyKind::Learning;
  return std::nullopt;
}

std::string policy_token_list() { return "obs, ack, combined, robust, learning"; }

int greedy_select(std::span<const double> q) {
  if (q.empty()) throw std::invalid_argument("need at least one channel");
  int best = 0;
  for (int a = 1; a < static_cast<int>(q.size()); ++a)
    if (q[a] < q[best]) best = a;  // larger 1 - q means smaller q; ties keep lowest index
  return best;
}

bool access_known(double y, double tau) { return y < tau; }

bool access_worst_case(double y, std::span<const double> theta_set, double sigma,
                       double zeta) {
  const double tau_w = access_threshold(zeta, worst_case_theta(theta_set), sigma);
  return y < tau_w;
}

PartitionResult partition(std::span<const double> posterior,
                          std::span<const double> theta_set, double zeta,
                          double sigma) {
  PartitionResult res;
  partition(posterior, theta_set, zeta, sigma, res);
  return res;
}

void partition(std::span<const double> posterior, std::span<const double> theta_set,
               double zeta, double sigma, PartitionResult& out) {
  const std::size_t N = theta_set.size();
  if (N == 0) throw std::invalid_argument("the candidate amplitude set must be nonempty");
  if (posterior.size() != N)
    throw std::invalid_argument("posterior length must match the candidate set");
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("zeta must lie strictly inside (0, 1)");
  double mass = 0.0;
  for (double b : posterior) {
    if (!(b >= 0.0)) throw std::invalid_argument("posterior weights must be nonnegative");
    mass += b;
  }
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument("posterior weights must sum to 1");

  constexpr std::size_t kStackSlots = 64;
  int stack_order[kStackSlots];
  std::vector<int> heap_order;
  int* order = stack_order;
  if (N > kStackSlots) {
    heap_order.resize(N);
    order = heap_order.data();
  }
  std::iota(order, order + N, 0);
  std::sort(order, order + N, [&](int lhs, int rhs) {
    if (posterior[lhs] != posterior[rhs]) return posterior[lhs] < posterior[rhs];
    return theta_set[lhs] < theta_set[rhs];
  });

  double ignored_mass = 0.0;
  std::size_t cut = 0;
  while (cut < N - 1 && ignored_mass + posterior[order[cut]] < zeta) {
    ignored_mass += posterior[order[cut]];
    ++cut;
  }
  out.num_ignored = static_cast<int>(cut);
  assert(ignored_mass < zeta);

  out.theta_upper.clear();
  out.theta_upper.reserve(N - cut);
  for (std::size_t k = cut; k < N; ++k) out.theta_upper.push_back(theta_set[order[k]]);
  std::sort(out.theta_upper.begin(), out.theta_upper.end());
  out.theta_sharp = out.theta_upper.front();
  out.tau_r = access_threshold(zeta, out.theta_sharp, sigma);
  out.epsilon_a = false_alarm(out.tau_r, sigma);
}

bool access_learning(double y, const PartitionResult& part) { return y < part.tau_r; }

int learning_greedy_select(const JointBeliefArray& predicted,
                           std::span<const PartitionResult> parts) {
  const int L = predicted.num_channels();
  if (L < 1) throw std::invalid_argument("need at least one channel");
  if (parts.size() != static_cast<std::size_t>(L))
    throw std::invalid_argument("need one partition per channel");
  int best = 0;
  double best_score = -1.0;
  for (int a = 0; a < L; ++a) {
    const double score = free_marginal(predicted.channel(a)) * (1.0 - parts[a].epsilon_a);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

int modified_select(long long slot, long long C, std::span<const int> channel_order,
                    int fallback_choice) {
  const long long L = static_cast<long long>(channel_order.size());
  if (L < 1) throw std::invalid_argument("need at least one channel");
  if (C < 1) throw std::invalid_argument("the exploration period multiplier must be at least 1");
  if (slot < 0) throw std::invalid_argument("slot index must be nonnegative");
  for (long long ch = 0; ch < L; ++ch) {
    int hits = 0;
    for (int entry : channel_order) hits += entry == ch;
    if (hits != 1)
      throw std::invalid_argument("channel order must be a permutation of the channels");
  }
  const long long r = slot % (C * L);
  if (r < L) return channel_order[static_cast<std::size_t>(r)];
  if (fallback_choice < 0 || fallback_choice >= L)
    throw std::invalid_argument("fallback choice out of range");
  return fallback_choice;
}

}  // namespace dsa
