#include "dsa/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsa {

namespace {

void require_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

BeliefState initial_belief(const ChannelSetModel& model) {
  if (model.num_channels < 1)
    throw std::invalid_argument("number of channels must be at least 1");
  BeliefState b;
  b.p.assign(model.num_channels, stationary_occupancy(model.transition));
  return b;
}

double update_known(double q, double y, double theta, double sigma,
                    BeliefDiagnostics* diag) {
  require_prob(q, "predicted occupancy");
  if (!std::isfinite(y)) {
    if (diag) ++diag->underflow_fallbacks;
    return q;
  }
  if (q == 0.0 || q == 1.0) return q;
  const double l1 = std::log(q) + log_normal_pdf(y, theta, sigma);
  const double l0 = std::log1p(-q) + log_normal_pdf(y, 0.0, sigma);
  const double m = std::max(l1, l0);
  const double w1 = std::exp(l1 - m);
  const double w0 = std::exp(l0 - m);
  return w1 / (w1 + w0);
}

double propagate_unsensed(double p_prev, const TransitionMatrix& P) {
  return predict(p_prev, P);
}

double update_ack(double q, const AckEvent& event, double zeta, double epsilon,
                  bool use_no_access_info) {
  require_prob(q, "predicted occupancy");
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("zeta must lie strictly inside (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie strictly inside (0, 1)");
  if (event.ack_received && !event.accessed)
    throw std::invalid_argument("an ACK cannot arrive without an access");
  if (event.accessed) return event.ack_received ? 0.0 : 1.0;
  if (!use_no_access_info) return q;
  const double num = q * (1.0 - zeta);
  const double den = num + (1.0 - q) * epsilon;
  return num / den;
}

double update_combined(double q, double y, const AckEvent& event, double theta,
                       double sigma, BeliefDiagnostics* diag) {
  require_prob(q, "predicted occupancy");
  if (event.ack_received && !event.accessed)
    throw std::invalid_argument("an ACK cannot arrive without an access");
  if (event.accessed) return event.ack_received ? 0.0 : 1.0;
  return update_known(q, y, theta, sigma, diag);
}

JointBeliefArray::JointBeliefArray(int num_channels, int num_candidates)
    : L_(num_channels), N_(num_candidates) {
  if (num_channels < 1) throw std::invalid_argument("number of channels must be at least 1");
  if (num_candidates < 1) throw std::invalid_argument("need at least one candidate amplitude");
  data_.assign(static_cast<std::size_t>(L_) * N_ * 2, 0.0);
}

std::span<double> JointBeliefArray::channel(int a) {
  return std::span<double>(data_).subspan(static_cast<std::size_t>(a) * N_ * 2,
                                          static_cast<std::size_t>(N_) * 2);
}

std::span<const double> JointBeliefArray::channel(int a) const {
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(a) * N_ * 2,
                                                static_cast<std::size_t>(N_) * 2);
}

JointBeliefArray initial_joint_belief(const ChannelSetModel& model,
                                      const ObservationModel& obs) {
  const int N = static_cast<int>(obs.theta_set.size());
  JointBeliefArray q(model.num_channels, N);
  const double p_star = stationary_occupancy(model.transition);
  std::vector<double> prior = obs.prior;
  if (prior.empty()) prior.assign(N, 1.0 / N);
  if (prior.size() != static_cast<std::size_t>(N))
    throw std::invalid_argument("prior length must match the candidate set");
  for (int a = 0; a < model.num_channels; ++a)
    for (int i = 0; i < N; ++i) {
      q.at(a, i, 0) = prior[i] * (1.0 - p_star);
      q.at(a, i, 1) = prior[i] * p_star;
    }
  return q;
}

void joint_predict(std::span<const double> q_channel, const TransitionMatrix& P,
                   std::span<double> h_channel) {
  if (q_channel.size() != h_channel.size() || q_channel.size() % 2 != 0)
    throw std::invalid_argument("slab sizes must match and be even");
  const std::size_t N = q_channel.size() / 2;
  for (std::size_t i = 0; i < N; ++i) {
    const double free = q_channel[i * 2];
    const double busy = q_channel[i * 2 + 1];
    h_channel[i * 2] = free * P.p00 + busy * P.p10;
    h_channel[i * 2 + 1] = free * P.p01 + busy * P.p11;
  }
}

void joint_update(std::span<const double> h_channel, double y,
                  std::span<const double> theta_set, double sigma,
                  std::span<double> q_channel, BeliefDiagnostics* diag) {
  const std::size_t N = theta_set.size();
  if (h_channel.size() != N * 2 || q_channel.size() != N * 2)
    throw std::invalid_argument("slab size must be twice the candidate count");
  if (!std::isfinite(y)) {
    std::copy(h_channel.begin(), h_channel.end(), q_channel.begin());
    if (diag) ++diag->underflow_fallbacks;
    return;
  }
  const double lf0 = log_normal_pdf(y, 0.0, sigma);
  double m = -std::numeric_limits<double>::infinity();
  // First pass in log space to find the normalizing peak.  A stack buffer
  // covers every realistic candidate-set size.
  constexpr std::size_t kStackSlots = 128;
  double stack_logs[kStackSlots];
  std::vector<double> heap_logs;
  double* logs = stack_logs;
  if (N * 2 > kStackSlots) {
    heap_logs.resize(N * 2);
    logs = heap_logs.data();
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double h0 = h_channel[i * 2];
    const double h1 = h_channel[i * 2 + 1];
    logs[i * 2] = h0 > 0.0 ? std::log(h0) + lf0 : -std::numeric_limits<double>::infinity();
    logs[i * 2 + 1] = h1 > 0.0
                          ? std::log(h1) + log_normal_pdf(y, theta_set[i], sigma)
                          : -std::numeric_limits<double>::infinity();
    m = std::max({m, logs[i * 2], logs[i * 2 + 1]});
  }
  if (!std::isfinite(m)) {
    std::copy(h_channel.begin(), h_channel.end(), q_channel.begin());
    if (diag) ++diag->underflow_fallbacks;
    return;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < N * 2; ++k) {
    q_channel[k] = std::exp(logs[k] - m);
    total += q_channel[k];
  }
  for (std::size_t k = 0; k < N * 2; ++k) q_channel[k] /= total;
}

std::vector<double> theta_posterior(std::span<const double> channel_slab) {
  if (channel_slab.size() % 2 != 0)
    throw std::invalid_argument("slab size must be even");
  std::vector<double> b(channel_slab.size() / 2);
  theta_posterior(channel_slab, b);
  return b;
}

void theta_posterior(std::span<const double> channel_slab, std::span<double> out) {
  if (channel_slab.size() % 2 != 0 || out.size() * 2 != channel_slab.size())
    throw std::invalid_argument("slab size must be twice the output size");
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = channel_slab[i * 2] + channel_slab[i * 2 + 1];
}

double free_marginal(std::span<const double> channel_slab) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < channel_slab.size(); i += 2) sum += channel_slab[i];
  return sum;
}

double occupancy_marginal(std::span<const double> channel_slab) {
  double sum = 0.0;
  for (std::size_t i = 1; i < channel_slab.size(); i += 2) sum += channel_slab[i];
  return sum;
}

}  // namespace dsa
