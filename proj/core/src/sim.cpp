#include "dsa/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dsa {

namespace {

// splitmix64 finalizer (Steele, Lea & Flood's SplittableRandom update).
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

long long effective_round_robin(const SimConfig& c) {
  return c.round_robin_C > 0 ? c.round_robin_C : c.horizon + 1;
}

std::vector<int> effective_order(const SimConfig& c) {
  if (!c.channel_order.empty()) return c.channel_order;
  std::vector<int> order(c.model.num_channels);
  for (int a = 0; a < c.model.num_channels; ++a) order[a] = a;
  return order;
}

struct EpisodeSummary {
  double discounted = 0;
  double expected_form = 0;
  long long occupied_sensed = 0;
  long long interfering = 0;
  long long underflows = 0;
  double final_mass = 0;
  std::vector<double> posterior_trace;
};

double wilson_z() { return 1.959963984540054; }

}  // namespace

std::vector<std::string> validate(const SimConfig& config) {
  std::vector<std::string> violations = validate(config.model);
  {
    auto obs = validate(config.obs, config.model.num_channels);
    violations.insert(violations.end(), obs.begin(), obs.end());
  }
  if (config.obs.true_theta_index.empty())
    violations.push_back("every channel needs a true amplitude index for simulation");
  if (!(config.zeta > 0.0 && config.zeta < 1.0))
    violations.push_back("zeta must lie strictly inside (0, 1)");
  if (!(config.alpha >= 0.0 && config.alpha < 1.0))
    violations.push_back("the discount factor must lie in [0, 1)");
  if (config.horizon < 1) violations.push_back("horizon must be at least 1");
  if (config.runs < 1) violations.push_back("runs must be at least 1");
  if (config.round_robin_C < 0)
    violations.push_back("the exploration period multiplier must be positive");
  if (!config.channel_order.empty()) {
    const int L = config.model.num_channels;
    if (config.channel_order.size() != static_cast<std::size_t>(L)) {
      violations.push_back("channel order must list every channel exactly once");
    } else {
      for (int ch = 0; ch < L; ++ch) {
        int hits = 0;
        for (int entry : config.channel_order) hits += entry == ch;
        if (hits != 1) {
          violations.push_back("channel order must be a permutation of the channels");
          break;
        }
      }
    }
  }
  if (config.threads < 0) violations.push_back("thread count must be nonnegative");
  return violations;
}

std::uint64_t episode_seed(std::uint64_t master_seed, long long index) {
  return mix64(master_seed + kGolden * static_cast<std::uint64_t>(index + 1));
}

EpisodeTrace run_episode(const SimConfig& config, std::uint64_t seed) {
  {
    auto violations = validate(config);
    if (!violations.empty()) throw std::invalid_argument(violations.front());
  }

  const int L = config.model.num_channels;
  const TransitionMatrix& P = config.model.transition;
  const double B = config.model.bandwidth;
  const double sigma = config.obs.sigma;
  const double zeta = config.zeta;
  const auto& theta_set = config.obs.theta_set;
  const long long C = effective_round_robin(config);
  const std::vector<int> order = effective_order(config);

  // Independent substreams for the exogenous channel process and for sensing
  // noise, so different policies see identical channel trajectories under a
  // common seed.
  std::mt19937_64 state_rng(mix64(seed + kGolden));
  std::mt19937_64 obs_rng(mix64(seed + 2 * kGolden));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const double p_star = stationary_occupancy(P);

  std::vector<int> states(L);
  for (int a = 0; a < L; ++a) states[a] = unif(state_rng) < p_star ? 1 : 0;

  // Amplitudes as seen by the transmitter (truth) and by the tracker.
  std::vector<double> theta_true(L);
  for (int a = 0; a < L; ++a) theta_true[a] = theta_set[config.obs.true_theta_index[a]];

  const bool learning = config.policy == PolicyKind::Learning;
  const bool robust = config.policy == PolicyKind::Robust;

  // Known-amplitude and robust policies carry scalar occupancy beliefs.
  BeliefState belief;
  std::vector<double> q(L, 0.0);
  std::vector<double> tau(L, 0.0);
  std::vector<double> eps(L, 0.0);
  double theta_star = 0.0;
  double tau_w = 0.0;
  double eps_w = 0.0;
  if (!learning) {
    belief = initial_belief(config.model);
    if (robust) {
      theta_star = worst_case_theta(theta_set);
      tau_w = access_threshold(zeta, theta_star, sigma);
      eps_w = false_alarm(tau_w, sigma);
    } else {
      for (int a = 0; a < L; ++a) {
        tau[a] = access_threshold(zeta, theta_true[a], sigma);
        eps[a] = false_alarm(tau[a], sigma);
      }
    }
  }

  // The learning policy carries joint (amplitude, occupancy) beliefs.
  JointBeliefArray Q, H;
  std::vector<PartitionResult> parts;
  std::vector<double> posterior_buf;
  if (learning) {
    Q = initial_joint_belief(config.model, config.obs);
    H = JointBeliefArray(L, static_cast<int>(theta_set.size()));
    parts.resize(L);
    posterior_buf.resize(theta_set.size());
  }

  BeliefDiagnostics diag;
  EpisodeTrace trace;
  trace.slots.resize(static_cast<std::size_t>(config.horizon));
  if (config.trace_posterior && learning)
    trace.posterior_mass_on_truth.resize(static_cast<std::size_t>(config.horizon) + 1);
  // Amplitude-posterior mass on the true hypothesis, averaged over channels.
  // Index k holds the mass entering slot k, so index 0 is the prior and the
  // last entry reflects every update of the episode.
  const auto record_mass = [&](long long idx) {
    double mass = 0.0;
    for (int a = 0; a < L; ++a) {
      const auto slab = Q.channel(a);
      const int truth = config.obs.true_theta_index[a];
      mass += slab[truth * 2] + slab[truth * 2 + 1];
    }
    trace.posterior_mass_on_truth[static_cast<std::size_t>(idx)] = mass / L;
  };
  if (config.trace_beliefs)
    trace.belief_snapshots.resize(static_cast<std::size_t>(config.horizon));

  double alpha_pow = 1.0;
  for (long long k = 0; k < config.horizon; ++k) {
    if (config.trace_posterior && learning) record_mass(k);
    // Channel choice from last slot's statistics.
    int u;
    if (learning) {
      for (int a = 0; a < L; ++a) {
        theta_posterior(Q.channel(a), posterior_buf);
        partition(posterior_buf, theta_set, zeta, sigma, parts[a]);
        joint_predict(Q.channel(a), P, H.channel(a));
      }
      const int fallback = learning_greedy_select(H, parts);
      u = modified_select(k, C, order, fallback);
    } else {
      for (int a = 0; a < L; ++a) q[a] = predict(belief.p[a], P);
      u = greedy_select(q);
    }

    // The channels evolve regardless of the decision.
    for (int a = 0; a < L; ++a) {
      const double to_occupied = states[a] == 1 ? P.p11 : P.p01;
      states[a] = unif(state_rng) < to_occupied ? 1 : 0;
    }

    const double y = sample(states[u], theta_true[u], sigma, obs_rng);

    bool accessed;
    double eps_u;
    if (learning) {
      accessed = access_learning(y, parts[u]);
      eps_u = parts[u].epsilon_a;
    } else if (robust) {
      accessed = access_known(y, tau_w);
      eps_u = eps_w;
    } else {
      accessed = access_known(y, tau[u]);
      eps_u = eps[u];
    }

    const bool ack = accessed && states[u] == 0;
    const double r_hat = ack ? B : 0.0;
    trace.discounted_reward += alpha_pow * r_hat;
    trace.discounted_reward_expected_form +=
        alpha_pow * B * (1.0 - eps_u) * (states[u] == 0 ? 1.0 : 0.0);

    if (states[u] == 1) {
      ++trace.occupied_sensed;
      if (accessed) ++trace.interfering_accesses;
    }

    // Belief updates: the sensed channel sees the policy's information, the
    // rest propagate one step.
    if (learning) {
      joint_update(H.channel(u), y, theta_set, sigma, Q.channel(u), &diag);
      for (int a = 0; a < L; ++a) {
        if (a == u) continue;
        auto h = H.channel(a);
        auto dst = Q.channel(a);
        std::copy(h.begin(), h.end(), dst.begin());
      }
    } else {
      const AckEvent event{accessed, ack};
      switch (config.policy) {
        case PolicyKind::GreedyObservation:
          belief.p[u] = update_known(q[u], y, theta_true[u], sigma, &diag);
          break;
        case PolicyKind::GreedyAck:
          belief.p[u] = update_ack(q[u], event, zeta, eps[u], config.use_no_access_info);
          break;
        case PolicyKind::GreedyCombined:
          belief.p[u] = update_combined(q[u], y, event, theta_true[u], sigma, &diag);
          break;
        case PolicyKind::Robust:
          belief.p[u] = update_known(q[u], y, theta_star, sigma, &diag);
          break;
        case PolicyKind::Learning:
          break;
      }
      for (int a = 0; a < L; ++a)
        if (a != u) belief.p[a] = q[a];
    }

    SlotRecord& rec = trace.slots[static_cast<std::size_t>(k)];
    rec.sensed = static_cast<std::int16_t>(u);
    std::uint32_t bits = 0;
    for (int a = 0; a < L; ++a) bits |= static_cast<std::uint32_t>(states[a]) << a;
    rec.state_bits = bits;
    rec.accessed = accessed ? 1 : 0;
    rec.ack = ack ? 1 : 0;
    rec.y = y;
    rec.reward = r_hat;

    if (config.trace_beliefs) {
      auto& snap = trace.belief_snapshots[static_cast<std::size_t>(k)];
      snap.resize(L);
      for (int a = 0; a < L; ++a)
        snap[a] = learning ? occupancy_marginal(Q.channel(a)) : belief.p[a];
    }

    alpha_pow *= config.alpha;
  }
  if (config.trace_posterior && learning) record_mass(config.horizon);

  trace.underflow_fallbacks = diag.underflow_fallbacks;
  return trace;
}

double replay_discounted_reward(const EpisodeTrace& trace, double bandwidth,
                                double alpha) {
  double total = 0.0;
  double alpha_pow = 1.0;
  for (const SlotRecord& rec : trace.slots) {
    const bool free_channel = ((rec.state_bits >> rec.sensed) & 1u) == 0;
    const double r_hat = (rec.accessed && free_channel) ? bandwidth : 0.0;
    total += alpha_pow * r_hat;
    alpha_pow *= alpha;
  }
  return total;
}

InterferenceEstimate interference_estimate(long long occupied_sensed,
                                           long long accesses) {
  if (occupied_sensed < 0 || accesses < 0 || accesses > occupied_sensed)
    throw std::invalid_argument("inconsistent interference counts");
  InterferenceEstimate est;
  est.occupied_sensed = occupied_sensed;
  est.accesses = accesses;
  if (occupied_sensed == 0) return est;  // insufficient events: rate undefined
  est.sufficient = true;
  const double n = static_cast<double>(occupied_sensed);
  const double p_hat = static_cast<double>(accesses) / n;
  const double z = wilson_z();
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
  est.rate = p_hat;
  est.ci_lo = std::max(0.0, center - half);
  est.ci_hi = std::min(1.0, center + half);
  // The Wilson bounds are exactly 0 / 1 at the boundary counts; keep them
  // free of roundoff dust.
  if (accesses == 0) est.ci_lo = 0.0;
  if (accesses == occupied_sensed) est.ci_hi = 1.0;
  return est;
}

InterferenceEstimate interference_estimate(std::span<const EpisodeTrace> traces) {
  long long occupied = 0;
  long long accesses = 0;
  for (const EpisodeTrace& t : traces) {
    occupied += t.occupied_sensed;
    accesses += t.interfering_accesses;
  }
  return interference_estimate(occupied, accesses);
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

SimResult run_monte_carlo(const SimConfig& config) {
  {
    auto violations = validate(config);
    if (!violations.empty()) throw std::invalid_argument(violations.front());
  }
  const long long runs = config.runs;
  std::vector<EpisodeSummary> summaries(static_cast<std::size_t>(runs));

  unsigned thread_count = config.threads > 0
                              ? static_cast<unsigned>(config.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  thread_count = static_cast<unsigned>(
      std::min<long long>(runs, static_cast<long long>(thread_count)));

  const bool want_trace = config.trace_posterior &&
                          config.policy == PolicyKind::Learning;

  std::atomic<long long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long long i = next.fetch_add(1);
      if (i >= runs) return;
      EpisodeTrace t = run_episode(config, episode_seed(config.master_seed, i));
      EpisodeSummary& s = summaries[static_cast<std::size_t>(i)];
      s.discounted = t.discounted_reward;
      s.expected_form = t.discounted_reward_expected_form;
      s.occupied_sensed = t.occupied_sensed;
      s.interfering = t.interfering_accesses;
      s.underflows = t.underflow_fallbacks;
      if (want_trace) {
        s.posterior_trace = std::move(t.posterior_mass_on_truth);
        s.final_mass = s.posterior_trace.empty() ? 0.0 : s.posterior_trace.back();
      }
    }
  };

  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SimResult result;
  result.runs = runs;
  result.horizon = config.horizon;

  std::vector<double> rewards(static_cast<std::size_t>(runs));
  std::vector<double> expected(static_cast<std::size_t>(runs));
  long long occupied = 0;
  long long interfering = 0;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    rewards[i] = summaries[i].discounted;
    expected[i] = summaries[i].expected_form;
    occupied += summaries[i].occupied_sensed;
    interfering += summaries[i].interfering;
    result.underflow_fallbacks += summaries[i].underflows;
  }
  result.mean_discounted_reward = pairwise_sum(rewards) / static_cast<double>(runs);
  result.mean_discounted_reward_expected_form =
      pairwise_sum(expected) / static_cast<double>(runs);
  if (runs > 1) {
    std::vector<double> sq(static_cast<std::size_t>(runs));
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      const double d = rewards[i] - result.mean_discounted_reward;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(runs - 1);
    result.std_err = std::sqrt(var / static_cast<double>(runs));
  }
  result.interference = interference_estimate(occupied, interfering);

  if (want_trace) {
    // One point per slot boundary: index 0 is the prior, the last index the
    // fully updated posterior.
    const std::size_t points = static_cast<std::size_t>(config.horizon) + 1;
    result.posterior_mean.resize(points);
    result.posterior_q05.resize(points);
    result.posterior_q95.resize(points);
    result.final_mass_per_run.resize(static_cast<std::size_t>(runs));
    std::vector<double> column(static_cast<std::size_t>(runs));
    for (std::size_t i = 0; i < summaries.size(); ++i)
      result.final_mass_per_run[i] = summaries[i].final_mass;
    for (std::size_t k = 0; k < points; ++k) {
      for (std::size_t i = 0; i < summaries.size(); ++i)
        column[i] = summaries[i].posterior_trace[k];
      result.posterior_mean[k] = pairwise_sum(column) / static_cast<double>(runs);
      std::vector<double> sorted = column;
      std::sort(sorted.begin(), sorted.end());
      const auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(sorted.size() - 1);
        const std::size_t idx = static_cast<std::size_t>(std::llround(pos));
        return sorted[idx];
      };
      result.posterior_q05[k] = quantile(0.05);
      result.posterior_q95[k] = quantile(0.95);
    }
  }
  return result;
}

}  // namespace dsa
