// Microbenchmarks for the hot paths: belief updates, the learning-scheme
// per-slot cycle, whole episodes, and the ceiling linear solves.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "dsa/belief.hpp"
#include "dsa/bound.hpp"
#include "dsa/markov.hpp"
#include "dsa/observation.hpp"
#include "dsa/policy.hpp"
#include "dsa/sim.hpp"

namespace {

dsa::TransitionMatrix reference_transition() { return {0.9, 0.1, 0.2, 0.8}; }

std::vector<double> six_level_grid() {
  std::vector<double> theta;
  for (double db : {-5.0, -3.0, -1.0, 1.0, 3.0, 5.0})
    theta.push_back(dsa::amplitude_from_snr_db(db, 1.0));
  return theta;
}

dsa::SimConfig episode_config(dsa::PolicyKind policy) {
  dsa::SimConfig c;
  c.model = {2, reference_transition(), 1.0};
  c.obs.sigma = 1.0;
  if (policy == dsa::PolicyKind::Learning) {
    c.obs.theta_set = six_level_grid();
    c.obs.prior.assign(6, 1.0 / 6.0);
    c.obs.true_theta_index = {5, 5};
    c.round_robin_C = 1;
  } else {
    c.obs.theta_set = {dsa::amplitude_from_snr_db(5.0, 1.0)};
    c.obs.prior = {1.0};
    c.obs.true_theta_index = {0, 0};
  }
  c.policy = policy;
  c.zeta = 0.01;
  c.alpha = 0.999;
  c.horizon = 1000;
  c.runs = 1;
  return c;
}

void ScalarBeliefUpdate(benchmark::State& state) {
  const dsa::TransitionMatrix P = reference_transition();
  const double theta = dsa::amplitude_from_snr_db(5.0, 1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 1.0);
  double p = dsa::stationary_occupancy(P);
  for (auto _ : state) {
    const double y = theta + noise(rng);
    p = dsa::update_known(dsa::predict(p, P), y, theta, 1.0);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(ScalarBeliefUpdate);

void LearningSlotCycle(benchmark::State& state) {
  const dsa::TransitionMatrix P = reference_transition();
  const std::vector<double> theta = six_level_grid();
  const double pstar = dsa::stationary_occupancy(P);
  std::vector<double> slab(12), predicted(12), posterior(6);
  for (int i = 0; i < 6; ++i) {
    slab[2 * i] = (1.0 / 6.0) * (1.0 - pstar);
    slab[2 * i + 1] = (1.0 / 6.0) * pstar;
  }
  dsa::PartitionResult part;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto _ : state) {
    dsa::theta_posterior(slab, posterior);
    dsa::partition(posterior, theta, 0.01, 1.0, part);
    dsa::joint_predict(slab, P, predicted);
    dsa::joint_update(predicted, theta[5] + noise(rng), theta, 1.0, slab);
    benchmark::DoNotOptimize(slab.data());
    benchmark::DoNotOptimize(part.tau_r);
  }
}
BENCHMARK(LearningSlotCycle);

void EpisodeKnownAmplitude(benchmark::State& state) {
  const dsa::SimConfig c = episode_config(dsa::PolicyKind::GreedyObservation);
  std::uint64_t index = 0;
  for (auto _ : state) {
    const dsa::EpisodeTrace t =
        dsa::run_episode(c, dsa::episode_seed(11, static_cast<long long>(index++)));
    benchmark::DoNotOptimize(t.discounted_reward);
  }
  state.SetItemsProcessed(state.iterations() * c.horizon);
}
BENCHMARK(EpisodeKnownAmplitude);

void EpisodeLearning(benchmark::State& state) {
  const dsa::SimConfig c = episode_config(dsa::PolicyKind::Learning);
  std::uint64_t index = 0;
  for (auto _ : state) {
    const dsa::EpisodeTrace t =
        dsa::run_episode(c, dsa::episode_seed(12, static_cast<long long>(index++)));
    benchmark::DoNotOptimize(t.discounted_reward);
  }
  state.SetItemsProcessed(state.iterations() * c.horizon);
}
BENCHMARK(EpisodeLearning);

void CeilingSolveDense(benchmark::State& state) {
  const dsa::ChannelSetModel model{8, reference_transition(), 1.0};
  const dsa::JointTransitionMatrix joint = dsa::joint_matrix(model);
  for (auto _ : state) {
    const Eigen::VectorXd w = dsa::solve_w(joint, 0.999);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(CeilingSolveDense);

void CeilingSolveMatrixFree(benchmark::State& state) {
  const dsa::ChannelSetModel model{13, reference_transition(), 1.0};
  for (auto _ : state) {
    const Eigen::VectorXd w = dsa::solve_w(model, 0.9);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(CeilingSolveMatrixFree);

}  // namespace

BENCHMARK_MAIN();
