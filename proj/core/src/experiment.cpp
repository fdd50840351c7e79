#include "dsa/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "dsa/bound.hpp"
#include "dsa/errors.hpp"
#include "dsa/observation.hpp"

namespace dsa {
namespace {

bool is_set_based(PolicyKind policy) {
  return policy == PolicyKind::Robust || policy == PolicyKind::Learning;
}

double cell_false_alarm(const ExperimentSpec& spec, double zeta, double snr_db) {
  const double theta = amplitude_from_snr_db(snr_db, spec.sigma);
  const double tau = access_threshold(zeta, theta, spec.sigma);
  return false_alarm(tau, spec.sigma);
}

void append_cell(std::string& out, const std::optional<double>& value) {
  out += ',';
  if (value) out += format_double(*value);
}

}  // namespace

SimConfig make_sim_config(const ExperimentSpec& spec, PolicyKind policy,
                          double zeta, double snr_db, int threads) {
  SimConfig config;
  config.model.num_channels = spec.channels;
  config.model.transition = spec.transition;
  config.model.bandwidth = spec.bandwidth;
  config.obs.sigma = spec.sigma;

  if (is_set_based(policy)) {
    // The candidate amplitudes must be strictly increasing; sort the dB grid
    // and carry the prior along, then locate the swept level as ground truth.
    std::vector<std::size_t> order(spec.theta_db_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return spec.theta_db_set[a] < spec.theta_db_set[b];
    });
    int true_index = -1;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      const double db = spec.theta_db_set[order[rank]];
      config.obs.theta_set.push_back(amplitude_from_snr_db(db, spec.sigma));
      config.obs.prior.push_back(spec.prior[order[rank]]);
      if (std::abs(db - snr_db) <= 1e-9) true_index = static_cast<int>(rank);
    }
    if (true_index < 0)
      throw ConfigError("snr_db value " + format_double(snr_db) +
                        " is not in theta_db_set");
    config.obs.true_theta_index.assign(static_cast<std::size_t>(spec.channels),
                                       true_index);
  } else {
    config.obs.theta_set = {amplitude_from_snr_db(snr_db, spec.sigma)};
    config.obs.prior = {1.0};
    config.obs.true_theta_index.assign(static_cast<std::size_t>(spec.channels), 0);
  }

  config.policy = policy;
  config.zeta = zeta;
  config.alpha = spec.alpha;
  config.horizon = spec.horizon;
  config.runs = spec.runs;
  config.master_seed = spec.seed;
  config.round_robin_C = spec.round_robin_C;
  config.use_no_access_info = spec.g2_use_no_access_info;
  config.threads = threads;
  return config;
}

std::vector<ResultRow> cmd_simulate(const ExperimentSpec& spec, int threads) {
  std::vector<ResultRow> rows;
  rows.reserve(spec.policies.size() * spec.zeta_list.size() *
               spec.snr_db_list.size());
  for (PolicyKind policy : spec.policies) {
    for (double zeta : spec.zeta_list) {
      for (double snr_db : spec.snr_db_list) {
        const SimConfig config = make_sim_config(spec, policy, zeta, snr_db, threads);
        const SimResult result = run_monte_carlo(config);

        ResultRow row;
        row.policy = to_string(policy);
        row.snr_db = snr_db;
        row.zeta = zeta;
        row.mean_discounted_reward = result.mean_discounted_reward;
        row.std_err = result.std_err;
        if (result.interference.sufficient) {
          row.interference_rate = result.interference.rate;
          row.interference_ci_lo = result.interference.ci_lo;
          row.interference_ci_hi = result.interference.ci_hi;
        }
        // The full-observation bound applies to policies that know the signal
        // level exactly; it also needs the joint chain to fit in memory.
        if (!is_set_based(policy) && spec.channels <= kMaxJointChannels) {
          row.upper_bound = upper_bound(config.model, spec.alpha,
                                        cell_false_alarm(spec, zeta, snr_db));
        }
        row.runs = result.runs;
        row.horizon = result.horizon;
        row.seed = spec.seed;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<ResultRow> cmd_bound(const ExperimentSpec& spec) {
  std::vector<ResultRow> rows;
  rows.reserve(spec.zeta_list.size() * spec.snr_db_list.size());
  ChannelSetModel model{spec.channels, spec.transition, spec.bandwidth};
  for (double zeta : spec.zeta_list) {
    for (double snr_db : spec.snr_db_list) {
      ResultRow row;
      row.policy = "bound";
      row.snr_db = snr_db;
      row.zeta = zeta;
      row.upper_bound =
          upper_bound(model, spec.alpha, cell_false_alarm(spec, zeta, snr_db));
      row.runs = 0;
      row.horizon = spec.horizon;
      row.seed = spec.seed;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<TraceRow> cmd_trace(const ExperimentSpec& spec, int threads) {
  bool has_learning = false;
  for (PolicyKind policy : spec.policies)
    has_learning = has_learning || policy == PolicyKind::Learning;
  if (!has_learning)
    throw ConfigError("trace requires the 'learning' policy in 'policy'");
  if (spec.zeta_list.size() != 1)
    throw ConfigError("trace requires a single 'zeta' value");

  double truth_db = 0;
  if (spec.true_theta_db) {
    truth_db = *spec.true_theta_db;
  } else if (spec.snr_db_list.size() == 1) {
    truth_db = spec.snr_db_list.front();
  } else {
    throw ConfigError(
        "trace requires 'true_theta_db' or a single 'snr_db' value");
  }

  SimConfig config = make_sim_config(spec, PolicyKind::Learning,
                                     spec.zeta_list.front(), truth_db, threads);
  config.trace_posterior = true;
  const SimResult result = run_monte_carlo(config);

  std::vector<TraceRow> rows(result.posterior_mean.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].slot = static_cast<long long>(k);
    rows[k].mean_mass_on_truth = result.posterior_mean[k];
    rows[k].q05 = result.posterior_q05[k];
    rows[k].q95 = result.posterior_q95[k];
  }
  return rows;
}

std::string result_csv(const std::vector<ResultRow>& rows) {
  std::string out = kResultCsvHeader;
  out += '\n';
  for (const ResultRow& row : rows) {
    out += row.policy;
    out += ',';
    out += format_double(row.snr_db);
    out += ',';
    out += format_double(row.zeta);
    append_cell(out, row.mean_discounted_reward);
    append_cell(out, row.std_err);
    append_cell(out, row.interference_rate);
    append_cell(out, row.interference_ci_lo);
    append_cell(out, row.interference_ci_hi);
    append_cell(out, row.upper_bound);
    out += ',';
    out += std::to_string(row.runs);
    out += ',';
    out += std::to_string(row.horizon);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const TraceRow& row : rows) {
    out += std::to_string(row.slot);
    out += ',';
    out += format_double(row.mean_mass_on_truth);
    out += ',';
    out += format_double(row.q05);
    out += ',';
    out += format_double(row.q95);
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("failed writing to stdout");
    return;
  }
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + temp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(temp.c_str());
      throw std::runtime_error("failed writing '" + temp + "'");
    }
  }
  if (std::rename(temp.c_str(), path.c_str()) != 0) {
    std::remove(temp.c_str());
    throw std::runtime_error("cannot rename '" + temp + "' to '" + path + "'");
  }
}

}  // namespace dsa
