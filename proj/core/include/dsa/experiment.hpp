#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsa/config.hpp"
#include "dsa/sim.hpp"

namespace dsa {

/// One output row of an experiment sweep.  Optional fields render as empty
/// CSV cells when a quantity is not applicable (e.g. no upper bound for
/// set-based policies, no interference rate when no occupied slot was ever
/// sensed).
struct ResultRow {
  std::string policy;
  double snr_db = 0;
  double zeta = 0;
  std::optional<double> mean_discounted_reward;
  std::optional<double> std_err;
  std::optional<double> interference_rate;
  std::optional<double> interference_ci_lo;
  std::optional<double> interference_ci_hi;
  std::optional<double> upper_bound;
  long long runs = 0;
  long long horizon = 0;
  std::uint64_t seed = 0;
};

/// One row of a posterior-convergence trace.  Slot k reports the mass on the
/// true hypothesis entering slot k, so slot 0 is the prior and the final row
/// (slot == horizon) reflects every update.
struct TraceRow {
  long long slot = 0;
  double mean_mass_on_truth = 0;
  double q05 = 0;
  double q95 = 0;
};

inline constexpr const char* kResultCsvHeader =
    "policy,snr_db,zeta,mean_discounted_reward,std_err,interference_rate,"
    "interference_ci_lo,interference_ci_hi,upper_bound,runs,horizon,seed";
inline constexpr const char* kTraceCsvHeader = "slot,mean_mass_on_truth,q05,q95";

/// Expands one sweep cell into a runnable simulation configuration.  Known
/// signal-level policies get a singleton candidate set at the swept level;
/// the robust and learning policies get the configured candidate set with the
/// swept level as ground truth.
SimConfig make_sim_config(const ExperimentSpec& spec, PolicyKind policy,
                          double zeta, double snr_db, int threads);

/// Runs every (policy, zeta, snr_db) cell and returns one row per cell, in
/// the order the axes appear in the configuration.
std::vector<ResultRow> cmd_simulate(const ExperimentSpec& spec, int threads);

/// Computes the full-observation upper bound for every (zeta, snr_db) cell
/// without running simulations; rows carry policy name "bound".
std::vector<ResultRow> cmd_bound(const ExperimentSpec& spec);

/// Runs the learning policy and reports the per-slot posterior mass on the
/// true hypothesis (mean and 5%/95% quantiles across runs).  Requires the
/// learning policy and an unambiguous truth: true_theta_db, or a single
/// snr_db entry.
std::vector<TraceRow> cmd_trace(const ExperimentSpec& spec, int threads);

/// CSV renderings (header + one line per row, '\n' separators, trailing
/// newline, shortest round-trip number formatting).
std::string result_csv(const std::vector<ResultRow>& rows);
std::string trace_csv(const std::vector<TraceRow>& rows);

/// Writes `content` to `path` atomically (temp file + rename), or to stdout
/// when path is "-".  IO failures throw std::runtime_error naming the path.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace dsa
