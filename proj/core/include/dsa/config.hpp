#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsa/markov.hpp"
#include "dsa/policy.hpp"

namespace dsa {

/// A parsed experiment description: the channel/observation model plus the
/// sweep axes (signal level, interference budget, policy).  Every
/// (policy, zeta, snr_db) combination expands to one simulation cell.
struct ExperimentSpec {
  int channels = 0;
  double bandwidth = 1.0;
  TransitionMatrix transition{};
  double alpha = 0.999;
  std::vector<double> zeta_list;
  double sigma = 1.0;
  std::vector<double> snr_db_list;
  /// Candidate signal levels (dB) for the robust and learning policies.
  std::vector<double> theta_db_set;
  /// Prior over theta_db_set entries; empty when theta_db_set is empty.
  std::vector<double> prior;
  /// Truth override for posterior traces; must be a member of theta_db_set.
  std::optional<double> true_theta_db;
  std::vector<PolicyKind> policies;
  long long horizon = 10000;
  long long runs = 500;
  std::uint64_t seed = 0;
  /// Forced-exploration period parameter; 0 means "horizon + 1" downstream.
  long long round_robin_C = 0;
  /// Whether the ACK-only tracker also learns from slots it chose not to
  /// access.
  bool g2_use_no_access_info = true;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Parses the flat key=value format (one key per line, `#` comments).
/// Unknown keys, duplicate keys, malformed values, and invariant violations
/// throw ConfigError naming the key and line.  Non-fatal notices (e.g. a
/// missing seed defaulting to 0) are appended to `warnings`.
ExperimentSpec parse_config_text(std::string_view text,
                                 std::vector<std::string>* warnings = nullptr);

/// Reads and parses a config file; throws ConfigError if unreadable.
ExperimentSpec parse_config(const std::string& path,
                            std::vector<std::string>* warnings = nullptr);

/// Serializes a spec in canonical key order with shortest round-trip number
/// formatting, such that parse_config_text(emit_config(s)) == s.
std::string emit_config(const ExperimentSpec& spec);

/// Shortest decimal representation that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace dsa
