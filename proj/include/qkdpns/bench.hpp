#ifndef QKDPNS_BENCH_HPP
#define QKDPNS_BENCH_HPP

#include "qkdpns/eavesdrop.hpp"
#include "qkdpns/photonics.hpp"
#include "qkdpns/protocol.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qkdpns::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Malformed document, unknown key, wrong value type, or I/O failure.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed but out-of-range configuration.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double mu_bb84 = 0.1;
  double mu_sarg = 0.2;
  /// Overrides the mean photon number of `protocol` when set.
  std::optional<double> mu;
  double eta_det = 0.1;
  double alpha_db_per_km = kTypicalAlphaDbPerKm;
  double delta_db = 0.0;
  double chi = 1.0 / std::numbers::sqrt2;
  int n_max = kDefaultPoissonCutoff;
  ProtocolKind protocol = ProtocolKind::BB84;
  std::uint64_t pulses = 1'000'000;
  std::uint64_t seed = 1;
  double delta_min_db = 0.0;
  double delta_max_db = 30.0;
  double delta_step_db = 0.5;
  /// Empty means standard output.
  std::string out;
  /// Fiber length of the 67 km experiment reported by `critical`.
  double scenario_length_km = 67.0;

  double mu_for(ProtocolKind kind) const;
  ChannelParams channel(ProtocolKind kind) const;

  /// Throws ValidationError.
  void validate() const;
};

/// Names accepted in a config document or by --set.
const std::vector<std::string>& config_keys();

/// Applies a flat JSON object on top of `base`. Throws ConfigError.
RunConfig parse_config(std::string_view document, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// "key=value"; value is read as JSON when it parses, else as a string.
void apply_override(RunConfig& config, std::string_view assignment);

int cmd_rates(const RunConfig& config, std::ostream& out);
int cmd_critical(const RunConfig& config, std::ostream& out);
/// CSV goes to config.out (or `out` when empty); progress notes to `out`.
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_session(const RunConfig& config, std::ostream& out);
int cmd_povm_verify(const RunConfig& config, std::ostream& out);

/// Header `delta_db,protocol,eve_info,dominant_action`, one row per
/// (delta, protocol), 6 decimals, newline after every row.
void write_sweep_csv(std::ostream& out, const RunConfig& config);

}  // namespace qkdpns::bench

#endif  // QKDPNS_BENCH_HPP
