#ifndef QKDPNS_EAVESDROP_HPP
#define QKDPNS_EAVESDROP_HPP

#include "qkdpns/photonics.hpp"
#include "qkdpns/protocol.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qkdpns {

/// Zero-QBER actions available to Eve on an n-photon pulse after a perfect
/// QND photon-number measurement.
struct EveAction {
  enum class Kind { Block, ForwardAllLossless, Store, Irud };

  Kind kind = Kind::Block;
  int kept = 0;  // photons kept in memory, Store only

  static constexpr EveAction block() { return {Kind::Block, 0}; }
  static constexpr EveAction forward() { return {Kind::ForwardAllLossless, 0}; }
  static constexpr EveAction store(int k) { return {Kind::Store, k}; }
  static constexpr EveAction irud() { return {Kind::Irud, 0}; }

  /// "block", "forward", "store<k>", "irud".
  std::string name() const;

  friend bool operator==(const EveAction&, const EveAction&) = default;
};

/// -p log2 p - (1-p) log2(1-p), with 0 log 0 = 0.
double binary_entropy(double p);

/// Information (bits) Eve extracts from k stored copies of one member of a
/// pair with overlap chi once the pair is announced:
/// 1 - H(P) with P = (1 + sqrt(1 - chi^{2k})) / 2.
double storage_info(int kept, double chi);

/// Equal-success USD probability on the four n-photon states
/// |+z>^n, |+x>^n, |-z>^n, |-x>^n; 0 when they are linearly dependent.
/// Both protocols send the same four states.
double irud_success(int photons, ProtocolKind protocol);

bool is_admissible(int photons, EveAction action, ProtocolKind protocol);
std::vector<EveAction> admissible_actions(int photons, ProtocolKind protocol);

/// Probability that Bob registers a detection when Eve applies `action` to
/// an n-photon pulse. Eve's line is lossless; her IRUD resend happens next
/// to Bob.
double delivered_detection_probability(int photons, EveAction action, double eta_det,
                                       ProtocolKind protocol);

/// Bits Eve learns per detection she induces. Throws std::invalid_argument
/// for Block (no detection) or inadmissible actions.
double eve_info_per_action(int photons, EveAction action, ProtocolKind protocol,
                           double chi);

/// Per-photon-number distribution over Eve's actions, rows n = 1..n_max.
class AttackPolicy {
 public:
  using Row = std::vector<std::pair<EveAction, double>>;

  /// Every row starts as Block with weight 1.
  explicit AttackPolicy(int n_max);

  int n_max() const { return static_cast<int>(rows_.size()); }
  const Row& row(int photons) const { return rows_.at(photons - 1); }

  /// Replaces the row for `photons`.
  void set_row(int photons, Row row);
  /// Sets a single action with weight 1.
  void set_pure(int photons, EveAction action) { set_row(photons, {{action, 1.0}}); }

  double weight(int photons, EveAction action) const;

  /// Throws std::invalid_argument unless every row is a probability vector
  /// (sum within 1e-9, entries >= 0) over admissible actions.
  void validate(ProtocolKind protocol) const;

 private:
  std::vector<Row> rows_;
};

/// Block one-photon pulses, keep one photon from every other pulse.
AttackPolicy pure_storage_policy(int n_max);
AttackPolicy all_forward_policy(int n_max);

/// sum_n p_n sum_a x_{n,a} d(n,a).
double bob_rate_under_policy(const AttackPolicy& policy, const ChannelParams& params,
                             ProtocolKind protocol);

/// sum_n p_n sum_a x_{n,a} d(n,a) I(n,a): Eve's bits per pulse.
double eve_information_rate(const AttackPolicy& policy, const ChannelParams& params,
                            ProtocolKind protocol);

/// One admissible action on an n-photon pulse.
struct AttackOption {
  EveAction action;
  double detection = 0.0;  // d(n, a)
  double info = 0.0;       // I(n, a); 0 for Block
};

/// maximize   sum_n w_n sum_a x_{n,a} d(n,a) I(n,a)
/// subject to sum_n w_n sum_a x_{n,a} d(n,a) = target_rate,
///            sum_a x_{n,a} = 1, x >= 0.
struct AttackLp {
  std::vector<double> weight;                     // w_n = p_n, index n - 1
  std::vector<std::vector<AttackOption>> options;  // index n - 1
  double target_rate = 0.0;

  int n_max() const { return static_cast<int>(weight.size()); }
};

/// Instance for photon numbers 1..params.n_max with target R_raw(delta_db).
AttackLp build_attack_lp(const ChannelParams& params, ProtocolKind protocol, double delta_db);

struct AttackLpSolution {
  double objective = 0.0;  // Eve's bits per pulse
  AttackPolicy policy{1};
  bool feasible = true;
};

/// Greedy merge of the per-n upper concave hulls of (w d, w d I), taken in
/// order of decreasing slope until the rate budget is spent.
AttackLpSolution solve_attack_lp(const AttackLp& lp);

struct CurvePoint {
  double delta_db = 0.0;
  /// Eve's bits per sifted key bit.
  double eve_info = 0.0;
  AttackPolicy policy{1};
  bool feasible = true;
  /// Action carrying the largest share of Bob's detections.
  EveAction dominant_action;
};

/// Best zero-QBER attack at attenuation `delta_db`: maximizes Eve's
/// information rate subject to Bob's detection rate equal to
/// raw_rate_exact. The feasible set is one equality plus a simplex per n,
/// so the optimum is a greedy merge of the per-n concave value/rate hulls.
CurvePoint optimize_policy(const ChannelParams& params, ProtocolKind protocol,
                           double delta_db);

/// optimize_policy at delta_min + i * step for every point <= delta_max.
std::vector<CurvePoint> sweep_eve_info(const ChannelParams& params, ProtocolKind protocol,
                                       double delta_min, double delta_max, double step);

enum class CriticalMethod { Bb84Storage, SargIrud, GenericEstimate };

std::string_view to_string(CriticalMethod method);

struct CriticalAttenuationReport {
  double delta_c_db = 0.0;
  double length_km = 0.0;
  CriticalMethod method = CriticalMethod::Bb84Storage;
  /// Same threshold under the other rate convention (approximate rates for
  /// BB84, exact R_raw for SARG and the generic estimate).
  double alternate_delta_db = 0.0;
};

/// Attenuation at which Bob's expected rate falls to `target_rate`.
/// Bisection on raw_rate_exact to 1e-7 dB; 0 if the target is above the
/// lossless rate, +inf if the target is <= 0.
double attenuation_for_rate(const ChannelParams& params, double target_rate);

/// R_raw(delta_c) = sum_{n>=2} p_n (1 - (1-eta_det)^{n-1}).
CriticalAttenuationReport critical_attenuation_bb84(const ChannelParams& params);

/// eta_{delta_c} mu = p_ok p_3(mu) with p_ok = irud_success(3).
CriticalAttenuationReport critical_attenuation_sarg(const ChannelParams& params);

/// R_raw(delta_c) = eta_det p_3(mu/(1-chi)) p_ok, Bob's rate taken at the
/// boosted mean mu/(1-chi).
CriticalAttenuationReport critical_attenuation_generic(double mu_bb84, double chi,
                                                       double p_ok,
                                                       const ChannelParams& params);

struct Delta1Report {
  double exact_db = 0.0;   // R_raw(delta) = bob rate of pure_storage_policy
  double approx_db = 0.0;  // eta_det eta_delta mu = eta_det p_2
};

/// Attenuation from which Eve can keep one photon of every multi-photon pulse.
Delta1Report delta_1(const ChannelParams& params);

}  // namespace qkdpns

#endif  // QKDPNS_EAVESDROP_HPP
