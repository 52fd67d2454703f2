#include "qkdpns/eavesdrop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace qkdpns {

namespace {

// Order used for the four multi-photon states: +z, +x, -z, -x.
constexpr std::array<StateLabel, 4> kUsdOrder = {StateLabel::PlusZ, StateLabel::PlusX,
                                                 StateLabel::MinusZ, StateLabel::MinusX};

double usd_success_dense(int photons) {
  std::vector<StateVector> states;
  states.reserve(kUsdOrder.size());
  for (const auto label : kUsdOrder) states.push_back(tensor_power(qubit_state(label), photons));
  try {
    return build_usd_povm(states).p_ok;
  } catch (const LinearDependenceError&) {
    return 0.0;
  }
}

// <a^n|b^n> = <a|b>^n, so the Gram matrix of large product states needs
// only the single-photon overlaps.
double usd_success_from_overlaps(int photons) {
  Eigen::MatrixXcd gram(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      gram(i, j) = std::pow(overlap(qubit_state(kUsdOrder[i]), qubit_state(kUsdOrder[j])),
                            photons);
  const double lambda_min = hermitian_eigenvalues(gram).minCoeff();
  return lambda_min > kGramSingularThreshold ? lambda_min : 0.0;
}

}  // namespace

std::string EveAction::name() const {
  switch (kind) {
    case Kind::Block: return "block";
    case Kind::ForwardAllLossless: return "forward";
    case Kind::Store: return "store" + std::to_string(kept);
    case Kind::Irud: return "irud";
  }
  return "?";
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy needs p in [0, 1]");
  auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return term(p) + term(1.0 - p);
}

double storage_info(int kept, double chi) {
  if (kept < 1) throw std::invalid_argument("storage_info needs k >= 1");
  if (!(chi >= 0.0 && chi < 1.0)) throw std::invalid_argument("storage_info needs chi in [0, 1)");
  const double helstrom = 0.5 * (1.0 + std::sqrt(1.0 - std::pow(chi, 2.0 * kept)));
  return 1.0 - binary_entropy(helstrom);
}

double irud_success(int photons, ProtocolKind /*protocol*/) {
  if (photons < 1) throw std::invalid_argument("irud_success needs n >= 1");
  static const std::array<double, kMaxQubits + 1> dense = [] {
    std::array<double, kMaxQubits + 1> table{};
    for (int n = 1; n <= kMaxQubits; ++n) table[n] = usd_success_dense(n);
    return table;
  }();
  if (photons <= kMaxQubits) return dense[photons];
  return usd_success_from_overlaps(photons);
}

bool is_admissible(int photons, EveAction action, ProtocolKind protocol) {
  if (photons < 1) return false;
  switch (action.kind) {
    case EveAction::Kind::Block:
    case EveAction::Kind::ForwardAllLossless:
      return true;
    case EveAction::Kind::Store:
      return action.kept >= 1 && action.kept <= photons - 1;
    case EveAction::Kind::Irud:
      return irud_success(photons, protocol) > 0.0;
  }
  return false;
}

std::vector<EveAction> admissible_actions(int photons, ProtocolKind protocol) {
  std::vector<EveAction> actions = {EveAction::block(), EveAction::forward()};
  for (int k = 1; k <= photons - 1; ++k) actions.push_back(EveAction::store(k));
  if (is_admissible(photons, EveAction::irud(), protocol)) actions.push_back(EveAction::irud());
  return actions;
}

double delivered_detection_probability(int photons, EveAction action, double eta_det,
                                       ProtocolKind protocol) {
  if (!is_admissible(photons, action, protocol))
    throw std::invalid_argument("inadmissible action " + action.name() + " for n = " +
                                std::to_string(photons));
  switch (action.kind) {
    case EveAction::Kind::Block: return 0.0;
    case EveAction::Kind::ForwardAllLossless: return detection_probability(photons, eta_det);
    case EveAction::Kind::Store: return detection_probability(photons - action.kept, eta_det);
    case EveAction::Kind::Irud: return irud_success(photons, protocol) * eta_det;
  }
  return 0.0;
}

double eve_info_per_action(int photons, EveAction action, ProtocolKind protocol, double chi) {
  if (!is_admissible(photons, action, protocol))
    throw std::invalid_argument("inadmissible action " + action.name() + " for n = " +
                                std::to_string(photons));
  switch (action.kind) {
    case EveAction::Kind::Block:
      throw std::invalid_argument("Block induces no detection; information undefined");
    case EveAction::Kind::ForwardAllLossless: return 0.0;
    case EveAction::Kind::Store:
      // After a basis announcement the stored photons are in one of two
      // orthogonal states.
      return protocol == ProtocolKind::BB84 ? 1.0 : storage_info(action.kept, chi);
    case EveAction::Kind::Irud: return 1.0;
  }
  return 0.0;
}

AttackPolicy::AttackPolicy(int n_max) {
  if (n_max < 1) throw std::invalid_argument("AttackPolicy needs n_max >= 1");
  rows_.assign(static_cast<std::size_t>(n_max), Row{{EveAction::block(), 1.0}});
}

void AttackPolicy::set_row(int photons, Row row) { rows_.at(photons - 1) = std::move(row); }

double AttackPolicy::weight(int photons, EveAction action) const {
  double w = 0.0;
  for (const auto& [a, x] : row(photons))
    if (a == action) w += x;
  return w;
}

void AttackPolicy::validate(ProtocolKind protocol) const {
  for (int n = 1; n <= n_max(); ++n) {
    double sum = 0.0;
    for (const auto& [action, x] : row(n)) {
      if (!(x >= 0.0)) throw std::invalid_argument("negative policy weight at n = " + std::to_string(n));
      if (!is_admissible(n, action, protocol))
        throw std::invalid_argument("inadmissible action " + action.name() + " at n = " +
                                    std::to_string(n));
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("policy row n = " + std::to_string(n) + " sums to " +
                                  std::to_string(sum));
  }
}

AttackPolicy pure_storage_policy(int n_max) {
  AttackPolicy policy(n_max);
  for (int n = 2; n <= n_max; ++n) policy.set_pure(n, EveAction::store(1));
  return policy;
}

AttackPolicy all_forward_policy(int n_max) {
  AttackPolicy policy(n_max);
  for (int n = 1; n <= n_max; ++n) policy.set_pure(n, EveAction::forward());
  return policy;
}

double bob_rate_under_policy(const AttackPolicy& policy, const ChannelParams& params,
                             ProtocolKind protocol) {
  double rate = 0.0;
  for (int n = 1; n <= policy.n_max(); ++n) {
    const double p_n = poisson_pmf(params.mu, n);
    for (const auto& [action, x] : policy.row(n))
      rate += p_n * x * delivered_detection_probability(n, action, params.eta_det, protocol);
  }
  return rate;
}

double eve_information_rate(const AttackPolicy& policy, const ChannelParams& params,
                            ProtocolKind protocol) {
  double info = 0.0;
  for (int n = 1; n <= policy.n_max(); ++n) {
    const double p_n = poisson_pmf(params.mu, n);
    for (const auto& [action, x] : policy.row(n)) {
      if (action.kind == EveAction::Kind::Block || x == 0.0) continue;
      info += p_n * x * delivered_detection_probability(n, action, params.eta_det, protocol) *
              eve_info_per_action(n, action, protocol, params.chi);
    }
  }
  return info;
}

AttackLp build_attack_lp(const ChannelParams& params, ProtocolKind protocol, double delta_db) {
  const ChannelParams at = params.at_delta(delta_db);
  if (at.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  AttackLp lp;
  for (int n = 1; n <= at.n_max; ++n) {
    lp.weight.push_back(poisson_pmf(at.mu, n));
    std::vector<AttackOption> options;
    for (const auto action : admissible_actions(n, protocol)) {
      const double d = delivered_detection_probability(n, action, at.eta_det, protocol);
      const double info = action.kind == EveAction::Kind::Block
                              ? 0.0
                              : eve_info_per_action(n, action, protocol, at.chi);
      options.push_back({action, d, info});
    }
    lp.options.push_back(std::move(options));
  }
  lp.target_rate = raw_rate_exact(at);
  return lp;
}

namespace {

struct HullVertex {
  EveAction action;
  double rate;   // w_n d(n, a)
  double value;  // w_n d(n, a) I(n, a)
};

// Upper concave hull of one photon number's (rate, value) points, running
// from the zero-rate point to the max-rate action.
std::vector<HullVertex> value_hull(double weight, const std::vector<AttackOption>& options) {
  std::vector<HullVertex> points;
  for (const auto& o : options) points.push_back({o.action, weight * o.detection, weight * o.detection * o.info});
  // Highest value first among equal rates so the hull keeps the best one.
  std::stable_sort(points.begin(), points.end(), [](const HullVertex& a, const HullVertex& b) {
    if (a.rate != b.rate) return a.rate < b.rate;
    return a.value > b.value;
  });

  std::vector<HullVertex> hull;
  for (const auto& p : points) {
    if (!hull.empty() && p.rate == hull.back().rate) continue;
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.rate - a.rate) * (p.value - a.value) -
                           (b.value - a.value) * (p.rate - a.rate);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  return hull;
}

struct Segment {
  int photons;
  std::size_t from;  // hull vertex index
  double d_rate;
  double d_value;
  double slope() const { return d_value / d_rate; }
};

}  // namespace

AttackLpSolution solve_attack_lp(const AttackLp& lp) {
  const int n_max = lp.n_max();
  if (n_max < 1 || lp.options.size() != lp.weight.size())
    throw std::invalid_argument("malformed attack LP");

  std::vector<std::vector<HullVertex>> hulls(static_cast<std::size_t>(n_max) + 1);
  std::vector<Segment> segments;
  for (int n = 1; n <= n_max; ++n) {
    hulls[n] = value_hull(lp.weight[n - 1], lp.options[n - 1]);
    if (hulls[n].empty() || hulls[n].front().rate != 0.0)
      throw std::invalid_argument("every photon number needs a zero-rate action");
    for (std::size_t i = 0; i + 1 < hulls[n].size(); ++i) {
      const double d_rate = hulls[n][i + 1].rate - hulls[n][i].rate;
      if (d_rate <= 0.0) continue;
      segments.push_back({n, i, d_rate, hulls[n][i + 1].value - hulls[n][i].value});
    }
  }
  // Per-n slopes strictly decrease along a hull, so a stable sort keeps each
  // hull's segments in order.
  std::stable_sort(segments.begin(), segments.end(),
                   [](const Segment& a, const Segment& b) { return a.slope() > b.slope(); });

  // (vertex reached, fraction into the following segment) per photon number.
  std::vector<std::pair<std::size_t, double>> position(hulls.size(), {0, 0.0});
  double remaining = lp.target_rate;
  double value = 0.0;
  for (const auto& seg : segments) {
    if (remaining <= 0.0) break;
    const double take = std::min(seg.d_rate, remaining);
    const double t = take / seg.d_rate;
    value += t * seg.d_value;
    remaining -= take;
    position[seg.photons] = t >= 1.0 ? std::pair{seg.from + 1, 0.0} : std::pair{seg.from, t};
  }

  AttackLpSolution solution;
  solution.objective = value;
  solution.feasible = remaining <= 1e-12 * lp.target_rate + 1e-300;
  solution.policy = AttackPolicy(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const auto& hull = hulls[n];
    const auto [vertex, t] = position[n];
    if (t > 0.0)
      solution.policy.set_row(n, {{hull[vertex].action, 1.0 - t}, {hull[vertex + 1].action, t}});
    else
      solution.policy.set_pure(n, hull[vertex].action);
  }
  return solution;
}

CurvePoint optimize_policy(const ChannelParams& params, ProtocolKind protocol, double delta_db) {
  const ChannelParams at = params.at_delta(delta_db);
  at.validate();
  const AttackLp lp = build_attack_lp(params, protocol, delta_db);
  AttackLpSolution solution = solve_attack_lp(lp);

  CurvePoint point;
  point.delta_db = delta_db;
  point.feasible = solution.feasible;

  std::map<std::string, std::pair<EveAction, double>> share;
  for (int n = 1; n <= lp.n_max(); ++n)
    for (const auto& [action, x] : solution.policy.row(n)) {
      auto& slot = share.try_emplace(action.name(), action, 0.0).first->second;
      slot.second += lp.weight[n - 1] * x * delivered_detection_probability(n, action, at.eta_det, protocol);
    }
  double best = 0.0;
  for (const auto& [name, entry] : share) {
    if (entry.second > best) {
      best = entry.second;
      point.dominant_action = entry.first;
    }
  }

  if (lp.target_rate > 0.0)
    point.eve_info = std::clamp(solution.objective / lp.target_rate, 0.0, 1.0);
  point.policy = std::move(solution.policy);
  return point;
}

std::vector<CurvePoint> sweep_eve_info(const ChannelParams& params, ProtocolKind protocol,
                                       double delta_min, double delta_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("sweep step must be > 0");
  if (!(delta_max >= delta_min)) throw std::invalid_argument("sweep range is empty");
  const auto count = static_cast<std::size_t>(std::floor((delta_max - delta_min) / step + 1e-9)) + 1;
  std::vector<CurvePoint> curve;
  curve.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    curve.push_back(optimize_policy(params, protocol, delta_min + static_cast<double>(i) * step));
  return curve;
}

std::string_view to_string(CriticalMethod method) {
  switch (method) {
    case CriticalMethod::Bb84Storage: return "BB84-storage";
    case CriticalMethod::SargIrud: return "SARG-IRUD";
    case CriticalMethod::GenericEstimate: return "generic-estimate";
  }
  return "?";
}

double attenuation_for_rate(const ChannelParams& params, double target_rate) {
  if (!(target_rate > 0.0)) return std::numeric_limits<double>::infinity();
  auto rate_at = [&](double delta) { return raw_rate_exact(params.at_delta(delta)); };
  if (target_rate >= rate_at(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 10.0;
  while (rate_at(hi) > target_rate) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(mid) > target_rate) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

CriticalAttenuationReport critical_attenuation_bb84(const ChannelParams& params) {
  params.validate();
  double storage_rate = 0.0;
  for (int n = 2; n <= params.n_max; ++n)
    storage_rate += poisson_pmf(params.mu, n) * detection_probability(n - 1, params.eta_det);

  CriticalAttenuationReport report;
  report.method = CriticalMethod::Bb84Storage;
  report.delta_c_db = attenuation_for_rate(params, storage_rate);
  report.length_km = length_from_delta(report.delta_c_db, params.alpha_db_per_km);
  // eta_det eta_delta mu = eta_det p_2
  report.alternate_delta_db = -10.0 * std::log10(poisson_pmf(params.mu, 2) / params.mu);
  return report;
}

CriticalAttenuationReport critical_attenuation_sarg(const ChannelParams& params) {
  params.validate();
  const double p_ok = irud_success(3, ProtocolKind::SARG);
  const double irud_rate = p_ok * poisson_pmf(params.mu, 3);

  CriticalAttenuationReport report;
  report.method = CriticalMethod::SargIrud;
  report.delta_c_db = -10.0 * std::log10(irud_rate / params.mu);
  report.length_km = length_from_delta(report.delta_c_db, params.alpha_db_per_km);
  report.alternate_delta_db = attenuation_for_rate(params, params.eta_det * irud_rate);
  return report;
}

CriticalAttenuationReport critical_attenuation_generic(double mu_bb84, double chi, double p_ok,
                                                       const ChannelParams& params) {
  if (!(chi >= 0.0 && chi < 1.0)) throw std::invalid_argument("chi must lie in [0, 1)");
  if (!(p_ok >= 0.0 && p_ok <= 1.0)) throw std::invalid_argument("p_ok must lie in [0, 1]");
  ChannelParams boosted = params;
  boosted.mu = mu_bb84 / (1.0 - chi);
  boosted.validate();

  const double target = params.eta_det * poisson_pmf(boosted.mu, 3) * p_ok;
  CriticalAttenuationReport report;
  report.method = CriticalMethod::GenericEstimate;
  report.delta_c_db = attenuation_for_rate(boosted, target);
  report.length_km = length_from_delta(report.delta_c_db, params.alpha_db_per_km);
  report.alternate_delta_db =
      target > 0.0 ? -10.0 * std::log10(target / (params.eta_det * boosted.mu))
                   : std::numeric_limits<double>::infinity();
  return report;
}

Delta1Report delta_1(const ChannelParams& params) {
  params.validate();
  const double storage_rate =
      bob_rate_under_policy(pure_storage_policy(params.n_max), params, ProtocolKind::SARG);
  return {attenuation_for_rate(params, storage_rate),
          -10.0 * std::log10(poisson_pmf(params.mu, 2) / params.mu)};
}

}  // namespace qkdpns
