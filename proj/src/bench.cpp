#include "qkdpns/bench.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qkdpns::bench {

namespace {

using nlohmann::json;

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string sci6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

template <typename T>
T as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + value.dump());
  }
}

double as_number(const json& value, const std::string& key) {
  if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return value.get<double>();
}

std::uint64_t as_count(const json& value, const std::string& key) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  return static_cast<std::uint64_t>(value.get<std::int64_t>());
}

void apply_key(RunConfig& c, const std::string& key, const json& value) {
  if (key == "mu") c.mu = as_number(value, key);
  else if (key == "mu_bb84") c.mu_bb84 = as_number(value, key);
  else if (key == "mu_sarg") c.mu_sarg = as_number(value, key);
  else if (key == "eta_det") c.eta_det = as_number(value, key);
  else if (key == "alpha_db_per_km") c.alpha_db_per_km = as_number(value, key);
  else if (key == "delta_db") c.delta_db = as_number(value, key);
  else if (key == "chi") c.chi = as_number(value, key);
  else if (key == "n_max") c.n_max = static_cast<int>(as_count(value, key));
  else if (key == "protocol") {
    const auto kind = parse_protocol(as<std::string>(value, key));
    if (!kind) throw ConfigError("config key 'protocol' must be \"bb84\" or \"sarg\"");
    c.protocol = *kind;
  } else if (key == "pulses") c.pulses = as_count(value, key);
  else if (key == "seed") c.seed = as_count(value, key);
  else if (key == "delta_min_db") c.delta_min_db = as_number(value, key);
  else if (key == "delta_max_db") c.delta_max_db = as_number(value, key);
  else if (key == "delta_step_db") c.delta_step_db = as_number(value, key);
  else if (key == "out") c.out = as<std::string>(value, key);
  else if (key == "scenario_length_km") c.scenario_length_km = as_number(value, key);
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

double RunConfig::mu_for(ProtocolKind kind) const {
  if (mu && kind == protocol) return *mu;
  return kind == ProtocolKind::BB84 ? mu_bb84 : mu_sarg;
}

ChannelParams RunConfig::channel(ProtocolKind kind) const {
  ChannelParams p;
  p.mu = mu_for(kind);
  p.eta_det = eta_det;
  p.alpha_db_per_km = alpha_db_per_km;
  p.delta_db = delta_db;
  p.chi = chi;
  p.n_max = n_max;
  return p;
}

void RunConfig::validate() const {
  try {
    channel(ProtocolKind::BB84).validate();
    channel(ProtocolKind::SARG).validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  if (pulses < 1) throw ValidationError("pulses must be >= 1");
  if (!(delta_step_db > 0.0)) throw ValidationError("delta_step_db must be > 0");
  if (!(delta_min_db >= 0.0)) throw ValidationError("delta_min_db must be >= 0");
  if (!(delta_max_db >= delta_min_db)) throw ValidationError("sweep range is empty");
  if (!(scenario_length_km >= 0.0)) throw ValidationError("scenario_length_km must be >= 0");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mu",       "mu_bb84",      "mu_sarg",      "eta_det",       "alpha_db_per_km",
      "delta_db", "chi",          "n_max",        "protocol",      "pulses",
      "seed",     "delta_min_db", "delta_max_db", "delta_step_db", "out",
      "scenario_length_km"};
  return keys;
}

RunConfig parse_config(std::string_view document, RunConfig base) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object() || value.is_array())
      throw ConfigError("config key '" + key + "' must be a scalar");
    apply_key(base, key, value);
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override must look like key=value, got '" + std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  apply_key(config, key, value);
}

int cmd_rates(const RunConfig& config, std::ostream& out) {
  const ChannelParams p = config.channel(config.protocol);
  out << "protocol        " << to_string(config.protocol) << '\n';
  out << "mu              " << fixed6(p.mu) << '\n';
  out << "eta_det         " << fixed6(p.eta_det) << '\n';
  out << "delta_db        " << fixed6(p.delta_db) << '\n';
  out << "length_km       " << fixed6(length_from_delta(p.delta_db, p.alpha_db_per_km)) << '\n';
  out << "eta_delta       " << fixed6(transmittance(p.delta_db)) << '\n';
  out << "n  p_n\n";
  for (int n = 0; n <= 6; ++n) out << n << "  " << sci6(poisson_pmf(p.mu, n)) << '\n';
  out << "raw_rate_exact  " << sci6(raw_rate_exact(p)) << '\n';
  out << "raw_rate_approx " << sci6(raw_rate_approx(p)) << '\n';
  return kExitOk;
}

int cmd_critical(const RunConfig& config, std::ostream& out) {
  const ChannelParams bb84 = config.channel(ProtocolKind::BB84);
  const ChannelParams sarg = config.channel(ProtocolKind::SARG);
  const auto c_bb84 = critical_attenuation_bb84(bb84);
  const auto c_sarg = critical_attenuation_sarg(sarg);
  const double p_ok = irud_success(3, ProtocolKind::SARG);
  const auto c_generic = critical_attenuation_generic(bb84.mu, config.chi, p_ok, bb84);
  const auto d1 = delta_1(sarg);
  const double scenario_db = delta_from_length(config.scenario_length_km, config.alpha_db_per_km);
  const double info_bb84 = optimize_policy(bb84, ProtocolKind::BB84, scenario_db).eve_info;
  const double info_sarg = optimize_policy(sarg, ProtocolKind::SARG, scenario_db).eve_info;

  out << "delta_c_bb84_db        " << fixed6(c_bb84.delta_c_db) << "  (mu " << fixed6(bb84.mu)
      << ", approx-rate " << fixed6(c_bb84.alternate_delta_db) << ")\n";
  out << "length_c_bb84_km       " << fixed6(c_bb84.length_km) << '\n';
  out << "delta_c_sarg_db        " << fixed6(c_sarg.delta_c_db) << "  (mu " << fixed6(sarg.mu)
      << ", p_ok " << fixed6(p_ok) << ", exact-rate " << fixed6(c_sarg.alternate_delta_db) << ")\n";
  out << "length_c_sarg_km       " << fixed6(c_sarg.length_km) << '\n';
  out << "ratio_sarg_bb84        " << fixed6(c_sarg.delta_c_db / c_bb84.delta_c_db) << '\n';
  out << "delta_c_generic_db     " << fixed6(c_generic.delta_c_db) << "  (chi " << fixed6(config.chi)
      << ", gain " << fixed6(c_generic.delta_c_db - c_bb84.delta_c_db) << " dB)\n";
  out << "length_c_generic_km    " << fixed6(c_generic.length_km) << '\n';
  out << "delta_1_db             " << fixed6(d1.exact_db) << "  (p_2 approx " << fixed6(d1.approx_db)
      << ")\n";
  out << "scenario_length_km     " << fixed6(config.scenario_length_km) << "  (" << fixed6(scenario_db)
      << " dB)\n";
  out << "scenario_eve_info_bb84 " << fixed6(info_bb84) << '\n';
  out << "scenario_eve_info_sarg " << fixed6(info_sarg) << '\n';
  return kExitOk;
}

void write_sweep_csv(std::ostream& out, const RunConfig& config) {
  const auto bb84 = sweep_eve_info(config.channel(ProtocolKind::BB84), ProtocolKind::BB84,
                                   config.delta_min_db, config.delta_max_db, config.delta_step_db);
  const auto sarg = sweep_eve_info(config.channel(ProtocolKind::SARG), ProtocolKind::SARG,
                                   config.delta_min_db, config.delta_max_db, config.delta_step_db);
  out << "delta_db,protocol,eve_info,dominant_action\n";
  for (std::size_t i = 0; i < bb84.size(); ++i) {
    for (const auto* point : {&bb84[i], &sarg[i]}) {
      const auto kind = point == &bb84[i] ? ProtocolKind::BB84 : ProtocolKind::SARG;
      out << fixed6(point->delta_db) << ',' << to_string(kind) << ',' << fixed6(point->eve_info)
          << ',' << point->dominant_action.name() << '\n';
    }
  }
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  if (config.out.empty()) {
    write_sweep_csv(out, config);
    return kExitOk;
  }
  std::ofstream file(config.out);
  if (!file) throw ConfigError("cannot write '" + config.out + "'");
  write_sweep_csv(file, config);
  file.flush();
  if (!file) throw ConfigError("write to '" + config.out + "' failed");
  out << "wrote " << config.out << '\n';
  return kExitOk;
}

int cmd_session(const RunConfig& config, std::ostream& out) {
  const ChannelParams p = config.channel(config.protocol);
  const SessionStats s = run_session(p, config.protocol, config.pulses, config.seed);
  const double expected = sift_ratio_analytic(config.protocol);
  const double sigma = s.sift_ratio_sigma(expected);
  const double deviation = sigma > 0.0 ? std::abs(s.sift_ratio - expected) / sigma : INFINITY;

  out << "protocol        " << to_string(config.protocol) << '\n';
  out << "mu              " << fixed6(p.mu) << '\n';
  out << "delta_db        " << fixed6(p.delta_db) << '\n';
  out << "seed            " << config.seed << '\n';
  out << "pulses_sent     " << s.pulses_sent << '\n';
  out << "bob_detections  " << s.bob_detections << '\n';
  out << "sifted_bits     " << s.sifted_bits << '\n';
  out << "bit_errors      " << s.bit_errors << '\n';
  out << "qber            " << fixed6(s.qber) << '\n';
  out << "sift_ratio      " << fixed6(s.sift_ratio) << "  (expected " << fixed6(expected)
      << ", " << fixed6(deviation) << " sigma)\n";
  out << "net_key_rate    " << sci6(s.net_key_rate) << '\n';
  out << "raw_rate_exact  " << sci6(raw_rate_exact(p)) << '\n';

  const bool ok = s.bit_errors == 0 && s.bob_detections > 0 && deviation <= 5.0;
  out << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitValidation;
}

int cmd_povm_verify(const RunConfig& /*config*/, std::ostream& out) {
  std::vector<StateVector> states;
  for (const auto label : {StateLabel::PlusZ, StateLabel::PlusX, StateLabel::MinusZ,
                           StateLabel::MinusX})
    states.push_back(tensor_power(qubit_state(label), 3));

  const Eigen::VectorXd eig = hermitian_eigenvalues(gram_matrix(states));
  const UsdResult usd = build_usd_povm(states);

  double cross = 0.0;
  double success_dev = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      const double pr = usd.povm.probability(i, states[j]);
      if (i == j) success_dev = std::max(success_dev, std::abs(pr - usd.p_ok));
      else cross = std::max(cross, std::abs(pr));
    }
  }
  const double expected[] = {0.5, 0.5, 1.5, 1.5};
  double eig_dev = 0.0;
  for (Eigen::Index k = 0; k < eig.size(); ++k)
    eig_dev = std::max(eig_dev, std::abs(eig(k) - expected[k]));

  out << "photons                 3\n";
  out << "p_ok                    " << fixed6(usd.p_ok) << '\n';
  out << "gram_eigenvalues        ";
  for (Eigen::Index k = 0; k < eig.size(); ++k) out << (k ? " " : "") << fixed6(eig(k));
  out << '\n';
  out << "completeness_residual   " << sci6(usd.povm.completeness_residual()) << '\n';
  out << "min_element_eigenvalue  " << sci6(usd.povm.min_eigenvalue()) << '\n';
  out << "hermiticity_residual    " << sci6(usd.povm.hermiticity_residual()) << '\n';
  out << "max_cross_term          " << sci6(cross) << '\n';
  out << "max_success_deviation   " << sci6(success_dev) << '\n';

  const bool ok = std::abs(usd.p_ok - 0.5) <= 1e-9 && eig_dev <= 1e-9 &&
                  usd.povm.completeness_residual() <= 1e-10 &&
                  usd.povm.min_eigenvalue() >= -1e-10 && cross <= 1e-10 && success_dev <= 1e-10;
  out << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitValidation;
}

}  // namespace qkdpns::bench
