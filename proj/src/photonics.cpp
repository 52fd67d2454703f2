#include "qkdpns/photonics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdpns {

void ChannelParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("mu must be > 0");
  if (!(eta_det > 0.0 && eta_det <= 1.0))
    throw std::invalid_argument("eta_det must lie in (0, 1]");
  if (!(alpha_db_per_km > 0.0) || !std::isfinite(alpha_db_per_km))
    throw std::invalid_argument("alpha_db_per_km must be > 0");
  if (!(delta_db >= 0.0) || !std::isfinite(delta_db))
    throw std::invalid_argument("delta_db must be >= 0");
  if (!(chi >= 0.0 && chi < 1.0)) throw std::invalid_argument("chi must lie in [0, 1)");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (poisson_tail(mu, n_max) >= 1e-12)
    throw std::invalid_argument("Poisson tail beyond n_max = " + std::to_string(n_max) +
                                " exceeds 1e-12 for mu = " + std::to_string(mu));
}

double poisson_pmf(double mu, int n) {
  if (n < 0) return 0.0;
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
}

double poisson_tail(double mu, int n_max) {
  double tail = 0.0;
  for (int n = n_max + 1; n <= n_max + 400; ++n) {
    const double term = poisson_pmf(mu, n);
    tail += term;
    if (n > mu && (term == 0.0 || term < 1e-20 * tail)) break;
  }
  return tail;
}

double transmittance(double delta_db) { return std::pow(10.0, -delta_db / 10.0); }

double delta_from_length(double length_km, double alpha_db_per_km) {
  return alpha_db_per_km * length_km;
}

double length_from_delta(double delta_db, double alpha_db_per_km) {
  return delta_db / alpha_db_per_km;
}

double detection_probability(int photons, double eta) {
  if (photons <= 0 || eta <= 0.0) return 0.0;
  if (eta >= 1.0) return 1.0;
  return -std::expm1(photons * std::log1p(-eta));
}

double raw_rate_exact(const ChannelParams& params) {
  const double eta = params.eta_det * transmittance(params.delta_db);
  double rate = 0.0;
  for (int n = 1; n <= params.n_max; ++n)
    rate += poisson_pmf(params.mu, n) * detection_probability(n, eta);
  return rate;
}

double raw_rate_approx(const ChannelParams& params) {
  return params.eta_det * transmittance(params.delta_db) * params.mu;
}

int sample_photon_number(double mu, int n_max, SplitMix64& rng) {
  const double u = rng.uniform();
  double cdf = 0.0;
  for (int n = 0; n < n_max; ++n) {
    cdf += poisson_pmf(mu, n);
    if (u < cdf) return n;
  }
  return n_max;
}

bool sample_detection(int photons, double eta, SplitMix64& rng) {
  if (photons <= 0) return false;
  return rng.uniform() < detection_probability(photons, eta);
}

}  // namespace qkdpns
