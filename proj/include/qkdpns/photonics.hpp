#ifndef QKDPNS_PHOTONICS_HPP
#define QKDPNS_PHOTONICS_HPP

#include "qkdpns/random.hpp"

#include <numbers>

namespace qkdpns {

inline constexpr double kTypicalAlphaDbPerKm = 0.25;
inline constexpr int kDefaultPoissonCutoff = 20;

/// Full experiment configuration for one protocol run.
struct ChannelParams {
  double mu = 0.1;                  // mean photon number per pulse
  double eta_det = 0.1;             // detector quantum efficiency
  double alpha_db_per_km = kTypicalAlphaDbPerKm;
  double delta_db = 0.0;            // line attenuation
  double chi = 1.0 / std::numbers::sqrt2;  // overlap within an announced pair
  int n_max = kDefaultPoissonCutoff;       // Poisson truncation order

  /// Throws std::invalid_argument on out-of-range fields or when the Poisson
  /// tail beyond n_max is >= 1e-12.
  void validate() const;

  /// Copy with a different attenuation.
  ChannelParams at_delta(double delta) const {
    ChannelParams p = *this;
    p.delta_db = delta;
    return p;
  }
};

/// e^{-mu} mu^n / n!, evaluated in log space.
double poisson_pmf(double mu, int n);

/// sum_{n > n_max} p_n(mu), summed directly (no cancellation).
double poisson_tail(double mu, int n_max);

/// eta_delta = 10^{-delta/10}.
double transmittance(double delta_db);

double delta_from_length(double length_km, double alpha_db_per_km);
double length_from_delta(double delta_db, double alpha_db_per_km);

/// 1 - (1 - eta)^n: a threshold detector fires if any of n photons survives.
double detection_probability(int photons, double eta);

/// Bob's raw detection rate per pulse, sum_{n=1}^{n_max} p_n (1-(1-eta_det eta_delta)^n).
double raw_rate_exact(const ChannelParams& params);

/// Small-rate form eta_det eta_delta mu.
double raw_rate_approx(const ChannelParams& params);

/// Inverse-CDF Poisson draw, truncated at n_max.
int sample_photon_number(double mu, int n_max, SplitMix64& rng);

/// True with probability detection_probability(photons, eta).
bool sample_detection(int photons, double eta, SplitMix64& rng);

}  // namespace qkdpns

#endif  // QKDPNS_PHOTONICS_HPP
