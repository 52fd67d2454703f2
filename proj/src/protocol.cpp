#include "qkdpns/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qkdpns {

std::string_view to_string(ProtocolKind kind) {
  return kind == ProtocolKind::BB84 ? "BB84" : "SARG";
}

std::optional<ProtocolKind> parse_protocol(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bb84") return ProtocolKind::BB84;
  if (lower == "sarg") return ProtocolKind::SARG;
  return std::nullopt;
}

int alice_bit(ProtocolKind protocol, StateLabel label) {
  if (protocol == ProtocolKind::BB84) return sign_of(label) > 0 ? 0 : 1;
  return bit(label);
}

Preparation alice_prepare(ProtocolKind protocol, SplitMix64& rng) {
  const auto index = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * 4.0), 3);
  const StateLabel label = kAllStateLabels[index];
  if (protocol == ProtocolKind::BB84)
    return {alice_bit(protocol, label), label, axis_of(label)};

  const int partner = rng.uniform() < 0.5 ? +1 : -1;
  SetAnnouncement set;
  if (axis_of(label) == PauliAxis::X) {
    set.omega = sign_of(label);
    set.omega_prime = partner;
  } else {
    set.omega = partner;
    set.omega_prime = sign_of(label);
  }
  return {alice_bit(protocol, label), label, set};
}

SiftOutcome sift_bb84(PauliAxis alice_basis, PauliAxis bob_basis, int bob_outcome) {
  if (alice_basis != bob_basis) return SiftOutcome::discard();
  return SiftOutcome::conclusive(bob_outcome > 0 ? 0 : 1);
}

SiftOutcome sift_sarg(const SetAnnouncement& announcement, PauliAxis bob_axis,
                      int bob_outcome) {
  // -omega' on z excludes |omega' z>, leaving |omega x>; -omega on x
  // excludes |omega x>, leaving |omega' z>.
  if (bob_axis == PauliAxis::Z && bob_outcome == -announcement.omega_prime)
    return SiftOutcome::conclusive(bit(StateLabel::PlusX));
  if (bob_axis == PauliAxis::X && bob_outcome == -announcement.omega)
    return SiftOutcome::conclusive(bit(StateLabel::PlusZ));
  return SiftOutcome::discard();
}

SiftOutcome sift(const Announcement& announcement, PauliAxis bob_axis, int bob_outcome) {
  if (const auto* basis = std::get_if<PauliAxis>(&announcement))
    return sift_bb84(*basis, bob_axis, bob_outcome);
  return sift_sarg(std::get<SetAnnouncement>(announcement), bob_axis, bob_outcome);
}

double sift_ratio_analytic(ProtocolKind protocol) {
  return protocol == ProtocolKind::BB84 ? 0.5 : 0.25;
}

double SessionStats::sift_ratio_sigma(double expected) const {
  if (bob_detections == 0) return 0.0;
  return std::sqrt(expected * (1.0 - expected) / static_cast<double>(bob_detections));
}

double SessionStats::net_key_rate_sigma(double expected) const {
  if (pulses_sent == 0) return 0.0;
  return std::sqrt(expected * (1.0 - expected) / static_cast<double>(pulses_sent));
}

namespace {

struct Tally {
  std::uint64_t detections = 0;
  std::uint64_t sifted = 0;
  std::uint64_t errors = 0;
};

Tally simulate_range(const ChannelParams& params, ProtocolKind protocol,
                     std::uint64_t begin, std::uint64_t end, std::uint64_t seed) {
  const double eta = params.eta_det * transmittance(params.delta_db);
  Tally tally;
  for (std::uint64_t i = begin; i < end; ++i) {
    SplitMix64 rng = derive_stream(seed, i);
    const Preparation prep = alice_prepare(protocol, rng);
    const int photons = sample_photon_number(params.mu, params.n_max, rng);
    if (!sample_detection(photons, eta, rng)) continue;
    ++tally.detections;

    // All photons of a pulse share the prepared state, so whichever one
    // fires the detector yields the same outcome statistics.
    const PauliAxis bob_axis = rng.uniform() < 0.5 ? PauliAxis::X : PauliAxis::Z;
    const auto measured = measure_pauli(qubit_state(prep.label), bob_axis, rng.uniform());
    const SiftOutcome outcome = sift(prep.announcement, bob_axis, measured.outcome);
    if (!outcome.is_conclusive()) continue;
    ++tally.sifted;
    if (outcome.bit() != prep.bit) ++tally.errors;
  }
  return tally;
}

}  // namespace

SessionStats run_session(const ChannelParams& params, ProtocolKind protocol,
                         std::uint64_t pulses, std::uint64_t seed, unsigned threads) {
  if (pulses < 1) throw std::invalid_argument("run_session needs pulses >= 1");
  params.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, pulses));

  std::vector<Tally> partial(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = pulses * w / threads;
      const std::uint64_t end = pulses * (w + 1) / threads;
      workers.emplace_back([&, w, begin, end] {
        partial[w] = simulate_range(params, protocol, begin, end, seed);
      });
    }
  }

  SessionStats stats;
  stats.pulses_sent = pulses;
  for (const auto& t : partial) {
    stats.bob_detections += t.detections;
    stats.sifted_bits += t.sifted;
    stats.bit_errors += t.errors;
  }
  if (stats.sifted_bits > 0)
    stats.qber = static_cast<double>(stats.bit_errors) / static_cast<double>(stats.sifted_bits);
  if (stats.bob_detections > 0)
    stats.sift_ratio =
        static_cast<double>(stats.sifted_bits) / static_cast<double>(stats.bob_detections);
  stats.net_key_rate = static_cast<double>(stats.sifted_bits) / static_cast<double>(pulses);
  return stats;
}

}  // namespace qkdpns
