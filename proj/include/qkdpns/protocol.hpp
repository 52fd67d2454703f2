#ifndef QKDPNS_PROTOCOL_HPP
#define QKDPNS_PROTOCOL_HPP

#include "qkdpns/photonics.hpp"
#include "qkdpns/qcore.hpp"
#include "qkdpns/random.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

namespace qkdpns {

/// Both protocols share the quantum layer; they differ only in sifting.
enum class ProtocolKind { BB84, SARG };

std::string_view to_string(ProtocolKind kind);
/// Case-insensitive "bb84" / "sarg".
std::optional<ProtocolKind> parse_protocol(std::string_view text);

/// Public announcement of the pair {|omega x>, |omega' z>}.
struct SetAnnouncement {
  int omega = +1;        // sign of the x member
  int omega_prime = +1;  // sign of the z member

  bool contains(StateLabel label) const {
    return axis_of(label) == PauliAxis::X ? sign_of(label) == omega
                                          : sign_of(label) == omega_prime;
  }
  friend bool operator==(const SetAnnouncement&, const SetAnnouncement&) = default;
};

/// BB84 reveals a basis; the non-orthogonal protocol reveals a set.
using Announcement = std::variant<PauliAxis, SetAnnouncement>;

struct Preparation {
  int bit;
  StateLabel label;
  Announcement announcement;
};

class SiftOutcome {
 public:
  static SiftOutcome conclusive(int bit) { return SiftOutcome(bit); }
  static SiftOutcome discard() { return SiftOutcome(std::nullopt); }

  bool is_conclusive() const { return bit_.has_value(); }
  /// Precondition: is_conclusive().
  int bit() const { return *bit_; }

  friend bool operator==(const SiftOutcome&, const SiftOutcome&) = default;

 private:
  explicit SiftOutcome(std::optional<int> bit) : bit_(bit) {}
  std::optional<int> bit_;
};

/// Alice's bit under the given protocol's coding. BB84: sign (+ -> 0,
/// - -> 1). SARG: axis (x -> 0, z -> 1).
int alice_bit(ProtocolKind protocol, StateLabel label);

/// Uniform choice of one of the four states; for SARG the partner sign of
/// the announced set is also uniform.
Preparation alice_prepare(ProtocolKind protocol, SplitMix64& rng);

SiftOutcome sift_bb84(PauliAxis alice_basis, PauliAxis bob_basis, int bob_outcome);

/// Bob's result is conclusive iff his eigenstate is orthogonal to one member
/// of the announced pair; he then infers the other member.
SiftOutcome sift_sarg(const SetAnnouncement& announcement, PauliAxis bob_axis,
                      int bob_outcome);

/// Dispatches on the announcement type.
SiftOutcome sift(const Announcement& announcement, PauliAxis bob_axis, int bob_outcome);

/// Fraction of Bob's detections that survive sifting: 1/2 BB84, 1/4 SARG.
double sift_ratio_analytic(ProtocolKind protocol);

struct SessionStats {
  std::uint64_t pulses_sent = 0;
  std::uint64_t bob_detections = 0;
  std::uint64_t sifted_bits = 0;
  std::uint64_t bit_errors = 0;
  double qber = 0.0;
  double sift_ratio = 0.0;     // sifted / detections
  double net_key_rate = 0.0;   // sifted / pulses

  /// Binomial standard error of sift_ratio around `expected`.
  double sift_ratio_sigma(double expected) const;
  /// Binomial standard error of net_key_rate around `expected`.
  double net_key_rate_sigma(double expected) const;

  friend bool operator==(const SessionStats&, const SessionStats&) = default;
};

/// Eve-free Monte Carlo run. Pulse i draws only from derive_stream(seed, i),
/// so the result is identical for any `threads` (0 = hardware concurrency).
SessionStats run_session(const ChannelParams& params, ProtocolKind protocol,
                         std::uint64_t pulses, std::uint64_t seed, unsigned threads = 0);

}  // namespace qkdpns

#endif  // QKDPNS_PROTOCOL_HPP
