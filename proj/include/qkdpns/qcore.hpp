#ifndef QKDPNS_QCORE_HPP
#define QKDPNS_QCORE_HPP

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qkdpns {

using Complex = std::complex<double>;

/// Square matrix acting on n qubits (2^n x 2^n).
using LinearOperator = Eigen::MatrixXcd;

/// Largest register handled by the dense routines.
inline constexpr int kMaxQubits = 6;

inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kGramSingularThreshold = 1e-8;

/// Thrown by build_usd_povm when the input states span too small a space.
class LinearDependenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown by build_filter for (numerically) identical input states.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class PauliAxis { X, Z };

/// The four protocol states. Bit convention: +-x carry 0, +-z carry 1.
enum class StateLabel { PlusX, MinusX, PlusZ, MinusZ };

inline constexpr std::array<StateLabel, 4> kAllStateLabels = {
    StateLabel::PlusX, StateLabel::MinusX, StateLabel::PlusZ,
    StateLabel::MinusZ};

constexpr PauliAxis axis_of(StateLabel label) {
  return (label == StateLabel::PlusX || label == StateLabel::MinusX)
             ? PauliAxis::X
             : PauliAxis::Z;
}

/// +1 or -1: the eigenvalue of the label's own Pauli observable.
constexpr int sign_of(StateLabel label) {
  return (label == StateLabel::PlusX || label == StateLabel::PlusZ) ? +1 : -1;
}

/// Non-orthogonal-sifting bit: x states code 0, z states code 1.
constexpr int bit(StateLabel label) {
  return axis_of(label) == PauliAxis::X ? 0 : 1;
}

constexpr StateLabel make_label(PauliAxis axis, int sign) {
  if (axis == PauliAxis::X) return sign > 0 ? StateLabel::PlusX : StateLabel::MinusX;
  return sign > 0 ? StateLabel::PlusZ : StateLabel::MinusZ;
}

std::string to_string(StateLabel label);

/// Normalized pure state of n qubits. Amplitude 0 is <0...0|psi>.
class StateVector {
 public:
  /// Normalizes `amplitudes`. Throws std::invalid_argument if the length is
  /// not a power of two or the vector is zero.
  explicit StateVector(Eigen::VectorXcd amplitudes);

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  int qubits() const { return qubits_; }

  Complex operator[](Eigen::Index i) const { return amplitudes_(i); }

 private:
  Eigen::VectorXcd amplitudes_;
  int qubits_ = 0;
};

/// |+-x> = (1, +-1)/sqrt2, |+z> = (1, 0), |-z> = (0, 1). All amplitudes real.
StateVector qubit_state(StateLabel label);

/// (1, e^{i phi})/sqrt2, a point on the equator of the Bloch sphere. The pair
/// equator_state(+beta), equator_state(-beta) has overlap modulus cos(beta).
StateVector equator_state(double phi);

/// <a|b>, conjugate-linear in `a`.
Complex overlap(const StateVector& a, const StateVector& b);

/// s (x) s (x) ... (x) s with `copies` factors.
StateVector tensor_power(const StateVector& s, int copies);

/// Qubit count of a square operator; throws if not 2^n x 2^n.
int qubit_count(const LinearOperator& op);

/// Single-qubit state orthogonal to `s`: (a, b) -> (-b*, a*).
StateVector orthogonal_complement(const StateVector& s);

/// Filter that maps s0 onto |+x> and s1 onto |-x> with equal pass
/// probability 1 - chi, chi = |<s0|s1>|:
///   F = (|+x><s1_perp| + |-x><s0_perp|) / sqrt(1 + chi).
LinearOperator build_filter(const StateVector& s0, const StateVector& s1);

/// Born probability of outcome +1 when measuring `axis` on a single qubit.
double pauli_plus_probability(const StateVector& s, PauliAxis axis);

struct PauliOutcome {
  int outcome;  // +1 or -1
  StateVector post_state;
};

/// Projective Pauli measurement driven by a caller-supplied uniform sample:
/// outcome is +1 iff `rand` < P(+1).
PauliOutcome measure_pauli(const StateVector& s, PauliAxis axis, double rand);

/// G_ij = <s_i|s_j>.
Eigen::MatrixXcd gram_matrix(std::span<const StateVector> states);

/// Ascending eigenvalues of a Hermitian matrix.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);

struct PovmElement {
  /// Index of the identified input state, or nullopt for "inconclusive".
  std::optional<std::size_t> state_index;
  LinearOperator op;

  bool inconclusive() const { return !state_index.has_value(); }
};

/// Finite set of positive operators summing to identity.
class Povm {
 public:
  /// Throws std::invalid_argument if the elements are empty, of mismatched
  /// dimension, non-Hermitian, not PSD, or not complete (tolerance 1e-10).
  explicit Povm(std::vector<PovmElement> elements);

  const std::vector<PovmElement>& elements() const { return elements_; }
  Eigen::Index dimension() const { return elements_.front().op.rows(); }

  /// max |(sum E - I)_ij|
  double completeness_residual() const;
  /// Smallest eigenvalue over all elements.
  double min_eigenvalue() const;
  /// max |E - E^dag| over all elements.
  double hermiticity_residual() const;

  /// <psi|E_k|psi>
  double probability(std::size_t element, const StateVector& psi) const;

 private:
  std::vector<PovmElement> elements_;
};

struct UsdResult {
  Povm povm;
  /// Common success probability <Psi_i|E_i|Psi_i>.
  double p_ok;
};

/// Equal-success unambiguous discrimination of linearly independent states.
/// Conclusive elements are q |d_i><d_i| with d_i the dual basis
/// (<d_i|Psi_j> = delta_ij) and q = lambda_min(Gram); the last element is
/// the inconclusive remainder I - sum E_i. Throws LinearDependenceError when
/// lambda_min(Gram) <= 1e-8.
UsdResult build_usd_povm(std::span<const StateVector> states);

}  // namespace qkdpns

#endif  // QKDPNS_QCORE_HPP
