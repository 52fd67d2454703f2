#include "qkdpns/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace qkdpns {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void require_same_dimension(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("state dimension mismatch: " +
                                std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
}

void require_single_qubit(const StateVector& s, const char* what) {
  if (s.qubits() != 1)
    throw std::invalid_argument(std::string(what) + " requires a single-qubit state");
}

}  // namespace

std::string to_string(StateLabel label) {
  switch (label) {
    case StateLabel::PlusX: return "+x";
    case StateLabel::MinusX: return "-x";
    case StateLabel::PlusZ: return "+z";
    case StateLabel::MinusZ: return "-z";
  }
  return "?";
}

StateVector::StateVector(Eigen::VectorXcd amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  const auto size = static_cast<std::uint64_t>(amplitudes_.size());
  if (size == 0 || !std::has_single_bit(size))
    throw std::invalid_argument("state length must be a power of two, got " +
                                std::to_string(size));
  const double norm = amplitudes_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::invalid_argument("state vector has zero or non-finite norm");
  amplitudes_ /= norm;
  qubits_ = std::countr_zero(size);
}

StateVector qubit_state(StateLabel label) {
  Eigen::VectorXcd v(2);
  switch (label) {
    case StateLabel::PlusX: v << kInvSqrt2, kInvSqrt2; break;
    case StateLabel::MinusX: v << kInvSqrt2, -kInvSqrt2; break;
    case StateLabel::PlusZ: v << 1.0, 0.0; break;
    case StateLabel::MinusZ: v << 0.0, 1.0; break;
  }
  return StateVector(std::move(v));
}

StateVector equator_state(double phi) {
  Eigen::VectorXcd v(2);
  v << kInvSqrt2, std::polar(kInvSqrt2, phi);
  return StateVector(std::move(v));
}

Complex overlap(const StateVector& a, const StateVector& b) {
  require_same_dimension(a, b);
  return a.amplitudes().dot(b.amplitudes());  // Eigen conjugates the left side
}

StateVector tensor_power(const StateVector& s, int copies) {
  if (copies < 1) throw std::invalid_argument("tensor_power needs copies >= 1");
  if (s.qubits() * copies > kMaxQubits)
    throw std::invalid_argument("tensor_power exceeds " + std::to_string(kMaxQubits) +
                                " qubits");
  Eigen::VectorXcd acc = s.amplitudes();
  for (int c = 1; c < copies; ++c) {
    Eigen::VectorXcd next(acc.size() * s.dimension());
    for (Eigen::Index i = 0; i < acc.size(); ++i)
      next.segment(i * s.dimension(), s.dimension()) = acc(i) * s.amplitudes();
    acc = std::move(next);
  }
  return StateVector(std::move(acc));
}

int qubit_count(const LinearOperator& op) {
  const auto rows = static_cast<std::uint64_t>(op.rows());
  if (op.rows() != op.cols() || rows == 0 || !std::has_single_bit(rows))
    throw std::invalid_argument("operator is not 2^n x 2^n");
  return std::countr_zero(rows);
}

StateVector orthogonal_complement(const StateVector& s) {
  require_single_qubit(s, "orthogonal_complement");
  Eigen::VectorXcd v(2);
  v << -std::conj(s[1]), std::conj(s[0]);
  return StateVector(std::move(v));
}

LinearOperator build_filter(const StateVector& s0, const StateVector& s1) {
  require_single_qubit(s0, "build_filter");
  require_single_qubit(s1, "build_filter");
  const double chi = std::abs(overlap(s0, s1));
  if (1.0 - chi < 1e-12)
    throw DegenerateInputError("filter undefined for identical states (chi = 1)");

  const Eigen::VectorXcd plus_x = qubit_state(StateLabel::PlusX).amplitudes();
  const Eigen::VectorXcd minus_x = qubit_state(StateLabel::MinusX).amplitudes();
  const Eigen::VectorXcd s0_perp = orthogonal_complement(s0).amplitudes();
  const Eigen::VectorXcd s1_perp = orthogonal_complement(s1).amplitudes();

  LinearOperator f = plus_x * s1_perp.adjoint() + minus_x * s0_perp.adjoint();
  return f / std::sqrt(1.0 + chi);
}

double pauli_plus_probability(const StateVector& s, PauliAxis axis) {
  require_single_qubit(s, "pauli measurement");
  const auto plus = qubit_state(axis == PauliAxis::X ? StateLabel::PlusX : StateLabel::PlusZ);
  return std::norm(overlap(plus, s));
}

PauliOutcome measure_pauli(const StateVector& s, PauliAxis axis, double rand) {
  const int outcome = rand < pauli_plus_probability(s, axis) ? +1 : -1;
  return {outcome, qubit_state(make_label(axis, outcome))};
}

Eigen::MatrixXcd gram_matrix(std::span<const StateVector> states) {
  const auto n = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = overlap(states[i], states[j]);
  return g;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

Povm::Povm(std::vector<PovmElement> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("POVM has no elements");
  const Eigen::Index dim = elements_.front().op.rows();
  for (const auto& e : elements_) {
    if (e.op.rows() != dim || e.op.cols() != dim)
      throw std::invalid_argument("POVM element dimension mismatch");
  }
  if (hermiticity_residual() > kPsdTolerance)
    throw std::invalid_argument("POVM element is not Hermitian");
  if (min_eigenvalue() < -kPsdTolerance)
    throw std::invalid_argument("POVM element is not positive semidefinite");
  if (completeness_residual() > kPsdTolerance)
    throw std::invalid_argument("POVM elements do not sum to identity");
}

double Povm::completeness_residual() const {
  LinearOperator sum = LinearOperator::Zero(dimension(), dimension());
  for (const auto& e : elements_) sum += e.op;
  return (sum - LinearOperator::Identity(dimension(), dimension())).cwiseAbs().maxCoeff();
}

double Povm::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& e : elements_) {
    const LinearOperator h = 0.5 * (e.op + e.op.adjoint());
    lo = std::min(lo, hermitian_eigenvalues(h).minCoeff());
  }
  return lo;
}

double Povm::hermiticity_residual() const {
  double worst = 0.0;
  for (const auto& e : elements_)
    worst = std::max(worst, (e.op - e.op.adjoint()).cwiseAbs().maxCoeff());
  return worst;
}

double Povm::probability(std::size_t element, const StateVector& psi) const {
  const auto& v = psi.amplitudes();
  if (v.size() != dimension()) throw std::invalid_argument("state/POVM dimension mismatch");
  return v.dot(elements_.at(element).op * v).real();
}

UsdResult build_usd_povm(std::span<const StateVector> states) {
  if (states.empty()) throw std::invalid_argument("USD needs at least one state");
  const Eigen::MatrixXcd gram = gram_matrix(states);
  const double lambda_min = hermitian_eigenvalues(gram).minCoeff();
  if (lambda_min <= kGramSingularThreshold)
    throw LinearDependenceError("states are linearly dependent (lambda_min = " +
                                std::to_string(lambda_min) + ")");

  const auto n = static_cast<Eigen::Index>(states.size());
  const Eigen::Index dim = states.front().dimension();
  Eigen::MatrixXcd basis(dim, n);
  for (Eigen::Index j = 0; j < n; ++j) basis.col(j) = states[j].amplitudes();

  // Columns of basis * G^{-1} form the dual set: <d_i|Psi_j> = delta_ij.
  const Eigen::MatrixXcd dual = basis * gram.ldlt().solve(Eigen::MatrixXcd::Identity(n, n));

  std::vector<PovmElement> elements;
  elements.reserve(states.size() + 1);
  LinearOperator remainder = LinearOperator::Identity(dim, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    LinearOperator e = lambda_min * dual.col(i) * dual.col(i).adjoint();
    remainder -= e;
    elements.push_back({static_cast<std::size_t>(i), std::move(e)});
  }
  remainder = 0.5 * (remainder + remainder.adjoint()).eval();
  elements.push_back({std::nullopt, std::move(remainder)});
  return {Povm(std::move(elements)), lambda_min};
}

}  // namespace qkdpns
