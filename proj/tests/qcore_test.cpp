#include "qkdpns/qcore.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "test_support.hpp"

using namespace qkdpns;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;
constexpr double kCubeOverlap = 0.35355339059327373;  // 2^{-3/2}

std::vector<StateVector> product_states(int photons) {
  std::vector<StateVector> states;
  for (auto label : {StateLabel::PlusZ, StateLabel::PlusX, StateLabel::MinusZ, StateLabel::MinusX})
    states.push_back(tensor_power(qubit_state(label), photons));
  return states;
}

// <a^m|b^m> by explicit sum over all 2^m computational basis strings.
Complex product_overlap_by_enumeration(const StateVector& a, const StateVector& b, int m) {
  Complex sum = 0.0;
  for (int index = 0; index < (1 << m); ++index) {
    Complex pa = 1.0;
    Complex pb = 1.0;
    for (int q = 0; q < m; ++q) {
      const int bit = (index >> q) & 1;
      pa *= a[bit];
      pb *= b[bit];
    }
    sum += std::conj(pa) * pb;
  }
  return sum;
}

}  // namespace

TEST(QubitState, ConventionsAreFixed) {
  const auto plus_z = qubit_state(StateLabel::PlusZ);
  EXPECT_EQ(plus_z[0], Complex(1.0, 0.0));
  EXPECT_EQ(plus_z[1], Complex(0.0, 0.0));

  const auto plus_x = qubit_state(StateLabel::PlusX);
  EXPECT_NEAR(plus_x[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(plus_x[1].real(), kInvSqrt2, 1e-15);
  EXPECT_EQ(plus_x[1].imag(), 0.0);

  const auto minus_x = qubit_state(StateLabel::MinusX);
  EXPECT_NEAR(minus_x[1].real(), -kInvSqrt2, 1e-15);
  EXPECT_EQ(qubit_state(StateLabel::MinusZ)[1], Complex(1.0, 0.0));

  EXPECT_NEAR(std::abs(overlap(plus_x, plus_z) - Complex(kInvSqrt2)), 0.0, 1e-15);
}

TEST(QubitState, LabelBitsAndAxes) {
  EXPECT_EQ(bit(StateLabel::PlusX), 0);
  EXPECT_EQ(bit(StateLabel::MinusX), 0);
  EXPECT_EQ(bit(StateLabel::PlusZ), 1);
  EXPECT_EQ(bit(StateLabel::MinusZ), 1);
  for (auto label : kAllStateLabels) EXPECT_EQ(make_label(axis_of(label), sign_of(label)), label);
}

TEST(StateVector, ConstructorNormalizes) {
  SplitMix64 rng(11);
  for (int q = 1; q <= kMaxQubits; ++q) {
    const auto s = oracle::random_state(q, rng);
    EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-12);
    EXPECT_EQ(s.qubits(), q);
  }
  Eigen::VectorXcd v(2);
  v << 3.0, 4.0;
  EXPECT_NEAR(std::abs(StateVector(v)[0] - Complex(0.6)), 0.0, 1e-15);
}

TEST(StateVector, RejectsBadLengthAndZero) {
  EXPECT_THROW(StateVector(Eigen::VectorXcd::Ones(3)), std::invalid_argument);
  EXPECT_THROW(StateVector(Eigen::VectorXcd(0)), std::invalid_argument);
  EXPECT_THROW(StateVector(Eigen::VectorXcd::Zero(4)), std::invalid_argument);
}

TEST(EquatorState, EndpointsAndOverlap) {
  const auto at_zero = equator_state(0.0);
  EXPECT_NEAR(std::abs(overlap(at_zero, qubit_state(StateLabel::PlusX))), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(overlap(equator_state(std::numbers::pi), qubit_state(StateLabel::MinusX))),
              1.0, 1e-15);

  // |(1 + e^{-2i beta})/2| = cos(beta)
  EXPECT_NEAR(std::abs(overlap(equator_state(0.3), equator_state(-0.3))), 0.955336489125606, 1e-14);
  EXPECT_NEAR(std::abs(overlap(equator_state(std::numbers::pi / 2), equator_state(-std::numbers::pi / 2))),
              0.0, 1e-15);
}

TEST(Overlap, BasicValues) {
  EXPECT_EQ(overlap(qubit_state(StateLabel::PlusZ), qubit_state(StateLabel::MinusZ)), Complex(0.0));
  EXPECT_NEAR(overlap(qubit_state(StateLabel::PlusZ), qubit_state(StateLabel::PlusX)).real(),
              kInvSqrt2, 1e-15);
  SplitMix64 rng(3);
  const auto s = oracle::random_state(3, rng);
  EXPECT_NEAR(std::abs(overlap(s, s) - 1.0), 0.0, 1e-14);
}

TEST(Overlap, ConjugateLinearInFirstArgument) {
  Eigen::VectorXcd a(2);
  a << Complex(0, 1), 0.0;
  const StateVector ia(a);
  // <i 0|0> = -i
  EXPECT_NEAR(std::abs(overlap(ia, qubit_state(StateLabel::PlusZ)) - Complex(0, -1)), 0.0, 1e-15);
}

TEST(Overlap, DimensionMismatchThrows) {
  EXPECT_THROW(overlap(qubit_state(StateLabel::PlusZ),
                       tensor_power(qubit_state(StateLabel::PlusZ), 2)),
               std::invalid_argument);
}

TEST(TensorPower, SingleCopyIsIdentity) {
  SplitMix64 rng(5);
  const auto s = oracle::random_state(1, rng);
  EXPECT_TRUE(tensor_power(s, 1).amplitudes().isApprox(s.amplitudes(), 1e-15));
  EXPECT_THROW(tensor_power(s, 0), std::invalid_argument);
}

TEST(TensorPower, ThreePhotonOverlapsMatchEnumeration) {
  const auto pz = qubit_state(StateLabel::PlusZ);
  const auto px = qubit_state(StateLabel::PlusX);
  const auto mz = qubit_state(StateLabel::MinusZ);

  const Complex direct = overlap(tensor_power(pz, 3), tensor_power(px, 3));
  EXPECT_NEAR(direct.real(), kCubeOverlap, 1e-15);
  EXPECT_NEAR(std::abs(direct - product_overlap_by_enumeration(pz, px, 3)), 0.0, 1e-15);

  // Sign matters for the Gram matrix: <+x^3|-z^3> = +(1/sqrt2)^3.
  const Complex signed_overlap = overlap(tensor_power(px, 3), tensor_power(mz, 3));
  EXPECT_NEAR(signed_overlap.real(), kCubeOverlap, 1e-15);
  EXPECT_NEAR(std::abs(signed_overlap - product_overlap_by_enumeration(px, mz, 3)), 0.0, 1e-15);

  const Complex negative =
      overlap(tensor_power(mz, 3), tensor_power(qubit_state(StateLabel::MinusX), 3));
  EXPECT_NEAR(negative.real(), -kCubeOverlap, 1e-15);
}

TEST(TensorPower, OverlapIsMultiplicativeForRandomPairs) {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_state(1, rng);
    const auto b = oracle::random_state(1, rng);
    const Complex single = overlap(a, b);
    for (int m = 1; m <= 5; ++m) {
      const Complex power = overlap(tensor_power(a, m), tensor_power(b, m));
      EXPECT_LE(std::abs(power - std::pow(single, m)), 1e-12) << "trial " << trial << " m " << m;
    }
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = oracle::random_state(2, rng);
    const auto b = oracle::random_state(2, rng);
    const Complex single = overlap(a, b);
    for (int m = 1; m <= 3; ++m)
      EXPECT_LE(std::abs(overlap(tensor_power(a, m), tensor_power(b, m)) - std::pow(single, m)),
                1e-12);
  }
}

TEST(TensorPower, RefusesRegistersBeyondLimit) {
  EXPECT_THROW(tensor_power(qubit_state(StateLabel::PlusX), kMaxQubits + 1), std::invalid_argument);
}

TEST(Filter, PassProbabilityForSpecificPair) {
  // chi = 1/sqrt2 pair from the equator parametrization (beta = pi/4).
  const auto s0 = equator_state(std::numbers::pi / 4);
  const auto s1 = equator_state(-std::numbers::pi / 4);
  const LinearOperator f = build_filter(s0, s1);
  EXPECT_NEAR((f * s0.amplitudes()).squaredNorm(), 0.29289321881345254, 1e-12);
  EXPECT_NEAR((f * s1.amplitudes()).squaredNorm(), 0.29289321881345254, 1e-12);
}

TEST(Filter, OrthogonalPairGivesUnitary) {
  const auto s0 = equator_state(std::numbers::pi / 2);
  const auto s1 = equator_state(-std::numbers::pi / 2);
  const LinearOperator f = build_filter(s0, s1);
  EXPECT_TRUE((f.adjoint() * f).isApprox(LinearOperator::Identity(2, 2), 1e-12));
  EXPECT_NEAR((f * s0.amplitudes()).squaredNorm(), 1.0, 1e-12);
}

TEST(Filter, SigmaXAfterFilterIsDeterministic) {
  const auto s0 = equator_state(std::numbers::pi / 4);
  const auto s1 = equator_state(-std::numbers::pi / 4);
  const LinearOperator f = build_filter(s0, s1);
  const StateVector passed0(f * s0.amplitudes());
  const StateVector passed1(f * s1.amplitudes());
  EXPECT_NEAR(pauli_plus_probability(passed0, PauliAxis::X), 1.0, 1e-12);
  EXPECT_NEAR(pauli_plus_probability(passed1, PauliAxis::X), 0.0, 1e-12);
}

TEST(Filter, PropertyOverChiGrid) {
  for (int step = 0; step <= 9; ++step) {
    const double chi = 0.1 * step;
    const double beta = std::acos(chi);
    const auto s0 = equator_state(beta);
    const auto s1 = equator_state(-beta);
    const LinearOperator f = build_filter(s0, s1);

    const Eigen::VectorXd contraction = hermitian_eigenvalues(f.adjoint() * f);
    EXPECT_LE(contraction.maxCoeff(), 1.0 + 1e-12) << "chi " << chi;
    EXPECT_GE(contraction.minCoeff(), -1e-12);

    for (const auto* input : {&s0, &s1}) {
      const Eigen::VectorXcd out = f * input->amplitudes();
      const double pass = out.squaredNorm();
      EXPECT_NEAR(pass, 1.0 - chi, 1e-12) << "chi " << chi;
      const double plus = std::norm(qubit_state(StateLabel::PlusX).amplitudes().dot(out)) / pass;
      const double error = input == &s0 ? 1.0 - plus : plus;
      EXPECT_LE(error, 1e-12) << "chi " << chi;
    }
  }
}

TEST(Filter, WorksForArbitraryPairs) {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s0 = oracle::random_state(1, rng);
    const auto s1 = oracle::random_state(1, rng);
    const double chi = std::abs(overlap(s0, s1));
    const LinearOperator f = build_filter(s0, s1);
    EXPECT_NEAR((f * s0.amplitudes()).squaredNorm(), 1.0 - chi, 1e-12);
    EXPECT_NEAR((f * s1.amplitudes()).squaredNorm(), 1.0 - chi, 1e-12);
    EXPECT_LE(hermitian_eigenvalues(f.adjoint() * f).maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(Filter, IdenticalStatesAreDegenerate) {
  const auto s = equator_state(0.4);
  EXPECT_THROW(build_filter(s, s), DegenerateInputError);
  EXPECT_THROW(build_filter(s, tensor_power(s, 2)), std::invalid_argument);
}

TEST(MeasurePauli, DeterministicCases) {
  const auto px = qubit_state(StateLabel::PlusX);
  EXPECT_NEAR(pauli_plus_probability(px, PauliAxis::X), 1.0, 1e-15);
  for (double u : {0.0, 0.5, 0.999999}) EXPECT_EQ(measure_pauli(px, PauliAxis::X, u).outcome, +1);

  EXPECT_NEAR(pauli_plus_probability(px, PauliAxis::Z), 0.5, 1e-15);
  EXPECT_EQ(measure_pauli(px, PauliAxis::Z, 0.49).outcome, +1);
  EXPECT_EQ(measure_pauli(px, PauliAxis::Z, 0.51).outcome, -1);

  const auto mz = qubit_state(StateLabel::MinusZ);
  for (double u : {0.0, 0.5, 0.999999}) {
    const auto result = measure_pauli(mz, PauliAxis::Z, u);
    EXPECT_EQ(result.outcome, -1);
    EXPECT_NEAR(std::abs(overlap(result.post_state, mz)), 1.0, 1e-15);
  }
}

TEST(MeasurePauli, FrequenciesMatchBornRule) {
  SplitMix64 state_rng(77);
  SplitMix64 rng(78);
  constexpr int kSamples = 1'000'000;
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = oracle::random_state(1, state_rng);
    for (auto axis : {PauliAxis::X, PauliAxis::Z}) {
      const double p = pauli_plus_probability(s, axis);
      int plus = 0;
      for (int i = 0; i < kSamples; ++i) plus += measure_pauli(s, axis, rng.uniform()).outcome > 0;
      const double freq = static_cast<double>(plus) / kSamples;
      const double se = std::sqrt(p * (1.0 - p) / kSamples);
      EXPECT_LE(std::abs(freq - p), 4.0 * se + 1e-12) << "p " << p;
    }
  }
}

TEST(Gram, OrthogonalStatesGiveIdentity) {
  std::vector<StateVector> states = {qubit_state(StateLabel::PlusZ), qubit_state(StateLabel::MinusZ)};
  EXPECT_TRUE(gram_matrix(states).isApprox(Eigen::MatrixXcd::Identity(2, 2), 1e-15));
}

TEST(Gram, ThreePhotonCycleStructure) {
  const auto states = product_states(3);
  const Eigen::MatrixXcd g = gram_matrix(states);
  EXPECT_TRUE(g.isApprox(g.adjoint(), 1e-15));

  int negative_edges = 0;
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(g(i, i).real(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(g(i, (i + 2) % 4)), 0.0, 1e-15);  // +z/-z and +x/-x
    const Complex edge = g(i, (i + 1) % 4);
    EXPECT_NEAR(std::abs(edge), kCubeOverlap, 1e-14);
    negative_edges += edge.real() < 0.0;
  }
  EXPECT_EQ(negative_edges, 1);

  const Eigen::VectorXd eig = hermitian_eigenvalues(g);
  EXPECT_NEAR(eig(0), 0.5, 1e-12);
  EXPECT_NEAR(eig(1), 0.5, 1e-12);
  EXPECT_NEAR(eig(2), 1.5, 1e-12);
  EXPECT_NEAR(eig(3), 1.5, 1e-12);
  EXPECT_NEAR(g.determinant().real(), 9.0 / 16.0, 1e-12);
}

TEST(Usd, ThreePhotonStatesGiveHalf) {
  const auto states = product_states(3);
  const UsdResult usd = build_usd_povm(states);
  EXPECT_NEAR(usd.p_ok, 0.5, 1e-12);
  ASSERT_EQ(usd.povm.elements().size(), 5u);
  EXPECT_TRUE(usd.povm.elements().back().inconclusive());
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double p = usd.povm.probability(i, states[j]);
      if (i == j) EXPECT_NEAR(p, usd.p_ok, 1e-10);
      else EXPECT_LE(std::abs(p), 1e-10);
    }
  }
  EXPECT_LE(usd.povm.completeness_residual(), 1e-10);
  EXPECT_GE(usd.povm.min_eigenvalue(), -1e-10);
  // The inconclusive remainder sits exactly at the edge of positivity.
  EXPECT_NEAR(hermitian_eigenvalues(usd.povm.elements().back().op).minCoeff(), 0.0, 1e-10);
}

TEST(Usd, TwoStateBound) {
  const double chi = kCubeOverlap;
  const double beta = std::acos(chi);
  std::vector<StateVector> states = {equator_state(beta), equator_state(-beta)};
  const UsdResult usd = build_usd_povm(states);
  EXPECT_NEAR(usd.p_ok, 0.6464466094067263, 1e-12);
}

TEST(Usd, OrthonormalInputIsPerfect) {
  std::vector<StateVector> states;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(k) = 1.0;
    states.emplace_back(v);
  }
  const UsdResult usd = build_usd_povm(states);
  EXPECT_NEAR(usd.p_ok, 1.0, 1e-12);
  Eigen::MatrixXcd complement = Eigen::MatrixXcd::Zero(4, 4);
  complement(3, 3) = 1.0;
  EXPECT_LT((usd.povm.elements().back().op - complement).norm(), 1e-12);
}

TEST(Usd, TwoPhotonStatesAreLinearlyDependent) {
  const auto states = product_states(2);
  const Eigen::VectorXd eig = hermitian_eigenvalues(gram_matrix(states));
  EXPECT_NEAR(eig(0), 0.0, 1e-12);
  EXPECT_GT(eig(1), 1e-3);  // rank 3
  EXPECT_THROW(build_usd_povm(states), LinearDependenceError);
}

TEST(Usd, PropertyOnRandomIndependentSets) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int qubits = 1 + trial % 3;
    const int count = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(1 << qubits));
    std::vector<StateVector> states;
    for (int k = 0; k < count; ++k) states.push_back(oracle::random_state(qubits, rng));
    if (hermitian_eigenvalues(gram_matrix(states)).minCoeff() <= 1e-6) continue;

    const UsdResult usd = build_usd_povm(states);
    EXPECT_LE(usd.povm.completeness_residual(), 1e-10);
    EXPECT_GE(usd.povm.min_eigenvalue(), -1e-10);
    EXPECT_LE(usd.povm.hermiticity_residual(), 1e-10);
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < count; ++j) {
        const double p = usd.povm.probability(static_cast<std::size_t>(i), states[j]);
        if (i == j) EXPECT_NEAR(p, usd.p_ok, 1e-10);
        else EXPECT_LE(std::abs(p), 1e-10);
      }
  }
}

TEST(Povm, RejectsInvalidElementSets) {
  Eigen::MatrixXcd half = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_THROW(Povm({{0, half}}), std::invalid_argument);  // incomplete

  Eigen::MatrixXcd negative = Eigen::MatrixXcd::Zero(2, 2);
  negative(0, 0) = -0.5;
  Eigen::MatrixXcd rest = Eigen::MatrixXcd::Identity(2, 2) - negative;
  EXPECT_THROW(Povm({{0, negative}, {std::nullopt, rest}}), std::invalid_argument);

  Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(2, 2);
  skew(0, 1) = 0.1;
  EXPECT_THROW(Povm({{0, half + skew}, {std::nullopt, half - skew}}), std::invalid_argument);
  EXPECT_THROW(Povm({}), std::invalid_argument);
}
