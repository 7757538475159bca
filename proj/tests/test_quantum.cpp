#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nearmark/errors.hpp"
#include "nearmark/quantum.hpp"
#include "nearmark/sampling.hpp"
#include "oracles.hpp"

using namespace nearmark;

namespace {

DensityMatrix random_state(int dim, std::uint64_t index, int ancilla = 0) {
  Rng rng = cell_rng(99, StreamKind::misc, index);
  return induced_density_matrix(dim, ancilla > 0 ? ancilla : dim, rng);
}

DensityMatrix random_two_qubit(std::uint64_t index) {
  Rng rng = cell_rng(99, StreamKind::misc, index);
  return DensityMatrix({2, 2}, induced_density_matrix(4, 4, rng).matrix());
}

}  // namespace

TEST(DensityMatrixTest, RejectsNonHermitian) {
  Eigen::MatrixXcd m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityMatrix({2}, m), InvalidState);
}

TEST(DensityMatrixTest, RejectsWrongTraceAndNegativeEigenvalue) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_THROW(DensityMatrix({2}, m), InvalidState);
  Eigen::MatrixXcd n(2, 2);
  n << 1.2, 0.0, 0.0, -0.2;
  EXPECT_THROW(DensityMatrix({2}, n), InvalidState);
}

TEST(DensityMatrixTest, RejectsDimensionMismatchAndOversize) {
  EXPECT_ANY_THROW(DensityMatrix({2, 2}, Eigen::MatrixXcd::Identity(2, 2) / 2.0));
  EXPECT_ANY_THROW(DensityMatrix::maximally_mixed({2, 2, 2, 2, 2, 2, 2}));
}

TEST(DensityMatrixTest, AcceptsJitterWithinTolerance) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0 + 5e-12, 0.0, 0.0, -5e-12;
  EXPECT_NO_THROW(DensityMatrix({2}, m));
}

TEST(DensityMatrixTest, MaximallyMixedPurity) {
  EXPECT_NEAR(DensityMatrix::maximally_mixed({2, 2}).purity(), 0.25, 1e-15);
  EXPECT_NEAR(DensityMatrix::basis_state({2}, 1).purity(), 1.0, 1e-15);
}

TEST(PureStateTest, NormIsChecked) {
  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(PureState({2}, v), InvalidState);
  EXPECT_NO_THROW(PureState({2}, v / std::sqrt(2.0)));
}

TEST(KronTest, OrderingPutsFirstSubsystemMostSignificant) {
  const DensityMatrix a = DensityMatrix::basis_state({2}, 1);
  const DensityMatrix b = DensityMatrix::basis_state({2}, 0);
  const DensityMatrix ab = tensor(a, b);
  EXPECT_EQ(ab.dims(), (Dims{2, 2}));
  EXPECT_NEAR(ab.matrix()(2, 2).real(), 1.0, 1e-15);
}

TEST(PartialTraceTest, MatchesExplicitLoopOracle) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    Rng rng = cell_rng(5, StreamKind::misc, k);
    const DensityMatrix rho({2, 3}, induced_density_matrix(6, 6, rng).matrix());
    const Eigen::MatrixXcd a = oracle::partial_trace_second(rho.matrix(), 2, 3);
    const Eigen::MatrixXcd b = oracle::partial_trace_first(rho.matrix(), 2, 3);
    EXPECT_LT((partial_trace(rho, {0}).matrix() - a).norm(), 1e-13);
    EXPECT_LT((partial_trace(rho, {1}).matrix() - b).norm(), 1e-13);
  }
}

TEST(PartialTraceTest, ProductStateRoundTrip) {
  const DensityMatrix a = random_state(2, 1);
  const DensityMatrix b = random_state(2, 2);
  EXPECT_LT((partial_trace(tensor(a, b), {0}).matrix() - a.matrix()).norm(), 1e-13);
  EXPECT_LT((partial_trace(tensor(a, b), {1}).matrix() - b.matrix()).norm(), 1e-13);
}

TEST(PartialTraceTest, RejectsBadIndices) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed({2, 2});
  EXPECT_THROW(partial_trace(rho, {2}), PartitionError);
}

TEST(EntropyTest, KnownValues) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed({2, 2})), 2.0, 1e-13);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::basis_state({2}, 0)), 0.0, 1e-13);
  EXPECT_NEAR(binary_entropy(0.5), 1.0, 1e-15);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
}

TEST(EntropyTest, MatchesEigenvalueOracle) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    const DensityMatrix rho = random_state(4, k);
    EXPECT_NEAR(von_neumann_entropy(rho), oracle::entropy_bits(rho.matrix()), 1e-12);
  }
}

TEST(MutualInformationTest, BellStateIsTwoBits) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix bell = PureState({2, 2}, psi).projector();
  EXPECT_NEAR(quantum_mutual_information(bell), 2.0, 1e-12);
}

TEST(MutualInformationTest, ProductStateIsZeroAndBoundsHold) {
  EXPECT_NEAR(quantum_mutual_information(tensor(random_state(2, 3), random_state(2, 4))), 0.0, 1e-12);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const DensityMatrix rho = random_two_qubit(k);
    const double i = quantum_mutual_information(rho);
    EXPECT_GE(i, -1e-12);
    EXPECT_LE(i, 2.0 + 1e-12);
  }
}

TEST(MutualInformationTest, RejectsBadCut) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed({2, 2});
  EXPECT_THROW(quantum_mutual_information(rho, 0), PartitionError);
  EXPECT_THROW(quantum_mutual_information(rho, 2), PartitionError);
}

TEST(TraceDistanceTest, OrthogonalStatesReachTwo) {
  EXPECT_NEAR(trace_distance(DensityMatrix::basis_state({2}, 0), DensityMatrix::basis_state({2}, 1)), 2.0, 1e-14);
}

TEST(TraceDistanceTest, MatchesEigenvalueOracleAndMetricAxioms) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    const DensityMatrix a = random_state(2, 3 * k);
    const DensityMatrix b = random_state(2, 3 * k + 1);
    const DensityMatrix c = random_state(2, 3 * k + 2);
    const double ab = trace_distance(a, b);
    EXPECT_NEAR(ab, oracle::trace_norm(a.matrix() - b.matrix()), 1e-12);
    EXPECT_NEAR(ab, trace_distance(b, a), 1e-14);
    EXPECT_LE(ab, trace_distance(a, c) + trace_distance(c, b) + 1e-12);
    EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-14);
  }
}

TEST(TraceDistanceTest, FourDimensionalMatchesOracle) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const DensityMatrix a = random_two_qubit(2 * k);
    const DensityMatrix b = random_two_qubit(2 * k + 1);
    EXPECT_NEAR(trace_distance(a, b), oracle::trace_norm(a.matrix() - b.matrix()), 1e-12);
  }
}

TEST(RelativeEntropyTest, SupportViolationIsInfinite) {
  EXPECT_TRUE(std::isinf(relative_entropy(DensityMatrix::basis_state({2}, 0), DensityMatrix::basis_state({2}, 1))));
}

TEST(RelativeEntropyTest, MatchesOracleAndIsNonNegative) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const DensityMatrix a = random_state(2, 2 * k);
    const DensityMatrix b = random_state(2, 2 * k + 1);
    const double d = relative_entropy(a, b);
    EXPECT_GE(d, -1e-12);
    EXPECT_NEAR(d, oracle::relative_entropy_bits(a.matrix(), b.matrix()), 1e-10);
  }
}

TEST(RelativeEntropyTest, MaximallyMixedReferenceIsEntropyGap) {
  const DensityMatrix rho = random_state(2, 11);
  EXPECT_NEAR(relative_entropy(rho, DensityMatrix::maximally_mixed({2})), 1.0 - von_neumann_entropy(rho), 1e-12);
}

TEST(KrausTest, IdentityChannelLeavesStateUnchanged) {
  const DensityMatrix rho = random_state(2, 7);
  EXPECT_LT((apply_kraus(rho, identity_channel(2)).matrix() - rho.matrix()).norm(), 1e-15);
}

TEST(KrausTest, IncompleteKrausSetIsRejected) {
  ChannelSnapshot bad;
  bad.kraus = {Eigen::MatrixXcd::Identity(2, 2) * 0.9};
  EXPECT_THROW(apply_kraus(DensityMatrix::basis_state({2}, 0), bad), InvalidChannel);
}

TEST(KrausTest, TransferMatrixActsOnColumnMajorVec) {
  ChannelSnapshot ch;
  Eigen::MatrixXcd k0(2, 2), k1(2, 2);
  k0 << 1.0, 0.0, 0.0, std::sqrt(0.3);
  k1 << 0.0, std::sqrt(0.7), 0.0, 0.0;
  ch.kraus = {k0, k1};
  const DensityMatrix rho = random_state(2, 9);
  const Eigen::MatrixXcd out = apply_kraus(rho, ch).matrix();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.matrix().data(), 4);
  Eigen::VectorXcd w = transfer_matrix(ch) * v;
  EXPECT_LT((Eigen::Map<Eigen::MatrixXcd>(w.data(), 2, 2) - out).norm(), 1e-14);
  // Kraus reconstruction from the transfer matrix gives the same map.
  ChannelSnapshot back;
  back.kraus = kraus_from_transfer(transfer_matrix(ch), 2, 2);
  EXPECT_LT((apply_kraus(rho, back).matrix() - out).norm(), 1e-12);
}

TEST(ChoiTest, IdentityGivesMaximallyEntangledProjector) {
  const DensityMatrix j = choi_state(identity_channel(2));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  EXPECT_LT((j.matrix() - psi * psi.adjoint()).norm(), 1e-14);
  EXPECT_LT((choi_from_transfer(transfer_matrix(identity_channel(2)), 2, 2) - 2.0 * j.matrix()).norm(), 1e-14);
}

TEST(PartialTransposeTest, BellStateHasNegativeEigenvalue) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix bell = PureState({2, 2}, psi).projector();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(partial_transpose(bell, 1));
  EXPECT_NEAR(es.eigenvalues().minCoeff(), -0.5, 1e-14);
}

TEST(BlochTest, RoundTripAndConvention) {
  const DensityMatrix plus = qubit_from_bloch(Eigen::Vector3d(1.0, 0.0, 0.0));
  EXPECT_NEAR(plus.matrix()(0, 1).real(), 0.5, 1e-15);
  const Eigen::Vector3d z = bloch_vector(DensityMatrix::basis_state({2}, 0));
  EXPECT_NEAR(z(2), 1.0, 1e-15);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const DensityMatrix rho = random_state(2, k);
    EXPECT_LT((qubit_from_bloch(bloch_vector(rho)).matrix() - rho.matrix()).norm(), 1e-14);
  }
}
