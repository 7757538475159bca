#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nearmark/channels.hpp"
#include "nearmark/errors.hpp"
#include "nearmark/sampling.hpp"
#include "oracles.hpp"

using namespace nearmark;

namespace {

std::vector<DensityMatrix> inputs(int n, std::uint64_t seed) {
  SampleConfig cfg;
  cfg.seed = seed;
  cfg.n_states = n;
  return sample_qubit_states(cfg);
}

}  // namespace

TEST(AmplitudeDampingTest, ParameterValidation) {
  EXPECT_THROW(AmplitudeDampingFamily(0.0, 1.0), RangeError);
  EXPECT_THROW(AmplitudeDampingFamily(1.0, -1.0), RangeError);
  EXPECT_TRUE(AmplitudeDampingFamily(4.0, 4.0).g_is_imaginary());
  EXPECT_FALSE(AmplitudeDampingFamily(1.0, 4.0).g_is_imaginary());
}

TEST(AmplitudeDampingTest, RateAtOriginAndDivisibleRegimeIsNonNegative) {
  const AmplitudeDampingFamily fam(1.0, 4.0);
  EXPECT_NEAR(ad_decay_rate(fam, 0.0), 0.0, 1e-15);
  for (double t : uniform_grid(0.0, 20.0, 400)) EXPECT_GE(ad_decay_rate(fam, t), 0.0);
}

TEST(AmplitudeDampingTest, RateMatchesLogDerivativeOfKernelOracle) {
  for (const auto& fam : {AmplitudeDampingFamily(1.0, 4.0), AmplitudeDampingFamily(4.0, 4.0)}) {
    for (double t : {0.1, 0.5, 0.9}) {
      const double h = 1e-4;
      const double gp = oracle::ad_G_kernel_rk4(fam.gamma0, fam.lambda, t + h);
      const double gm = oracle::ad_G_kernel_rk4(fam.gamma0, fam.lambda, t - h);
      const double g0 = oracle::ad_G_kernel_rk4(fam.gamma0, fam.lambda, t);
      const double rate = -2.0 * (gp - gm) / (2.0 * h) / g0;
      EXPECT_NEAR(ad_decay_rate(fam, t), rate, 1e-6);
    }
  }
}

TEST(AmplitudeDampingTest, FirstPoleAtFullDampingTime) {
  // lambda = gamma0 = 4: G = exp(-2t)(cos 2t + sin 2t) first vanishes at t = 3 pi / 8.
  const AmplitudeDampingFamily fam(4.0, 4.0);
  const auto poles = ad_rate_poles(fam, 5.0);
  ASSERT_FALSE(poles.empty());
  EXPECT_NEAR(poles.front(), 3.0 * std::numbers::pi / 8.0, 1e-12);
  EXPECT_NEAR(std::real(ad_decoherence_function(fam, poles.front())), 0.0, 1e-12);
  EXPECT_THROW(ad_decay_rate(fam, poles.front()), PoleError);
  try {
    ad_decay_rate(fam, poles.front());
  } catch (const PoleError& e) {
    EXPECT_NEAR(e.pole(), poles.front(), 1e-12);
  }
}

TEST(AmplitudeDampingTest, DecoherenceFunctionMatchesKernelOracle) {
  for (const auto& fam : {AmplitudeDampingFamily(1.0, 4.0), AmplitudeDampingFamily(4.0, 4.0),
                          AmplitudeDampingFamily(10.0, 4.0), AmplitudeDampingFamily(0.3, 1.0)}) {
    for (double t : uniform_grid(0.0, 5.0, 11)) {
      const cplx g = ad_decoherence_function(fam, t);
      EXPECT_NEAR(g.imag(), 0.0, 1e-12);
      EXPECT_NEAR(g.real(), oracle::ad_G_kernel_rk4(fam.gamma0, fam.lambda, t), 1e-9);
    }
  }
}

TEST(AmplitudeDampingTest, SnapshotMatchesMasterEquationBeforeFirstPole) {
  const AmplitudeDampingFamily fam(4.0, 4.0);
  const double t = 1.0;  // before 3 pi / 8
  const auto rate = [&](double u) { return ad_decay_rate(fam, u); };
  for (const auto& rho : inputs(5, 3)) {
    const Eigen::Matrix2cd expect = oracle::ad_master_rk4(rate, rho.matrix(), t);
    EXPECT_LT(oracle::trace_norm(apply_kraus(rho, ad_snapshot(fam, t)).matrix() - expect), 1e-9);
  }
}

TEST(AmplitudeDampingTest, SnapshotIsTracePreservingAtT0IsIdentity) {
  const AmplitudeDampingFamily fam(10.0, 4.0);
  for (double t : uniform_grid(0.0, 5.0, 50)) EXPECT_LT(ad_snapshot(fam, t).completeness_error(), 1e-12);
  const DensityMatrix rho = inputs(1, 4).front();
  EXPECT_LT((apply_kraus(rho, ad_snapshot(fam, 0.0)).matrix() - rho.matrix()).norm(), 1e-14);
}

TEST(AmplitudeDampingTest, DilationReducesToSnapshot) {
  const AmplitudeDampingFamily fam(4.0, 4.0);
  for (const auto& rho : inputs(5, 8)) {
    for (double t : {0.3, 1.5, 2.7}) {
      const DensityMatrix joint = ad_dilation(fam, t, rho);
      EXPECT_LT((partial_trace(joint, {0}).matrix() - apply_kraus(rho, ad_snapshot(fam, t)).matrix()).norm(), 1e-12);
    }
  }
}

TEST(PhaseDampingTest, ParameterValidation) {
  EXPECT_THROW(PhaseDampingFamily(0.0, 1.0), RangeError);
  EXPECT_THROW(PhaseDampingFamily(1.0, 0.0), RangeError);
}

TEST(PhaseDampingTest, RateMatchesDirectFormula) {
  for (double s : {0.5, 1.0, 2.5, 3.0}) {
    const PhaseDampingFamily fam(s, 1.3);
    for (double t : uniform_grid(0.0, 8.0, 17)) {
      EXPECT_NEAR(pd_dephasing_rate(fam, t), oracle::pd_rate(s, 1.3, t), 1e-12);
    }
  }
}

TEST(PhaseDampingTest, OhmicRateReducesToRational) {
  const PhaseDampingFamily fam(1.0, 2.0);
  for (double t : {0.1, 1.0, 4.0}) {
    const double x = 2.0 * t;
    EXPECT_NEAR(pd_dephasing_rate(fam, t), 4.0 * t / (1.0 + x * x), 1e-12);
    EXPECT_NEAR(pd_coherence_factor(fam, t), 1.0 / std::sqrt(1.0 + x * x), 1e-12);
  }
}

TEST(PhaseDampingTest, IntegratedRateMatchesQuadrature) {
  for (double s : {0.05, 0.5, 0.999999, 1.0, 1.000001, 1.5, 2.0, 2.5, 2.8, 3.0}) {
    const PhaseDampingFamily fam(s, 1.0);
    for (double t : uniform_grid(0.0, 10.0, 21)) {
      EXPECT_NEAR(pd_integrated_rate(fam, t), oracle::pd_integral_quadrature(s, 1.0, t), 1e-9) << "s=" << s;
    }
  }
}

TEST(PhaseDampingTest, FirstRateZeroForSuperOhmic) {
  const PhaseDampingFamily fam(2.5, 1.0);
  const double x0 = std::tan(std::numbers::pi / 2.5);
  EXPECT_NEAR(pd_dephasing_rate(fam, x0), 0.0, 1e-12);
  EXPECT_NEAR(oracle::pd_first_rate_zero(2.5, 1.0), x0, 1e-9);
}

TEST(PhaseDampingTest, DilationReducesToSnapshot) {
  const PhaseDampingFamily fam(2.8, 1.0);
  for (const auto& rho : inputs(5, 9)) {
    for (double t : {0.3, 2.0, 6.0}) {
      const DensityMatrix joint = pd_dilation(fam, t, rho);
      EXPECT_LT((partial_trace(joint, {0}).matrix() - apply_kraus(rho, pd_snapshot(fam, t)).matrix()).norm(), 1e-12);
    }
  }
}

TEST(DivisibilityTest, AmplitudeDampingThreshold) {
  const auto grid = uniform_grid(0.0, 20.0, 2000);
  EXPECT_TRUE(is_divisible(AmplitudeDampingFamily(1.0, 4.0), grid).divisible);
  EXPECT_TRUE(is_divisible(AmplitudeDampingFamily(1.99, 4.0), grid).divisible);
  const auto report = is_divisible(AmplitudeDampingFamily(4.0, 4.0), grid);
  EXPECT_FALSE(report.divisible);
  ASSERT_TRUE(report.first_violation.has_value());
  EXPECT_LE(*report.first_violation, 3.0 * std::numbers::pi / 8.0 + 0.011);
}

TEST(DivisibilityTest, AmplitudeDampingChoiCrossCheck) {
  const auto grid = uniform_grid(0.0, 5.0, 500);
  const auto good = is_divisible(AmplitudeDampingFamily(1.0, 4.0), grid);
  EXPECT_TRUE(good.choi_divisible);
  const auto bad = is_divisible(AmplitudeDampingFamily(4.0, 4.0), grid);
  EXPECT_FALSE(bad.choi_divisible);
  EXPECT_LT(bad.min_choi_eigenvalue, 0.0);
}

TEST(DivisibilityTest, PhaseDampingIffSuperTwo) {
  const auto grid = uniform_grid(0.0, 20.0, 2000);
  for (double s : {0.5, 1.0, 1.5, 1.9, 2.0}) EXPECT_TRUE(is_divisible(PhaseDampingFamily(s, 1.0), grid).divisible) << s;
  for (double s : {2.1, 2.5, 2.8, 3.0}) EXPECT_FALSE(is_divisible(PhaseDampingFamily(s, 1.0), grid).divisible) << s;
}

TEST(DivisibilityTest, GridMustHaveTwoPoints) { EXPECT_ANY_THROW(uniform_grid(0.0, 1.0, 1)); }

TEST(PhaseDampingTest, NumericalRateZeroMatchesOracle) {
  const auto z = pd_first_rate_zero(PhaseDampingFamily(2.5, 1.0), 10.0);
  ASSERT_TRUE(z.has_value());
  EXPECT_NEAR(*z, oracle::pd_first_rate_zero(2.5, 1.0), 1e-9);
  EXPECT_NEAR(*pd_first_rate_zero(PhaseDampingFamily(2.5, 2.0), 10.0), std::tan(std::numbers::pi / 2.5) / 2.0, 1e-9);
  EXPECT_FALSE(pd_first_rate_zero(PhaseDampingFamily(1.5, 1.0), 50.0).has_value());
}
