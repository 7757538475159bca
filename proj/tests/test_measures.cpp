#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "nearmark/errors.hpp"
#include "nearmark/measures.hpp"
#include "oracles.hpp"

using namespace nearmark;

namespace {

SampleConfig small_config(std::uint64_t seed, int maps, int states) {
  SampleConfig c;
  c.seed = seed;
  c.n_maps = maps;
  c.n_states = states;
  return c;
}

CandidateSet with_members(std::vector<ChannelFamily> members) {
  CandidateSet set;
  set.members = std::move(members);
  return set;
}

// min over candidates of max (or min) over states, written as a plain double loop.
double brute_force(const ChannelFamily& probe, double t, const CandidateSet& cands,
                   const std::vector<DensityMatrix>& states, bool maximise) {
  const auto pk = snapshot(probe, t).kraus;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands.members) {
    const auto ck = snapshot(c, t).kraus;
    double inner = maximise ? -1.0 : std::numeric_limits<double>::infinity();
    for (const auto& rho : states) {
      const double d = oracle::trace_norm(oracle::apply_kraus(pk, rho.matrix()) - oracle::apply_kraus(ck, rho.matrix()));
      inner = maximise ? std::max(inner, d) : std::min(inner, d);
    }
    best = std::min(best, inner);
  }
  return best;
}

Eigen::MatrixXcd choi_oracle(const std::vector<Eigen::MatrixXcd>& kraus) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(4, 4);
  for (const auto& k : kraus) {
    const Eigen::MatrixXcd ik = oracle::kron(Eigen::MatrixXcd::Identity(2, 2), k);
    out += ik * psi * psi.adjoint() * ik.adjoint();
  }
  return out;
}

}  // namespace

TEST(MeasureTest, DivisibleProbeInOwnCandidateSetGivesZero) {
  const AmplitudeDampingFamily probe(1.0, 4.0);
  const CandidateSet cands = make_divisible_candidates(probe, small_config(3, 20, 30), 5.0);
  ASSERT_EQ(std::get<AmplitudeDampingFamily>(cands.members.back()), probe);
  const auto states = sample_qubit_states(small_config(3, 20, 30));
  for (double t : uniform_grid(0.0, 5.0, 11)) {
    EXPECT_LT(max_distance_measure(probe, t, cands, states).value, 1e-9);
    EXPECT_LT(min_distance_measure(probe, t, cands, states).value, 1e-9);
    EXPECT_LT(cjks_measure(probe, t, cands).value, 1e-9);
  }
}

TEST(MeasureTest, AllMapsAreIdentityAtTimeZero) {
  const AmplitudeDampingFamily probe(10.0, 4.0);
  const CandidateSet cands = make_divisible_candidates(probe, small_config(5, 10, 10), 2.0);
  EXPECT_NEAR(cjks_measure(probe, 0.0, cands).value, 0.0, 1e-14);
}

TEST(MeasureTest, MatchesBruteForceAtFullDampingTime) {
  const AmplitudeDampingFamily probe(4.0, 4.0);
  const double t = 3.0 * std::numbers::pi / 8.0;
  const SampleConfig cfg = small_config(11, 40, 60);
  const CandidateSet cands = make_divisible_candidates(probe, cfg, t);
  const auto states = sample_qubit_states(cfg);
  EXPECT_NEAR(max_distance_measure(probe, t, cands, states).value, brute_force(probe, t, cands, states, true), 1e-12);
  EXPECT_NEAR(min_distance_measure(probe, t, cands, states).value, brute_force(probe, t, cands, states, false), 1e-12);
}

TEST(MeasureTest, ExtremalStateAndCandidateAreReported) {
  const AmplitudeDampingFamily probe(4.0, 4.0);
  const SampleConfig cfg = small_config(12, 15, 25);
  const CandidateSet cands = make_divisible_candidates(probe, cfg, 2.0);
  const auto states = sample_qubit_states(cfg);
  const MeasureResult r = max_distance_measure(probe, 1.0, cands, states);
  ASSERT_TRUE(r.state_index.has_value());
  ASSERT_TRUE(r.probe_state.has_value());
  const auto& c = cands.members[r.candidate_index];
  const double d = trace_distance(apply_kraus(states[*r.state_index], snapshot(probe, 1.0)),
                                  apply_kraus(states[*r.state_index], snapshot(c, 1.0)));
  EXPECT_NEAR(d, r.value, 1e-12);
  EXPECT_DOUBLE_EQ(r.argmin_parameter, family_parameter(c));
  EXPECT_FALSE(cjks_measure(probe, 1.0, cands).probe_state.has_value());
}

TEST(MeasureTest, CjksEqualsChoiStateDistance) {
  const AmplitudeDampingFamily probe(10.0, 4.0);
  const CandidateSet cands = make_divisible_candidates(probe, small_config(13, 25, 1), 3.0);
  for (double t : {0.2, 0.9, 2.1}) {
    double expect = std::numeric_limits<double>::infinity();
    const Eigen::MatrixXcd jp = choi_oracle(snapshot(probe, t).kraus);
    for (const auto& c : cands.members) expect = std::min(expect, oracle::trace_norm(jp - choi_oracle(snapshot(c, t).kraus)));
    EXPECT_NEAR(cjks_measure(probe, t, cands).value, expect, 1e-12);
  }
}

TEST(MeasureTest, MonotoneUnderSetRefinement) {
  const PhaseDampingFamily probe(2.8, 1.0);
  const SampleConfig cfg = small_config(14, 40, 60);
  const CandidateSet big = make_divisible_candidates(probe, cfg, 6.0);
  CandidateSet small = big;
  small.members.erase(small.members.begin() + 15, small.members.end());
  const auto states = sample_qubit_states(cfg);
  const std::vector<DensityMatrix> few(states.begin(), states.begin() + 20);
  for (double t : {1.0, 3.0, 5.0}) {
    EXPECT_LE(max_distance_measure(probe, t, big, states).value, max_distance_measure(probe, t, small, states).value);
    EXPECT_LE(min_distance_measure(probe, t, big, states).value, min_distance_measure(probe, t, small, states).value);
    EXPECT_GE(max_distance_measure(probe, t, big, states).value, max_distance_measure(probe, t, big, few).value);
  }
}

TEST(MeasureTest, MinNeverExceedsMaxAndValuesInRange) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    Rng rng = cell_rng(77, StreamKind::misc, k);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ChannelFamily probe = (k % 2 == 0) ? ChannelFamily(AmplitudeDampingFamily(1.0 + 9.0 * u(rng), 4.0))
                                             : ChannelFamily(PhaseDampingFamily(0.5 + 2.5 * u(rng), 1.0));
    const double t = 5.0 * u(rng);
    const SampleConfig cfg = small_config(100 + k, 8, 12);
    const CandidateSet cands = make_divisible_candidates(probe, cfg, 5.0);
    const auto states = sample_qubit_states(cfg);
    const double mx = max_distance_measure(probe, t, cands, states).value;
    const double mn = min_distance_measure(probe, t, cands, states).value;
    EXPECT_LE(mn, mx);
    EXPECT_GE(mn, -1e-9);
    EXPECT_LE(mx, 2.0);
  }
}

TEST(MeasureTest, DataProcessingAgainstDilation) {
  const AmplitudeDampingFamily probe(4.0, 4.0);
  const SampleConfig cfg = small_config(15, 10, 10);
  const CandidateSet cands = make_divisible_candidates(probe, cfg, 3.0);
  const auto states = sample_qubit_states(cfg);
  int cells = 0;
  for (std::size_t j = 0; j < cands.members.size() && cells < 100; ++j) {
    const auto& c = std::get<AmplitudeDampingFamily>(cands.members[j]);
    for (const auto& rho : states) {
      const double t = 0.3 * static_cast<double>(cells % 10);
      const double ds = trace_distance(apply_kraus(rho, ad_snapshot(probe, t)), apply_kraus(rho, ad_snapshot(c, t)));
      const double dse = trace_distance(ad_dilation(probe, t, rho), ad_dilation(c, t, rho));
      EXPECT_LE(ds, dse + 1e-12);
      ++cells;
    }
  }
  EXPECT_EQ(cells, 100);
}

TEST(MeasureTest, ThreadCountDoesNotChangeResults) {
  const AmplitudeDampingFamily probe(4.0, 4.0);
  const SampleConfig cfg = small_config(16, 30, 30);
  const CandidateSet cands = make_divisible_candidates(probe, cfg, 3.0);
  const auto states = sample_qubit_states(cfg);
  MeasureOptions one, four;
  one.threads = 1;
  four.threads = 4;
  for (double t : {0.5, 1.5}) {
    const auto a = max_distance_measure(probe, t, cands, states, one);
    const auto b = max_distance_measure(probe, t, cands, states, four);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.candidate_index, b.candidate_index);
    EXPECT_EQ(a.state_index, b.state_index);
  }
}

TEST(MeasureTest, EmptySetsAreConfigurationErrors) {
  const AmplitudeDampingFamily probe(4.0, 4.0);
  const auto states = sample_qubit_states(small_config(1, 1, 3));
  EXPECT_THROW(max_distance_measure(probe, 1.0, with_members({}), states), ConfigError);
  EXPECT_THROW(cjks_measure(probe, 1.0, with_members({})), ConfigError);
  EXPECT_THROW(min_distance_measure(probe, 1.0, with_members({probe}), {}), ConfigError);
}

TEST(MeasureTest, RelativeEntropyBackendIsNonNegative) {
  const PhaseDampingFamily probe(2.5, 1.0);
  const SampleConfig cfg = small_config(18, 10, 10);
  const CandidateSet cands = make_divisible_candidates(probe, cfg, 4.0);
  const auto states = sample_qubit_states(cfg);
  MeasureOptions opts;
  opts.backend = DistanceBackend::relative_entropy;
  const auto r = max_distance_measure(probe, 2.0, cands, states, opts);
  EXPECT_GE(r.value, -1e-9);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(MeasureTest, ParsersRejectUnknownNames) {
  EXPECT_EQ(parse_mode("cjks"), MeasureMode::cjks);
  EXPECT_EQ(parse_backend("relative_entropy"), DistanceBackend::relative_entropy);
  EXPECT_THROW(parse_mode("median"), ConfigError);
  EXPECT_THROW(parse_backend("bures"), ConfigError);
}

TEST(CandidateTest, CollisionCandidatesStayWithinBudget) {
  const CandidateSet cands = make_collision_candidates(1.0, small_config(19, 5, 1), 0.1, 20);
  EXPECT_EQ(cands.members.size(), 5u);
  EXPECT_TRUE(certify(cands, 2.0));
  for (const auto& m : cands.members) {
    EXPECT_GT(family_parameter(m), 0.0);
    EXPECT_LE(family_parameter(m), 1.0);
  }
  EXPECT_THROW(make_collision_candidates(0.0, small_config(19, 5, 1), 0.1, 20), ConfigError);
}

TEST(CandidateTest, NonDivisibleMemberFailsCertification) {
  CandidateSet set = with_members({AmplitudeDampingFamily(4.0, 4.0)});
  EXPECT_FALSE(certify(set, 5.0));
}
