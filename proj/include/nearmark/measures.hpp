#pragma once

// Distance-based non-Markovianity estimators.
//
// For a probe map L and a candidate set C of (epsilon-)Markovian maps:
//   max-distance:  min_{c in C} max_{rho} D(L(rho), c(rho))
//   min-distance:  min_{c in C} min_{rho} D(L(rho), c(rho))
//   cjks:          min_{c in C} D((I x L)(Psi+), (I x c)(Psi+))
// where rho runs over a sampled set of input states and both maps are taken
// at the same time t. Ties go to the lowest candidate index and then to the
// lowest state index.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nearmark/channels.hpp"
#include "nearmark/collision.hpp"
#include "nearmark/quantum.hpp"
#include "nearmark/sampling.hpp"

namespace nearmark {

using ChannelFamily = std::variant<AmplitudeDampingFamily, PhaseDampingFamily, CollisionChannelFamily>;

ChannelSnapshot snapshot(const ChannelFamily& family, double t);
Eigen::MatrixXcd family_transfer(const ChannelFamily& family, double t);
FamilyTag family_tag(const ChannelFamily& family);
/// gamma0 for amplitude damping, s for phase damping, epsilon for collision maps.
double family_parameter(const ChannelFamily& family);

enum class MeasureMode { max, min, cjks };
enum class DistanceBackend { trace, relative_entropy };

std::string to_string(MeasureMode mode);
std::string to_string(DistanceBackend backend);
MeasureMode parse_mode(const std::string& text);
DistanceBackend parse_backend(const std::string& text);

struct CandidateSet {
  FamilyTag family = FamilyTag::custom;
  double epsilon = 0.0;
  std::vector<ChannelFamily> members;
  SampleConfig config;
};

/// n_maps divisible members of the probe's family (same lambda or omega_c),
/// member j drawn from cell (seed, maps, j). Members are certified on a
/// uniform grid over [0, horizon]; a member that fails certification is a
/// logic error. A divisible probe is appended as the last member.
CandidateSet make_divisible_candidates(const ChannelFamily& probe, const SampleConfig& config, double horizon);

/// n_maps collision-model maps with epsilon_j ~ U(0, epsilon], each simulated
/// for `steps` collisions of duration step_time and certified by
/// max I(S:E) <= epsilon_j + 1e-9 along its trace.
CandidateSet make_collision_candidates(double epsilon, const SampleConfig& config, double step_time, int steps);

/// True when every member passes its certification predicate.
bool certify(const CandidateSet& candidates, double horizon);

struct MeasureResult {
  double time = 0.0;
  double value = 0.0;
  MeasureMode mode = MeasureMode::max;
  double epsilon = 0.0;
  DistanceBackend backend = DistanceBackend::trace;
  std::size_t candidate_index = 0;
  double argmin_parameter = 0.0;
  /// The maximising (max mode) or minimising (min mode) input state.
  std::optional<std::size_t> state_index;
  std::optional<DensityMatrix> probe_state;
};

struct MeasureOptions {
  DistanceBackend backend = DistanceBackend::trace;
  /// 0 means: read NEARMARK_THREADS, falling back to 1.
  int threads = 0;
};

int resolve_threads(int requested);

MeasureResult max_distance_measure(const ChannelFamily& probe, double t, const CandidateSet& candidates,
                                   std::span<const DensityMatrix> states, const MeasureOptions& options = {});

MeasureResult min_distance_measure(const ChannelFamily& probe, double t, const CandidateSet& candidates,
                                   std::span<const DensityMatrix> states, const MeasureOptions& options = {});

MeasureResult cjks_measure(const ChannelFamily& probe, double t, const CandidateSet& candidates,
                           const MeasureOptions& options = {});

std::vector<MeasureResult> measure_curve(const ChannelFamily& probe, std::span<const double> t_grid,
                                         MeasureMode mode, const CandidateSet& candidates,
                                         std::span<const DensityMatrix> states, const MeasureOptions& options = {});

}  // namespace nearmark
