#pragma once

// Config-driven experiment runner.
//
// Config files are INI text:
//
//   [probe]     family = amplitude_damping | phase_damping
//               gamma0, lambda            (amplitude damping)
//               s, omega_c                (phase damping)
//   [measure]   mode = max | min | cjks, epsilon = 0, distance = trace | relative_entropy
//   [grid]      start, stop, points, axis = gt_over_i | omega_c_t | t
//   [sampling]  seed, n_states, n_maps, gamma_margin, s_min, s_max
//   [collision] step_time           (epsilon > 0 only; defaults to horizon / 100)
//   [bound]     entanglement_budget, diameter_pairs
//   [output]    path
//
// Grid values are on the chosen axis; gt_over_i needs an amplitude damping
// probe with imaginary g, omega_c_t needs a phase damping probe.

#include <iosfwd>
#include <string>
#include <vector>

#include "nearmark/bounds.hpp"
#include "nearmark/measures.hpp"
#include "nearmark/sampling.hpp"

namespace nearmark {

enum class Profile { full, ci };
Profile parse_profile(const std::string& text);

enum class TimeAxis { gt_over_i, omega_c_t, t };

struct ExperimentConfig {
  ChannelFamily probe = AmplitudeDampingFamily{4.0, 4.0};
  MeasureMode mode = MeasureMode::max;
  double epsilon = 0.0;
  DistanceBackend backend = DistanceBackend::trace;
  double grid_start = 0.0;
  double grid_stop = 10.0;
  int grid_points = 200;
  TimeAxis axis = TimeAxis::t;
  SampleConfig sampling;
  double step_time = 0.0;
  BoundOptions bound;
  std::string output_path;
  int threads = 0;

  /// Throws ConfigError on an inconsistent combination.
  void validate() const;
  /// Grid points on the configured axis.
  std::vector<double> axis_grid() const;
  /// Physical time for an axis value.
  double to_time(double axis_value) const;
};

/// The CI profile caps candidates, states and grid points at 200, 200 and 50.
ExperimentConfig apply_profile(ExperimentConfig config, Profile profile);

/// Throws ConfigError for unreadable files, unknown keys or bad values.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

struct ExperimentRun {
  std::vector<double> axis;
  std::vector<MeasureResult> results;
};

ExperimentRun run_experiment(const ExperimentConfig& config);

/// Header: time_axis,value,mode,epsilon,argmin_param,probe_param,seed.
void write_curve_csv(std::ostream& out, const ExperimentConfig& config, const ExperimentRun& run);

struct BoundRun {
  std::vector<double> axis;
  std::vector<BoundReport> reports;
  bool all_hold() const;
};

/// Max or min mode only; cjks results carry no extremal state.
BoundRun run_bound_report(const ExperimentConfig& config);

/// Header: time_axis,N,E,d,slack.
void write_bound_csv(std::ostream& out, const BoundRun& run);

/// Header: step,I_Q.
void write_collision_csv(std::ostream& out, const CollisionTrace& trace);

}  // namespace nearmark
