#pragma once

// Collision-model construction of epsilon-Markovian qubit maps.
//
// S and E are qubits; E1 is a reservoir of fresh |0> qubits. Step 1 applies
// U(1) = exp(iH) with exp(iH)|00> = alpha|00> + sqrt(1-alpha^2)|11>, where
// alpha is fixed by I(S:E) = epsilon, then swaps E with a fresh qubit. Every
// later step applies U(e1) = exp(i e1 H) with e1 in [0, 1] the largest value
// keeping I(S:E) <= epsilon, then swaps again.
//
// H acts as -acos(alpha) * sigma_y on span{|00>, |11>} and as zero on
// span{|01>, |10>}:
//
//          |00>      |01> |10> |11>
//   H = [   0         0    0   i*th ]     th = acos(alpha)
//       [   0         0    0    0   ]
//       [   0         0    0    0   ]
//       [ -i*th       0    0    0   ]

#include <vector>

#include "nearmark/quantum.hpp"

namespace nearmark {

/// alpha in [1/sqrt(2), 1] with 2 h2(alpha^2) = epsilon. Throws RangeError
/// outside epsilon in [0, 2].
double solve_alpha(double epsilon);

Eigen::Matrix4cd collision_generator(double alpha);
/// exp(i * strength * collision_generator(alpha)), evaluated in closed form.
Eigen::Matrix4cd collision_unitary(double alpha, double strength);

struct CollisionModel {
  double epsilon;
  double alpha;
  int n_fresh;

  /// Throws RangeError for epsilon outside [0, 2] or n_fresh < 1.
  explicit CollisionModel(double epsilon, int n_fresh = 1000);
};

struct CollisionStep {
  int step;
  /// Interaction strength used for this step (1 for the first step).
  double strength;
  /// S:E state right after the interaction, before the swap.
  DensityMatrix joint;
  double mutual_information;
  /// S:E state after E was swapped for a fresh |0>.
  DensityMatrix post_swap;
  DensityMatrix system;
  /// Map induced on S by this step alone.
  ChannelSnapshot step_map;
};

struct CollisionTrace {
  double epsilon = 0.0;
  std::vector<CollisionStep> steps;

  double max_mutual_information() const;
  /// Composition of the first n step maps (identity for n = 0).
  ChannelSnapshot reduced_map(int n) const;
};

/// Throws ResourceExhausted when n_steps exceeds the fresh-qubit budget.
CollisionTrace run_collision_model(const CollisionModel& model, int n_steps);

/// Time-indexed family built from a collision trace: the map at time t is the
/// composition of the first floor(t / step_time) step maps.
class CollisionChannelFamily {
 public:
  CollisionChannelFamily(const CollisionTrace& trace, double step_time);

  double epsilon() const noexcept { return epsilon_; }
  double step_time() const noexcept { return step_time_; }
  int max_steps() const noexcept { return static_cast<int>(cumulative_.size()) - 1; }

  /// Throws ResourceExhausted past the simulated horizon.
  ChannelSnapshot snapshot(double t) const;
  Eigen::MatrixXcd transfer(double t) const;

 private:
  int steps_at(double t) const;

  double epsilon_;
  double step_time_;
  std::vector<Eigen::MatrixXcd> cumulative_;
};

}  // namespace nearmark
