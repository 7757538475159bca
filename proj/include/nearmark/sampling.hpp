#pragma once

// Reproducible random states and channel parameters.
//
// Every random object is drawn from its own stream, addressed by
// (seed, stream kind, index). Streams are independent of evaluation order, so
// a grid of cells can be filled in any order or in parallel and still produce
// identical samples.

#include <cstdint>
#include <random>

#include "nearmark/channels.hpp"
#include "nearmark/quantum.hpp"

namespace nearmark {

enum class StreamKind : std::uint64_t {
  states = 1,
  maps = 2,
  restarts = 3,
  diameter = 4,
  misc = 5,
};

using Rng = std::mt19937_64;

/// Engine for cell `index` of stream `kind`; the key is mixed with splitmix64.
Rng cell_rng(std::uint64_t seed, StreamKind kind, std::uint64_t index);

struct SampleConfig {
  std::uint64_t seed = 20190101;
  int n_states = 2000;
  int n_maps = 2000;
  /// gamma0 ~ U(gamma_margin * lambda, lambda/2 - gamma_margin * lambda).
  double gamma_margin = 1e-3;
  /// s ~ U(s_min, s_max) with s_max <= 2.
  double s_min = 0.05;
  double s_max = 2.0;

  /// Throws ConfigError on non-positive counts or degenerate ranges.
  void validate() const;
};

PureState haar_pure_state(int dim, Rng& rng);

/// Reduced state of a Haar-random pure state on dim x ancilla_dim.
DensityMatrix induced_density_matrix(int dim, int ancilla_dim, Rng& rng);

/// Haar-random unitary (QR of a Ginibre matrix with phase fix).
Eigen::MatrixXcd haar_unitary(int dim, Rng& rng);

AmplitudeDampingFamily draw_divisible_ad(double lambda, Rng& rng, double gamma_margin = 1e-3);
PhaseDampingFamily draw_divisible_pd(double omega_c, Rng& rng, double s_min = 0.05, double s_max = 2.0);

/// n_states induced (2,2) qubit states, state i from cell (seed, states, i).
std::vector<DensityMatrix> sample_qubit_states(const SampleConfig& config);

}  // namespace nearmark
