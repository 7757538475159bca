#pragma once

// Epsilon-separability, entanglement estimates and the entanglement-based
// upper bound on non-Markovianity:
//
//   N  <=  E(L_SE(rho* (x) rho_E)) + d
//
// with rho* the extremal input recorded by the measure, E the distance from
// the (epsilon-)separable set and d its diameter, all in the same distance.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nearmark/measures.hpp"
#include "nearmark/quantum.hpp"

namespace nearmark {

enum class Verdict { yes, no, unknown };
std::string to_string(Verdict v);

struct SeparabilityVerdict {
  Verdict verdict = Verdict::unknown;
  double epsilon = 0.0;
  /// For `yes`: rho = sum_k weights[k] components[k], every component with
  /// I(A:B) <= epsilon.
  std::vector<double> weights;
  std::vector<DensityMatrix> components;
  /// Smallest eigenvalue of the partial transpose; negative is an entanglement witness.
  std::optional<double> min_partial_transpose_eigenvalue;
  std::string method;
};

/// Two-qubit states only. Evaluation budget bounds the randomized search used
/// for entangled inputs with epsilon > 0.
SeparabilityVerdict eps_separable_membership(const DensityMatrix& rho_se, double epsilon, int budget = 4000,
                                             std::uint64_t seed = 1);

double min_partial_transpose_eigenvalue(const DensityMatrix& rho_ab);
double concurrence(const DensityMatrix& rho_ab);

/// Subnormalised pure vectors z_k with sum_k |z_k><z_k| = rho. When the
/// concurrence vanishes every z_k is a product vector.
struct PureDecomposition {
  std::vector<Eigen::VectorXcd> vectors;
  std::vector<double> preconcurrences;
};
PureDecomposition wootters_decomposition(const DensityMatrix& rho_ab);

/// Entropy of entanglement in ebits (equal to the relative entropy of
/// entanglement for pure states).
double entanglement_pure(const PureState& state, std::size_t cut = 1);

struct EntanglementEstimate {
  /// min(mutual_information_bound, optimized_bound): an upper bound, never exact.
  double estimate = 0.0;
  double mutual_information_bound = 0.0;
  double optimized_bound = 0.0;
  int evaluations = 0;
};

/// Upper estimate of the relative entropy of entanglement of a two-qubit state.
EntanglementEstimate entanglement_mixed_approx(const DensityMatrix& rho, std::size_t cut = 1, int budget = 2000,
                                               std::uint64_t seed = 1);

/// Upper estimate of min over separable sigma of tr|rho - sigma|; zero for PPT states.
double trace_entanglement_approx(const DensityMatrix& rho, int budget = 2000, std::uint64_t seed = 1);

/// Upper estimate of the trace distance to the epsilon-separable set.
double eps_trace_entanglement_approx(const DensityMatrix& rho, double epsilon, int budget = 2000,
                                     std::uint64_t seed = 1);

/// Diameter of the two-qubit separable set: 2 for the trace distance,
/// nullopt (unsupported) for the relative entropy, which is unbounded there.
std::optional<double> separable_diameter(DistanceBackend backend);

struct DiameterEstimate {
  double value = 0.0;
  int samples = 0;
};

/// Largest trace distance over sampled pairs of epsilon-separable states
/// (products of pure states when epsilon = 0).
DiameterEstimate sampled_eps_separable_diameter(double epsilon, int pairs, std::uint64_t seed);

using Dilation = std::function<DensityMatrix(double t, const DensityMatrix& rho_s)>;

/// Dilation of an amplitude or phase damping probe with E starting in |0>.
Dilation dilation_for(const ChannelFamily& probe);

struct BoundOptions {
  int entanglement_budget = 2000;
  int diameter_pairs = 20000;
  std::uint64_t seed = 1;
};

inline constexpr double kBoundSlackTolerance = 1e-7;

struct BoundReport {
  double time = 0.0;
  double epsilon = 0.0;
  MeasureMode mode = MeasureMode::max;
  double measure = 0.0;
  double entanglement = 0.0;
  double diameter = 0.0;
  int diameter_samples = 0;
  double slack = 0.0;
  bool holds = true;
};

/// Checks N <= E + d at the extremal state stored in `result`. Throws
/// ContractError when the result carries no extremal state (cjks results) and
/// Unsupported for the relative entropy backend.
BoundReport verify_bound(const MeasureResult& result, const Dilation& dilation, double epsilon,
                         const BoundOptions& options = {});

}  // namespace nearmark
