#include "nearmark/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>

#include "nearmark/channels.hpp"
#include "nearmark/collision.hpp"
#include "nearmark/errors.hpp"
#include "nearmark/optimize.hpp"
#include "nearmark/sampling.hpp"

namespace nearmark {

namespace {

constexpr double kPptTolerance = 1e-12;

bool is_ppt(const DensityMatrix& rho) { return min_partial_transpose_eigenvalue(rho) >= -kPptTolerance; }

void require_two_qubits(const DensityMatrix& rho, std::size_t cut) {
  if (cut != 1 || rho.dims() != Dims{2, 2}) throw Unsupported("only two-qubit states split 1|1 are supported");
}

Eigen::Matrix2cd qubit_basis(double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const cplx e = std::polar(1.0, phi);
  Eigen::Matrix2cd u;
  u << c, -std::conj(e) * s, e * s, c;
  return u;
}

// Bloch angles of the leading eigenvector of a qubit state.
std::pair<double, double> eigenbasis_angles(const DensityMatrix& qubit) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(qubit.matrix());
  const Eigen::VectorXcd v = es.eigenvectors().col(1);
  const double theta = 2.0 * std::acos(std::clamp(std::abs(v(0)), 0.0, 1.0));
  const double phi = std::arg(v(1)) - std::arg(v(0));
  return {theta, phi};
}

// Dephasing in the product basis given by four Bloch angles.
DensityMatrix dephase(const DensityMatrix& rho, std::span<const double> angles) {
  const Eigen::MatrixXcd u = kron(qubit_basis(angles[0], angles[1]), qubit_basis(angles[2], angles[3]));
  const Eigen::MatrixXcd inner = u.adjoint() * rho.matrix() * u;
  const Eigen::MatrixXcd diag = inner.diagonal().real().cast<cplx>().asDiagonal();
  return DensityMatrix(rho.dims(), u * diag * u.adjoint());
}

DensityMatrix mix(const DensityMatrix& rho, const DensityMatrix& sigma, double q) {
  return DensityMatrix(rho.dims(), (1.0 - q) * rho.matrix() + q * sigma.matrix());
}

struct BasisSearch {
  std::vector<double> angles;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

// Minimises objective(dephased state) over product bases, starting from the
// local eigenbases and then from random angles.
BasisSearch search_product_basis(const DensityMatrix& rho, const std::function<double(const DensityMatrix&)>& objective,
                                 int budget, std::uint64_t seed) {
  const auto [ta, pa] = eigenbasis_angles(partial_trace(rho, {0}));
  const auto [tb, pb] = eigenbasis_angles(partial_trace(rho, {1}));
  std::vector<double> start{ta, pa, tb, pb};
  Rng rng = cell_rng(seed, StreamKind::restarts, 1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const Objective f = [&](std::span<const double> x) { return objective(dephase(rho, x)); };
  BasisSearch best;
  const int per_start = std::max(40, budget / 4);
  while (best.evaluations < budget) {
    const MinimizeResult r = nelder_mead(f, start, 0.4, std::min(per_start, budget - best.evaluations), 1e-10);
    best.evaluations += std::max(1, r.evaluations);
    if (r.value < best.value) {
      best.value = r.value;
      best.angles = r.x;
    }
    for (auto& a : start) a = angle(rng);
  }
  return best;
}

// Smallest q in [0, 1] with (1 - q) rho + q anchor feasible, assuming the
// anchor itself is feasible.
double boundary_fraction(const DensityMatrix& rho, const DensityMatrix& anchor,
                         const std::function<bool(const DensityMatrix&)>& feasible) {
  const double u = bisect_largest_feasible([&](double x) { return feasible(mix(rho, anchor, 1.0 - x)); }, 0.0, 1.0);
  return 1.0 - u;
}

double trace_estimate(const DensityMatrix& rho, const std::function<bool(const DensityMatrix&)>& feasible, int budget,
                      std::uint64_t seed) {
  if (feasible(rho)) return 0.0;
  const BasisSearch dephased =
      search_product_basis(rho, [&](const DensityMatrix& s) { return trace_distance(rho, s); }, budget, seed);
  double best = dephased.value;
  std::vector<DensityMatrix> anchors{tensor(partial_trace(rho, {0}), partial_trace(rho, {1})),
                                     dephase(rho, dephased.angles)};
  for (const auto& anchor : anchors) {
    const double q = boundary_fraction(rho, anchor, feasible);
    best = std::min(best, q * trace_distance(rho, anchor));
  }
  return best;
}

// Draws a pure two-qubit state with I(A:B) <= epsilon: Schmidt weight p below
// the epsilon limit, rotated by Haar local unitaries.
Eigen::VectorXcd eps_separable_pure(double p_max, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p = p_max > 0.0 ? p_max * unit(rng) : 0.0;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = std::sqrt(1.0 - p);
  psi(3) = std::sqrt(p);
  const Eigen::MatrixXcd local = kron(haar_unitary(2, rng), haar_unitary(2, rng));
  return local * psi;
}

double pure_trace_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double overlap = std::norm(a.dot(b));
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - overlap));
}

}  // namespace

double entanglement_pure(const PureState& state, std::size_t cut) {
  const std::size_t n = state.dims().size();
  if (cut < 1 || cut >= n) throw PartitionError("cut must split the subsystems into two non-empty parts");
  std::vector<std::size_t> keep(cut);
  for (std::size_t i = 0; i < cut; ++i) keep[i] = i;
  return von_neumann_entropy(partial_trace(state.projector(), keep));
}

EntanglementEstimate entanglement_mixed_approx(const DensityMatrix& rho, std::size_t cut, int budget,
                                               std::uint64_t seed) {
  require_two_qubits(rho, cut);
  EntanglementEstimate out;
  out.mutual_information_bound = quantum_mutual_information(rho, cut);
  if (is_ppt(rho)) {
    // Two-qubit PPT states are separable.
    out.optimized_bound = 0.0;
    out.estimate = 0.0;
    return out;
  }
  const double s_rho = von_neumann_entropy(rho);
  const BasisSearch dephased = search_product_basis(
      rho, [&](const DensityMatrix& s) { return von_neumann_entropy(s) - s_rho; }, budget, seed);
  double best = std::max(0.0, dephased.value);
  std::vector<DensityMatrix> anchors{tensor(partial_trace(rho, {0}), partial_trace(rho, {1})),
                                     dephase(rho, dephased.angles)};
  for (const auto& anchor : anchors) {
    const double q = boundary_fraction(rho, anchor, is_ppt);
    const double d = relative_entropy(rho, mix(rho, anchor, q));
    if (std::isfinite(d)) best = std::min(best, std::max(0.0, d));
  }
  out.optimized_bound = best;
  out.estimate = std::min(out.mutual_information_bound, out.optimized_bound);
  out.evaluations = dephased.evaluations;
  return out;
}

double trace_entanglement_approx(const DensityMatrix& rho, int budget, std::uint64_t seed) {
  require_two_qubits(rho, 1);
  return trace_estimate(rho, is_ppt, budget, seed);
}

double eps_trace_entanglement_approx(const DensityMatrix& rho, double epsilon, int budget, std::uint64_t seed) {
  require_two_qubits(rho, 1);
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) throw RangeError("epsilon must lie in [0, 2]");
  const auto feasible = [epsilon](const DensityMatrix& s) {
    return is_ppt(s) || quantum_mutual_information(s) <= epsilon;
  };
  return trace_estimate(rho, feasible, budget, seed);
}

std::optional<double> separable_diameter(DistanceBackend backend) {
  if (backend == DistanceBackend::trace) return 2.0;
  return std::nullopt;
}

DiameterEstimate sampled_eps_separable_diameter(double epsilon, int pairs, std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) throw RangeError("epsilon must lie in [0, 2]");
  if (pairs < 1) throw RangeError("need at least one sample pair");
  const double alpha = solve_alpha(epsilon);
  const double p_max = epsilon > 0.0 ? 1.0 - alpha * alpha : 0.0;
  DiameterEstimate out;
  for (int k = 0; k < pairs; ++k) {
    Rng rng = cell_rng(seed, StreamKind::diameter, static_cast<std::uint64_t>(k));
    const Eigen::VectorXcd a = eps_separable_pure(p_max, rng);
    const Eigen::VectorXcd b = eps_separable_pure(p_max, rng);
    out.value = std::max(out.value, pure_trace_distance(a, b));
    ++out.samples;
  }
  return out;
}

Dilation dilation_for(const ChannelFamily& probe) {
  if (const auto* ad = std::get_if<AmplitudeDampingFamily>(&probe)) {
    return [fam = *ad](double t, const DensityMatrix& rho) { return ad_dilation(fam, t, rho); };
  }
  if (const auto* pd = std::get_if<PhaseDampingFamily>(&probe)) {
    return [fam = *pd](double t, const DensityMatrix& rho) { return pd_dilation(fam, t, rho); };
  }
  throw Unsupported("no closed-form dilation for collision-model maps");
}

BoundReport verify_bound(const MeasureResult& result, const Dilation& dilation, double epsilon,
                         const BoundOptions& options) {
  if (result.backend != DistanceBackend::trace) throw Unsupported("the bound needs a bounded distance");
  if (!result.probe_state) throw ContractError("measure result carries no extremal input state");
  const DensityMatrix joint = dilation(result.time, *result.probe_state);
  BoundReport report;
  report.time = result.time;
  report.epsilon = epsilon;
  report.mode = result.mode;
  report.measure = result.value;
  if (epsilon == 0.0) {
    report.entanglement = trace_entanglement_approx(joint, options.entanglement_budget, options.seed);
    report.diameter = *separable_diameter(DistanceBackend::trace);
  } else {
    report.entanglement = eps_trace_entanglement_approx(joint, epsilon, options.entanglement_budget, options.seed);
    const DiameterEstimate d = sampled_eps_separable_diameter(epsilon, options.diameter_pairs, options.seed);
    report.diameter = d.value;
    report.diameter_samples = d.samples;
  }
  report.slack = report.entanglement + report.diameter - report.measure;
  report.holds = report.slack >= -kBoundSlackTolerance;
  return report;
}

}  // namespace nearmark
