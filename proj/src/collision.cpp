#include "nearmark/collision.hpp"

#include <algorithm>
#include <cmath>

#include "nearmark/errors.hpp"
#include "nearmark/optimize.hpp"

namespace nearmark {

namespace {

constexpr double kMutualInfoSlack = 1e-9;

DensityMatrix swap_with_fresh(const DensityMatrix& joint) {
  return tensor(partial_trace(joint, {0}), DensityMatrix::basis_state({2}, 0));
}

ChannelSnapshot step_map_of(const Eigen::Matrix4cd& u) {
  // K_e = <e|_E U |0>_E, with E the second tensor factor.
  ChannelSnapshot map;
  for (int e = 0; e < 2; ++e) {
    Eigen::MatrixXcd k(2, 2);
    for (int s_out = 0; s_out < 2; ++s_out) {
      for (int s_in = 0; s_in < 2; ++s_in) k(s_out, s_in) = u(2 * s_out + e, 2 * s_in);
    }
    map.kraus.push_back(k);
  }
  map.family = FamilyTag::collision;
  return map;
}

}  // namespace

double solve_alpha(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) throw RangeError("epsilon must lie in [0, 2]");
  // Smaller Schmidt weight p = 1 - alpha^2 in [0, 1/2]; 2 h2(p) is increasing there.
  double lo = 0.0;
  double hi = 0.5;
  if (2.0 * binary_entropy(hi) <= epsilon) return std::sqrt(0.5);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (2.0 * binary_entropy(mid) <= epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(1.0 - lo);
}

Eigen::Matrix4cd collision_generator(double alpha) {
  const double theta = std::acos(std::clamp(alpha, -1.0, 1.0));
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  h(0, 3) = cplx(0.0, theta);
  h(3, 0) = cplx(0.0, -theta);
  return h;
}

Eigen::Matrix4cd collision_unitary(double alpha, double strength) {
  const double phi = strength * std::acos(std::clamp(alpha, -1.0, 1.0));
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  u(0, 0) = std::cos(phi);
  u(3, 3) = std::cos(phi);
  u(3, 0) = std::sin(phi);
  u(0, 3) = -std::sin(phi);
  return u;
}

CollisionModel::CollisionModel(double epsilon_, int n_fresh_)
    : epsilon(epsilon_), alpha(solve_alpha(epsilon_)), n_fresh(n_fresh_) {
  if (n_fresh < 1) throw RangeError("need at least one fresh environment qubit");
}

double CollisionTrace::max_mutual_information() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.mutual_information);
  return m;
}

ChannelSnapshot CollisionTrace::reduced_map(int n) const {
  if (n < 0 || n > static_cast<int>(steps.size())) throw RangeError("step count outside the trace");
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(4, 4);
  for (int i = 0; i < n; ++i) t = transfer_matrix(steps[i].step_map) * t;
  ChannelSnapshot map;
  map.kraus = kraus_from_transfer(t, 2, 2);
  map.family = FamilyTag::collision;
  map.parameters = {epsilon, static_cast<double>(n)};
  return map;
}

CollisionTrace run_collision_model(const CollisionModel& model, int n_steps) {
  if (n_steps < 0) throw RangeError("step count must be non-negative");
  if (n_steps > model.n_fresh) throw ResourceExhausted("not enough fresh environment qubits for the requested steps");
  CollisionTrace trace;
  trace.epsilon = model.epsilon;
  trace.steps.reserve(n_steps);
  DensityMatrix state = DensityMatrix::basis_state({2, 2}, 0);

  auto evolve = [&](double strength) {
    const Eigen::Matrix4cd u = collision_unitary(model.alpha, strength);
    return DensityMatrix({2, 2}, u * state.matrix() * u.adjoint());
  };

  for (int k = 1; k <= n_steps; ++k) {
    double strength = 1.0;
    if (k > 1) {
      strength = bisect_largest_feasible(
          [&](double e1) { return quantum_mutual_information(evolve(e1)) <= model.epsilon; }, 0.0, 1.0);
    }
    DensityMatrix joint = evolve(strength);
    const double info = quantum_mutual_information(joint);
    if (info > model.epsilon + kMutualInfoSlack) {
      throw std::logic_error("collision step exceeded the mutual-information budget");
    }
    DensityMatrix post = swap_with_fresh(joint);
    DensityMatrix system = partial_trace(post, {0});
    ChannelSnapshot map = step_map_of(collision_unitary(model.alpha, strength));
    map.time = k;
    map.parameters = {model.epsilon, strength};
    trace.steps.push_back({k, strength, std::move(joint), info, post, std::move(system), std::move(map)});
    state = std::move(post);
  }
  return trace;
}

CollisionChannelFamily::CollisionChannelFamily(const CollisionTrace& trace, double step_time)
    : epsilon_(trace.epsilon), step_time_(step_time) {
  if (!(step_time > 0.0)) throw RangeError("step_time must be positive");
  cumulative_.reserve(trace.steps.size() + 1);
  cumulative_.push_back(Eigen::MatrixXcd::Identity(4, 4));
  for (const auto& s : trace.steps) cumulative_.push_back(transfer_matrix(s.step_map) * cumulative_.back());
}

int CollisionChannelFamily::steps_at(double t) const {
  if (!(t >= 0.0)) throw RangeError("time must be non-negative");
  const int n = static_cast<int>(std::floor(t / step_time_ + 1e-9));
  if (n > max_steps()) throw ResourceExhausted("time lies beyond the simulated collision horizon");
  return n;
}

Eigen::MatrixXcd CollisionChannelFamily::transfer(double t) const { return cumulative_[steps_at(t)]; }

ChannelSnapshot CollisionChannelFamily::snapshot(double t) const {
  ChannelSnapshot map;
  map.kraus = kraus_from_transfer(transfer(t), 2, 2);
  map.time = t;
  map.family = FamilyTag::collision;
  map.parameters = {epsilon_, step_time_};
  return map;
}

}  // namespace nearmark
