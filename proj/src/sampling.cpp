#include "nearmark/sampling.hpp"

#include <cmath>

#include "nearmark/errors.hpp"

namespace nearmark {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::VectorXcd gaussian_vector(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = cplx(re, im);
  }
  return v;
}

}  // namespace

Rng cell_rng(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ static_cast<std::uint64_t>(kind));
  const std::uint64_t c = splitmix64(b ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

void SampleConfig::validate() const {
  if (n_states < 1 || n_maps < 1) throw ConfigError("sample counts must be >= 1");
  if (!(gamma_margin > 0.0 && gamma_margin < 0.25)) throw ConfigError("gamma_margin must lie in (0, 0.25)");
  if (!(s_min > 0.0 && s_max <= 2.0 && s_min < s_max)) throw ConfigError("need 0 < s_min < s_max <= 2");
}

PureState haar_pure_state(int dim, Rng& rng) {
  if (dim < 1) throw RangeError("dimension must be positive");
  Eigen::VectorXcd v = gaussian_vector(dim, rng);
  v /= v.norm();
  return PureState({dim}, std::move(v));
}

DensityMatrix induced_density_matrix(int dim, int ancilla_dim, Rng& rng) {
  if (dim < 1 || ancilla_dim < 1) throw RangeError("dimensions must be positive");
  const PureState psi = haar_pure_state(dim * ancilla_dim, rng);
  // Row-major split of the amplitude vector: psi[i * ancilla + a].
  Eigen::MatrixXcd coeffs(dim, ancilla_dim);
  for (int i = 0; i < dim; ++i) {
    for (int a = 0; a < ancilla_dim; ++a) coeffs(i, a) = psi.amplitudes()(i * ancilla_dim + a);
  }
  return DensityMatrix({dim}, coeffs * coeffs.adjoint());
}

Eigen::MatrixXcd haar_unitary(int dim, Rng& rng) {
  Eigen::MatrixXcd z(dim, dim);
  for (int j = 0; j < dim; ++j) z.col(j) = gaussian_vector(dim, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

AmplitudeDampingFamily draw_divisible_ad(double lambda, Rng& rng, double gamma_margin) {
  const double margin = gamma_margin * lambda;
  std::uniform_real_distribution<double> u(margin, 0.5 * lambda - margin);
  return AmplitudeDampingFamily(u(rng), lambda);
}

PhaseDampingFamily draw_divisible_pd(double omega_c, Rng& rng, double s_min, double s_max) {
  if (!(s_min > 0.0 && s_max <= 2.0 && s_min < s_max)) throw RangeError("need 0 < s_min < s_max <= 2");
  std::uniform_real_distribution<double> u(s_min, s_max);
  double s = u(rng);
  // uniform_real_distribution can round up to its upper bound.
  if (s >= 2.0) s = std::nextafter(2.0, 0.0);
  return PhaseDampingFamily(s, omega_c);
}

std::vector<DensityMatrix> sample_qubit_states(const SampleConfig& config) {
  std::vector<DensityMatrix> states;
  states.reserve(config.n_states);
  for (int i = 0; i < config.n_states; ++i) {
    Rng rng = cell_rng(config.seed, StreamKind::states, static_cast<std::uint64_t>(i));
    states.push_back(induced_density_matrix(2, 2, rng));
  }
  return states;
}

}  // namespace nearmark
