#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>

#include <unsupported/Eigen/MatrixFunctions>

#include "nearmark/bounds.hpp"
#include "nearmark/collision.hpp"
#include "nearmark/errors.hpp"
#include "nearmark/optimize.hpp"
#include "nearmark/sampling.hpp"

namespace nearmark {

namespace {

constexpr double kConcurrenceZero = 1e-12;
constexpr double kReconstructionTolerance = 1e-8;
constexpr double kComponentSlack = 1e-9;

void require_two_qubits(const DensityMatrix& rho) {
  if (rho.dims() != Dims{2, 2}) throw Unsupported("only two-qubit states are supported");
}

// sigma_y (x) sigma_y.
Eigen::Matrix4cd spin_flip() {
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(0, 3) = -1.0;
  s(3, 0) = -1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  return s;
}

// Bilinear preconcurrence tau(a, b) = a^T (sy x sy) b.
cplx tau(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a.transpose() * spin_flip() * b)(0, 0); }

// Takagi factorisation of a complex symmetric matrix: m = q diag(s) q^T with q
// unitary and s >= 0 descending, via the real symmetric embedding
// [[Re m, Im m], [Im m, -Re m]].
void takagi(const Eigen::MatrixXcd& m, Eigen::MatrixXcd& q, Eigen::VectorXd& s) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd big(2 * n, 2 * n);
  big << m.real(), m.imag(), m.imag(), -m.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<Eigen::VectorXcd> cols;
  std::vector<double> vals;
  for (Eigen::Index k = 2 * n; k-- > 0 && static_cast<Eigen::Index>(cols.size()) < n;) {
    const double v = es.eigenvalues()(k);
    if (v <= 1e-12 * scale) break;
    const auto e = es.eigenvectors().col(k);
    Eigen::VectorXcd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c(i) = cplx(e(i), e(n + i));
    cols.push_back(c);
    vals.push_back(v);
  }
  q.resize(n, n);
  s = Eigen::VectorXd::Zero(n);
  const Eigen::Index p = static_cast<Eigen::Index>(cols.size());
  for (Eigen::Index k = 0; k < p; ++k) {
    q.col(k) = cols[k];
    s(k) = vals[k];
  }
  if (p < n) {
    // Orthonormal completion of the kernel directions.
    Eigen::MatrixXcd basis = Eigen::MatrixXcd::Identity(n, n);
    if (p > 0) {
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(q.leftCols(p));
      basis = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    }
    q.rightCols(n - p) = basis.rightCols(n - p);
  }
}

// Eigen-decomposition based subnormalised spanning vectors, then the Takagi
// rotation so that tau(x_i, x_j) = lambda_i delta_ij, lambda descending,
// padded to four columns.
void wootters_basis(const DensityMatrix& rho, Eigen::MatrixXcd& x, Eigen::Vector4d& lambda) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  std::vector<Eigen::VectorXcd> vs;
  for (Eigen::Index k = 3; k >= 0; --k) {
    const double mu = es.eigenvalues()(k);
    if (mu > 1e-14) vs.push_back(std::sqrt(mu) * es.eigenvectors().col(k));
  }
  const Eigen::Index r = static_cast<Eigen::Index>(vs.size());
  Eigen::MatrixXcd v(4, r);
  for (Eigen::Index k = 0; k < r; ++k) v.col(k) = vs[k];
  const Eigen::MatrixXcd m = v.transpose() * spin_flip() * v;
  Eigen::MatrixXcd q;
  Eigen::VectorXd s;
  takagi(0.5 * (m + m.transpose()), q, s);
  x = Eigen::MatrixXcd::Zero(4, 4);
  x.leftCols(r) = v * q.conjugate();
  lambda = Eigen::Vector4d::Zero();
  lambda.head(r) = s;
}

// Angles with sum_j lambda_j exp(i theta_j) = 0 for a non-increasing lambda
// satisfying lambda_0 <= lambda_1 + lambda_2 + lambda_3.
std::array<double, 4> closing_angles(const Eigen::Vector4d& lam) {
  auto safe_acos = [](double num, double den) { return den > 0.0 ? std::acos(std::clamp(num / den, -1.0, 1.0)) : 0.0; };
  const double l1 = lam(0), l2 = lam(1), l3 = lam(2), l4 = lam(3);
  const double side = std::clamp(l1 - l2, l3 - l4, l3 + l4);
  const cplx v1 = l1;
  const double psi = safe_acos(l1 * l1 + l2 * l2 - side * side, 2.0 * l1 * l2);
  const cplx v2 = std::polar(l2, std::numbers::pi - psi);
  const cplx w = -v1 - v2;
  const double psi2 = safe_acos(side * side + l3 * l3 - l4 * l4, 2.0 * side * l3);
  const cplx v3 = std::polar(l3, std::arg(w) + psi2);
  const cplx v4 = w - v3;
  return {std::arg(v1), std::arg(v2), std::arg(v3), std::arg(v4)};
}

Eigen::Matrix4d hadamard_half() {
  Eigen::Matrix4d h;
  h << 1, 1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1;
  return 0.5 * h;
}

Eigen::Matrix4d rotation(std::span<const double> p) {
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      a(i, j) = p[k];
      a(j, i) = -p[k];
      ++k;
    }
  }
  return a.exp();
}

// Concurrence bound c such that a pure state with concurrence c has I(A:B) = epsilon.
double concurrence_for_mutual_information(double epsilon) {
  const double alpha = solve_alpha(std::min(epsilon, 2.0));
  const double p = 1.0 - alpha * alpha;
  return 2.0 * std::sqrt(p * (1.0 - p));
}

bool certificate_valid(const DensityMatrix& rho, const SeparabilityVerdict& v) {
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(4, 4);
  double wsum = 0.0;
  for (std::size_t k = 0; k < v.components.size(); ++k) {
    if (quantum_mutual_information(v.components[k]) > v.epsilon + kComponentSlack) return false;
    sum += v.weights[k] * v.components[k].matrix();
    wsum += v.weights[k];
  }
  return std::abs(wsum - 1.0) < 1e-10 && trace_norm(sum - rho.matrix()) < kReconstructionTolerance;
}

void fill_from_vectors(const std::vector<Eigen::VectorXcd>& zs, SeparabilityVerdict& v) {
  v.weights.clear();
  v.components.clear();
  double total = 0.0;
  for (const auto& z : zs) total += z.squaredNorm();
  for (const auto& z : zs) {
    const double w = z.squaredNorm();
    if (w <= 1e-15) continue;
    Eigen::VectorXcd unit = z / std::sqrt(w);
    v.weights.push_back(w / total);
    v.components.push_back(DensityMatrix({2, 2}, unit * unit.adjoint()));
  }
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "yes";
    case Verdict::no:
      return "no";
    case Verdict::unknown:
      return "unknown";
  }
  return "?";
}

double min_partial_transpose_eigenvalue(const DensityMatrix& rho_ab) {
  if (rho_ab.subsystems() != 2) throw PartitionError("partial transpose test needs a bipartite state");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(partial_transpose(rho_ab, 1), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double concurrence(const DensityMatrix& rho_ab) {
  require_two_qubits(rho_ab);
  Eigen::MatrixXcd x;
  Eigen::Vector4d lam;
  wootters_basis(rho_ab, x, lam);
  return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

PureDecomposition wootters_decomposition(const DensityMatrix& rho_ab) {
  require_two_qubits(rho_ab);
  Eigen::MatrixXcd x;
  Eigen::Vector4d lam;
  wootters_basis(rho_ab, x, lam);
  const bool separable = lam(0) - lam(1) - lam(2) - lam(3) <= kConcurrenceZero;
  Eigen::MatrixXcd y = x;
  if (separable) {
    const auto theta = closing_angles(lam);
    for (int j = 0; j < 4; ++j) y.col(j) *= std::polar(1.0, 0.5 * theta[j]);
  } else {
    for (int j = 1; j < 4; ++j) y.col(j) *= cplx(0.0, 1.0);
  }
  const Eigen::MatrixXcd z = y * hadamard_half().transpose().cast<cplx>();
  PureDecomposition out;
  for (int k = 0; k < 4; ++k) {
    out.vectors.push_back(z.col(k));
    out.preconcurrences.push_back(std::abs(tau(z.col(k), z.col(k))));
  }
  return out;
}

SeparabilityVerdict eps_separable_membership(const DensityMatrix& rho, double epsilon, int budget, std::uint64_t seed) {
  require_two_qubits(rho);
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) throw RangeError("epsilon must lie in [0, 2]");
  SeparabilityVerdict v;
  v.epsilon = epsilon;
  v.min_partial_transpose_eigenvalue = min_partial_transpose_eigenvalue(rho);

  if (quantum_mutual_information(rho) <= epsilon) {
    v.verdict = Verdict::yes;
    v.weights = {1.0};
    v.components = {rho};
    v.method = "mutual-information";
    return v;
  }

  Eigen::MatrixXcd x;
  Eigen::Vector4d lam;
  wootters_basis(rho, x, lam);
  const double c = lam(0) - lam(1) - lam(2) - lam(3);

  if (c <= kConcurrenceZero) {
    const PureDecomposition dec = wootters_decomposition(rho);
    fill_from_vectors(dec.vectors, v);
    v.method = "wootters-product";
    if (certificate_valid(rho, v)) {
      v.verdict = Verdict::yes;
      return v;
    }
  } else if (epsilon > 0.0) {
    // Randomised search over real rotations of the Wootters basis; the best
    // decomposition equalises component concurrences at c.
    Eigen::MatrixXcd y = x;
    for (int j = 1; j < 4; ++j) y.col(j) *= cplx(0.0, 1.0);
    const Eigen::Matrix4d h = hadamard_half();
    auto components_for = [&](std::span<const double> p) {
      const Eigen::Matrix4d o = h * rotation(p);
      return Eigen::MatrixXcd(y * o.transpose().cast<cplx>());
    };
    auto worst_concurrence = [&](std::span<const double> p) {
      const Eigen::MatrixXcd z = components_for(p);
      double worst = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double w = z.col(k).squaredNorm();
        if (w <= 1e-15) continue;
        worst = std::max(worst, std::abs(tau(z.col(k), z.col(k))) / w);
      }
      return worst;
    };
    const double target = concurrence_for_mutual_information(epsilon);
    Rng rng = cell_rng(seed, StreamKind::restarts, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    int used = 0;
    std::vector<double> start(6, 0.0);
    while (used < budget) {
      const MinimizeResult r = nelder_mead(worst_concurrence, start, 0.3, std::max(50, budget / 8), 1e-12);
      used += std::max(1, r.evaluations);
      if (r.value <= target) {
        const Eigen::MatrixXcd z = components_for(r.x);
        std::vector<Eigen::VectorXcd> zs;
        for (int k = 0; k < 4; ++k) zs.push_back(z.col(k));
        fill_from_vectors(zs, v);
        v.method = "wootters-rotation-search";
        if (certificate_valid(rho, v)) {
          v.verdict = Verdict::yes;
          return v;
        }
      }
      for (auto& s : start) s = normal(rng);
    }
  }

  v.weights.clear();
  v.components.clear();
  if (epsilon == 0.0 && *v.min_partial_transpose_eigenvalue < -kConcurrenceZero) {
    v.verdict = Verdict::no;
    v.method = "negative-partial-transpose";
  } else {
    v.verdict = Verdict::unknown;
    v.method = "search-exhausted";
  }
  return v;
}

}  // namespace nearmark
