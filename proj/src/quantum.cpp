#include "nearmark/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nearmark/errors.hpp"

namespace nearmark {

namespace {

// Multi-index digits of a flat index, subsystem 0 most significant.
void unflatten(int index, const Dims& dims, std::vector<int>& digits) {
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
}

int flatten(const std::vector<int>& digits, const Dims& dims) {
  int index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

Eigen::VectorXd clamped_eigenvalues(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  for (auto& v : ev) {
    if (v < 0.0) v = 0.0;
  }
  return ev;
}

double entropy_of_spectrum(const Eigen::VectorXd& ev) {
  double s = 0.0;
  for (double v : ev) {
    if (v > 0.0) s -= v * std::log2(v);
  }
  return std::max(s, 0.0);
}

}  // namespace

int total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

DensityMatrix::DensityMatrix(Dims dims, const Eigen::MatrixXcd& entries) : dims_(std::move(dims)) {
  if (dims_.empty() || std::any_of(dims_.begin(), dims_.end(), [](int d) { return d < 1; })) {
    throw InvalidState("density matrix needs at least one subsystem of positive dimension");
  }
  const int n = total_dim(dims_);
  if (n > kMaxTotalDim) throw InvalidState("total dimension exceeds 64");
  if (entries.rows() != n || entries.cols() != n) {
    throw InvalidState("matrix shape does not match subsystem dimensions");
  }
  const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= kStateTolerance)) throw InvalidState("matrix is not Hermitian");
  m_ = 0.5 * (entries + entries.adjoint());
  const double tr = m_.trace().real();
  if (!(std::abs(tr - 1.0) <= kStateTolerance)) {
    std::ostringstream msg;
    msg << "trace is " << tr << ", expected 1";
    throw InvalidState(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStateTolerance) {
    throw InvalidState("matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
  const int n = total_dim(dims);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n);
  return DensityMatrix(std::move(dims), m);
}

DensityMatrix DensityMatrix::basis_state(Dims dims, int index) {
  const int n = total_dim(dims);
  if (index < 0 || index >= n) throw RangeError("basis index out of range");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(dims), m);
}

Eigen::VectorXd DensityMatrix::spectrum() const { return clamped_eigenvalues(m_); }

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

PureState::PureState(Dims dims, Eigen::VectorXcd amplitudes)
    : dims_(std::move(dims)), psi_(std::move(amplitudes)) {
  if (psi_.size() != total_dim(dims_)) throw InvalidState("amplitude count does not match dims");
  if (!(std::abs(psi_.norm() - 1.0) <= kStateTolerance)) throw InvalidState("state is not normalised");
}

DensityMatrix PureState::projector() const { return DensityMatrix(dims_, psi_ * psi_.adjoint()); }

double ChannelSnapshot::completeness_error() const {
  if (kraus.empty()) return std::numeric_limits<double>::infinity();
  const auto n = kraus.front().cols();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& k : kraus) {
    if (k.cols() != n || k.rows() != kraus.front().rows()) {
      return std::numeric_limits<double>::infinity();
    }
    sum += k.adjoint() * k;
  }
  return (sum - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

ChannelSnapshot identity_channel(int dim) {
  ChannelSnapshot c;
  c.kraus.push_back(Eigen::MatrixXcd::Identity(dim, dim));
  c.family = FamilyTag::identity;
  return c;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix(std::move(dims), kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const Dims& dims = rho.dims();
  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  Dims out_dims;
  for (std::size_t k : keep) {
    if (k >= n || kept[k]) throw PartitionError("invalid or repeated subsystem index");
    kept[k] = true;
    out_dims.push_back(dims[k]);
  }
  if (out_dims.empty()) throw PartitionError("partial trace must keep at least one subsystem");

  const int out_n = total_dim(out_dims);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_n, out_n);
  const int full = rho.dim();
  std::vector<int> row(n), col(n), out_row(keep.size()), out_col(keep.size());
  for (int r = 0; r < full; ++r) {
    unflatten(r, dims, row);
    for (int c = 0; c < full; ++c) {
      unflatten(c, dims, col);
      bool diagonal_in_traced = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (!kept[k] && row[k] != col[k]) {
          diagonal_in_traced = false;
          break;
        }
      }
      if (!diagonal_in_traced) continue;
      for (std::size_t q = 0; q < keep.size(); ++q) {
        out_row[q] = row[keep[q]];
        out_col[q] = col[keep[q]];
      }
      out(flatten(out_row, out_dims), flatten(out_col, out_dims)) += rho.matrix()(r, c);
    }
  }
  return DensityMatrix(std::move(out_dims), out);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

Eigen::MatrixXcd partial_transpose(const DensityMatrix& rho, std::size_t subsystem) {
  const Dims& dims = rho.dims();
  if (subsystem >= dims.size()) throw PartitionError("subsystem index out of range");
  const int n = rho.dim();
  Eigen::MatrixXcd out(n, n);
  std::vector<int> row(dims.size()), col(dims.size());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      unflatten(r, dims, row);
      unflatten(c, dims, col);
      std::swap(row[subsystem], col[subsystem]);
      out(flatten(row, dims), flatten(col, dims)) = rho.matrix()(r, c);
    }
  }
  return out;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double von_neumann_entropy(const DensityMatrix& rho) { return entropy_of_spectrum(rho.spectrum()); }

double quantum_mutual_information(const DensityMatrix& rho_ab, std::size_t cut) {
  const std::size_t n = rho_ab.subsystems();
  if (cut < 1 || cut >= n) throw PartitionError("cut must split the subsystems into two nonempty parts");
  std::vector<std::size_t> a(cut), b(n - cut);
  std::iota(a.begin(), a.end(), std::size_t{0});
  std::iota(b.begin(), b.end(), cut);
  return von_neumann_entropy(partial_trace(rho_ab, a)) + von_neumann_entropy(partial_trace(rho_ab, b)) -
         von_neumann_entropy(rho_ab);
}

double trace_norm(const Eigen::MatrixXcd& h) {
  if (h.rows() == 2 && h.cols() == 2) {
    const double m = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double half_diff = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double r = std::sqrt(half_diff * half_diff + std::norm(h(0, 1)));
    return 2.0 * std::max(std::abs(m), r);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) throw DimensionMismatch("trace_distance: dims differ");
  return trace_norm(rho.matrix() - sigma.matrix());
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) throw DimensionMismatch("relative_entropy: dims differ");
  constexpr double kKernel = 1e-14;
  constexpr double kOverlap = 1e-10;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma.matrix());
  double cross = 0.0;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    const auto w = es.eigenvectors().col(j);
    const double overlap = (w.adjoint() * rho.matrix() * w)(0, 0).real();
    const double mu = es.eigenvalues()(j);
    if (mu <= kKernel) {
      if (overlap > kOverlap) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross += overlap * std::log2(mu);
  }
  const double value = -von_neumann_entropy(rho) - cross;
  return std::max(value, 0.0);
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const ChannelSnapshot& channel) {
  if (channel.input_dim() != rho.dim()) throw DimensionMismatch("channel input dimension mismatch");
  if (!(channel.completeness_error() <= kKrausTolerance)) {
    throw InvalidChannel("Kraus operators are not trace preserving");
  }
  const int out_n = channel.output_dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_n, out_n);
  for (const auto& k : channel.kraus) out += k * rho.matrix() * k.adjoint();
  Dims dims = out_n == rho.dim() ? rho.dims() : Dims{out_n};
  return DensityMatrix(std::move(dims), out);
}

Eigen::MatrixXcd transfer_matrix(const ChannelSnapshot& channel) {
  const int in = channel.input_dim();
  const int out = channel.output_dim();
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(out * out, in * in);
  for (const auto& k : channel.kraus) t += kron(k.conjugate(), k);
  return t;
}

Eigen::MatrixXcd choi_from_transfer(const Eigen::MatrixXcd& t, int in, int out) {
  // J_{(i,a),(j,b)} = <a| channel(|i><j|) |b>, and vec(|i><j|) has index i + j*in.
  Eigen::MatrixXcd j_mat = Eigen::MatrixXcd::Zero(in * out, in * out);
  for (int i = 0; i < in; ++i) {
    for (int j = 0; j < in; ++j) {
      const auto image = t.col(i + j * in);
      for (int a = 0; a < out; ++a) {
        for (int b = 0; b < out; ++b) j_mat(i * out + a, j * out + b) = image(a + b * out);
      }
    }
  }
  return j_mat;
}

std::vector<Eigen::MatrixXcd> kraus_from_transfer(const Eigen::MatrixXcd& t, int in, int out) {
  Eigen::MatrixXcd j_mat = choi_from_transfer(t, in, out);
  j_mat = 0.5 * (j_mat + j_mat.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(j_mat);
  std::vector<Eigen::MatrixXcd> kraus;
  for (Eigen::Index e = es.eigenvalues().size(); e-- > 0;) {
    const double mu = es.eigenvalues()(e);
    if (mu <= 1e-14) continue;
    Eigen::MatrixXcd k(out, in);
    for (int i = 0; i < in; ++i) {
      for (int a = 0; a < out; ++a) k(a, i) = std::sqrt(mu) * es.eigenvectors()(i * out + a, e);
    }
    kraus.push_back(std::move(k));
  }
  return kraus;
}

DensityMatrix choi_state(const ChannelSnapshot& channel) {
  const int in = channel.input_dim();
  const int out = channel.output_dim();
  Eigen::MatrixXcd j_mat = choi_from_transfer(transfer_matrix(channel), in, out) / static_cast<double>(in);
  return DensityMatrix({in, out}, j_mat);
}

Eigen::Vector3d bloch_vector(const DensityMatrix& q) {
  if (q.dim() != 2) throw DimensionMismatch("bloch_vector needs a qubit");
  const auto& m = q.matrix();
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

DensityMatrix qubit_from_bloch(const Eigen::Vector3d& r) {
  Eigen::Matrix2cd m;
  m << cplx(0.5 * (1 + r.z()), 0), cplx(0.5 * r.x(), -0.5 * r.y()), cplx(0.5 * r.x(), 0.5 * r.y()),
      cplx(0.5 * (1 - r.z()), 0);
  return DensityMatrix({2}, m);
}

}  // namespace nearmark
