#pragma once

// Finite-dimensional state algebra: density matrices, entropies, distances,
// partial traces and Kraus maps.
//
// Conventions used throughout the library:
//  * Entropies are in bits (log base 2). Multiply by ln 2 to get nats.
//  * trace_distance(rho, sigma) = tr|rho - sigma| WITHOUT the usual factor 1/2,
//    so it ranges over [0, 2]. Orthogonal pure states are at distance 2.
//  * Composite systems are ordered with subsystem 0 as the most significant
//    tensor factor, i.e. the Kronecker ordering of A (x) B (x) C.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nearmark {

using cplx = std::complex<double>;
using Dims = std::vector<int>;

inline constexpr double kStateTolerance = 1e-10;
inline constexpr double kKrausTolerance = 1e-9;
inline constexpr int kMaxTotalDim = 64;

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity (all to 1e-10) and
  /// stores the Hermitian part. Throws InvalidState on failure.
  DensityMatrix(Dims dims, const Eigen::MatrixXcd& entries);

  static DensityMatrix maximally_mixed(Dims dims);
  static DensityMatrix basis_state(Dims dims, int index);

  const Dims& dims() const noexcept { return dims_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  std::size_t subsystems() const noexcept { return dims_.size(); }

  /// Eigenvalues in ascending order with jitter in [-1e-10, 0) clamped to 0.
  Eigen::VectorXd spectrum() const;
  double purity() const;

 private:
  Dims dims_;
  Eigen::MatrixXcd m_;
};

class PureState {
 public:
  /// Throws InvalidState unless the amplitudes have unit norm to 1e-10.
  PureState(Dims dims, Eigen::VectorXcd amplitudes);

  const Dims& dims() const noexcept { return dims_; }
  const Eigen::VectorXcd& amplitudes() const noexcept { return psi_; }
  DensityMatrix projector() const;

 private:
  Dims dims_;
  Eigen::VectorXcd psi_;
};

enum class FamilyTag { custom, identity, amplitude_damping, phase_damping, collision };

/// A CPTP map at a fixed time, held as Kraus operators.
struct ChannelSnapshot {
  std::vector<Eigen::MatrixXcd> kraus;
  double time = 0.0;
  FamilyTag family = FamilyTag::custom;
  std::vector<double> parameters;

  int input_dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().cols()); }
  int output_dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().rows()); }
  /// max-abs entry of sum K^dagger K - I.
  double completeness_error() const;
};

ChannelSnapshot identity_channel(int dim);

int total_dim(const Dims& dims);
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Keeps the listed subsystems (in the order given) and traces out the rest.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep);

/// Partial transpose on one subsystem. The result is Hermitian but need not be
/// positive, hence a raw matrix.
Eigen::MatrixXcd partial_transpose(const DensityMatrix& rho, std::size_t subsystem);

double von_neumann_entropy(const DensityMatrix& rho);
double binary_entropy(double p);

/// I(A:B) with A = subsystems [0, cut) and B = [cut, n).
double quantum_mutual_information(const DensityMatrix& rho_ab, std::size_t cut = 1);

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& hermitian);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// tr rho (log2 rho - log2 sigma). Returns +infinity when the support of rho
/// is not contained in the support of sigma.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Throws InvalidChannel if the Kraus set is incomplete to 1e-9.
DensityMatrix apply_kraus(const DensityMatrix& rho, const ChannelSnapshot& channel);

/// (I (x) channel)(|Psi+><Psi+|), reference system first, unit trace.
DensityMatrix choi_state(const ChannelSnapshot& channel);

/// Column-major vectorisation: vec(channel(X)) = T vec(X).
Eigen::MatrixXcd transfer_matrix(const ChannelSnapshot& channel);

/// Recovers a minimal Kraus set from a transfer matrix of a CP map.
std::vector<Eigen::MatrixXcd> kraus_from_transfer(const Eigen::MatrixXcd& transfer, int in_dim,
                                                  int out_dim);

/// Choi matrix (unnormalised, reference first) of the map with transfer matrix T.
Eigen::MatrixXcd choi_from_transfer(const Eigen::MatrixXcd& transfer, int in_dim, int out_dim);

Eigen::Vector3d bloch_vector(const DensityMatrix& qubit);
DensityMatrix qubit_from_bloch(const Eigen::Vector3d& r);

}  // namespace nearmark
