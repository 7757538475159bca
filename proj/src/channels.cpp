#include "nearmark/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nearmark/errors.hpp"

namespace nearmark {

namespace {

constexpr double kPoleDistance = 1e-9;
constexpr double kImagResidue = 1e-12;

// sinh(z)/z, with the series for small |z|.
cplx sinhc(cplx z) {
  if (std::abs(z) < 1e-5) return 1.0 + z * z / 6.0;
  return std::sinh(z) / z;
}

double real_checked(cplx v, const char* what) {
  if (std::abs(v.imag()) > kImagResidue * std::max(1.0, std::abs(v.real()))) {
    throw std::logic_error(std::string(what) + ": imaginary residue above 1e-12");
  }
  return v.real();
}

void check_time(double t) {
  if (!(t >= 0.0)) throw RangeError("time must be non-negative");
}

// The pole sequence t_k = 2 (pi - atan(w/lambda) + k pi) / w for g = i w.
double first_pole(const AmplitudeDampingFamily& fam, double omega) {
  return 2.0 * (std::numbers::pi - std::atan(omega / fam.lambda)) / omega;
}

}  // namespace

AmplitudeDampingFamily::AmplitudeDampingFamily(double gamma0_, double lambda_)
    : gamma0(gamma0_), lambda(lambda_) {
  if (!(gamma0 > 0.0) || !(lambda > 0.0)) throw RangeError("amplitude damping needs gamma0 > 0 and lambda > 0");
}

cplx AmplitudeDampingFamily::g() const { return std::sqrt(cplx(lambda * lambda - 2.0 * gamma0 * lambda, 0.0)); }

PhaseDampingFamily::PhaseDampingFamily(double s_, double omega_c_) : s(s_), omega_c(omega_c_) {
  if (!(s > 0.0) || !(omega_c > 0.0)) throw RangeError("phase damping needs s > 0 and omega_c > 0");
}

std::vector<double> ad_rate_poles(const AmplitudeDampingFamily& fam, double horizon) {
  std::vector<double> poles;
  if (!fam.g_is_imaginary()) return poles;
  const double omega = fam.g().imag();
  const double period = 2.0 * std::numbers::pi / omega;
  for (double t = first_pole(fam, omega); t <= horizon; t += period) poles.push_back(t);
  return poles;
}

double ad_decay_rate(const AmplitudeDampingFamily& fam, double t) {
  check_time(t);
  const cplx g = fam.g();
  if (fam.g_is_imaginary()) {
    const double omega = g.imag();
    const double t0 = first_pole(fam, omega);
    const double period = 2.0 * std::numbers::pi / omega;
    const double k = std::max(0.0, std::round((t - t0) / period));
    const double nearest = t0 + k * period;
    if (std::abs(t - nearest) < kPoleDistance) {
      std::ostringstream msg;
      msg << "decay rate evaluated within 1e-9 of its pole at t = " << nearest;
      throw PoleError(msg.str(), nearest);
    }
  }
  const cplx z = 0.5 * g * t;
  const double prefactor = 2.0 * fam.lambda * fam.gamma0;
  cplx rate;
  if (z.real() > 20.0) {
    const cplx th = std::tanh(z);
    rate = prefactor * th / (g + fam.lambda * th);
  } else {
    const cplx s = 0.5 * t * sinhc(z);  // sinh(gt/2) / g
    rate = prefactor * s / (std::cosh(z) + fam.lambda * s);
  }
  return real_checked(rate, "ad_decay_rate");
}

cplx ad_decoherence_function(const AmplitudeDampingFamily& fam, double t) {
  check_time(t);
  const cplx g = fam.g();
  const cplx z = 0.5 * g * t;
  cplx value;
  if (z.real() > 300.0) {
    value = 0.5 * std::exp(0.5 * (g - fam.lambda) * t) * (1.0 + fam.lambda / g) +
            0.5 * std::exp(-0.5 * (g + fam.lambda) * t) * (1.0 - fam.lambda / g);
  } else {
    value = std::exp(-0.5 * fam.lambda * t) * (std::cosh(z) + fam.lambda * 0.5 * t * sinhc(z));
  }
  return {real_checked(value, "ad_decoherence_function"), 0.0};
}

ChannelSnapshot ad_snapshot(const AmplitudeDampingFamily& fam, double t) {
  const double g_t = std::clamp(ad_decoherence_function(fam, t).real(), -1.0, 1.0);
  ChannelSnapshot c;
  Eigen::MatrixXcd k0 = Eigen::MatrixXcd::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = g_t;
  Eigen::MatrixXcd k1 = Eigen::MatrixXcd::Zero(2, 2);
  k1(0, 1) = std::sqrt(std::max(0.0, 1.0 - g_t * g_t));
  c.kraus = {k0, k1};
  c.time = t;
  c.family = FamilyTag::amplitude_damping;
  c.parameters = {fam.gamma0, fam.lambda};
  return c;
}

DensityMatrix ad_dilation(const AmplitudeDampingFamily& fam, double t, const DensityMatrix& rho_s) {
  if (rho_s.dim() != 2) throw DimensionMismatch("ad_dilation needs a qubit system state");
  const double g_t = std::clamp(ad_decoherence_function(fam, t).real(), -1.0, 1.0);
  const double leak = std::sqrt(std::max(0.0, 1.0 - g_t * g_t));
  // Basis |s e>: |00>=0, |01>=1, |10>=2, |11>=3. Rotation in span{|10>, |01>}.
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  u(2, 2) = g_t;
  u(1, 2) = leak;
  u(2, 1) = -leak;
  u(1, 1) = g_t;
  const DensityMatrix joint = tensor(rho_s, DensityMatrix::basis_state({2}, 0));
  return DensityMatrix({2, 2}, u * joint.matrix() * u.adjoint());
}

double pd_dephasing_rate(const PhaseDampingFamily& fam, double t) {
  check_time(t);
  const double x = fam.omega_c * t;
  return fam.omega_c * std::pow(1.0 + x * x, -0.5 * fam.s) * std::tgamma(fam.s) * std::sin(fam.s * std::atan(x));
}

double pd_integrated_rate(const PhaseDampingFamily& fam, double t) {
  check_time(t);
  const double x = fam.omega_c * t;
  const double theta = std::atan(x);
  const double half_log = 0.5 * std::log1p(x * x);  // -log cos(theta)
  const double eps = fam.s - 1.0;
  if (std::abs(eps) < 1e-12) return half_log;
  if (std::abs(eps) < 0.5) {
    // 1 - cos(eps theta) cos(theta)^eps without cancellation near s = 1.
    const double sin_half = std::sin(0.5 * eps * theta);
    const double log_term = -eps * half_log + std::log1p(-2.0 * sin_half * sin_half);
    return -std::tgamma(eps) * std::expm1(log_term);
  }
  return std::tgamma(eps) * (1.0 - std::cos(eps * theta) * std::exp(-eps * half_log));
}

double pd_coherence_factor(const PhaseDampingFamily& fam, double t) { return std::exp(-pd_integrated_rate(fam, t)); }

std::optional<double> pd_first_rate_zero(const PhaseDampingFamily& fam, double horizon, int points) {
  const auto grid = uniform_grid(0.0, horizon, points);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (pd_dephasing_rate(fam, grid[i]) > 0.0 && pd_dephasing_rate(fam, grid[i + 1]) <= 0.0) {
      double lo = grid[i];
      double hi = grid[i + 1];
      for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pd_dephasing_rate(fam, mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::nullopt;
}

ChannelSnapshot pd_snapshot(const PhaseDampingFamily& fam, double t) {
  const double c = std::clamp(pd_coherence_factor(fam, t), -1.0, 1.0);
  ChannelSnapshot snap;
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(2, 2);
  z(1, 1) = -1.0;
  snap.kraus = {std::sqrt(0.5 * (1.0 + c)) * Eigen::MatrixXcd::Identity(2, 2), std::sqrt(0.5 * (1.0 - c)) * z};
  snap.time = t;
  snap.family = FamilyTag::phase_damping;
  snap.parameters = {fam.s, fam.omega_c};
  return snap;
}

DensityMatrix pd_dilation(const PhaseDampingFamily& fam, double t, const DensityMatrix& rho_s) {
  if (rho_s.dim() != 2) throw DimensionMismatch("pd_dilation needs a qubit system state");
  const double c = std::clamp(pd_coherence_factor(fam, t), -1.0, 1.0);
  const double leak = std::sqrt(std::max(0.0, 1.0 - c * c));
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  // Controlled rotation of E when S is excited: span{|10>, |11>}.
  u(2, 2) = c;
  u(3, 2) = leak;
  u(2, 3) = -leak;
  u(3, 3) = c;
  const DensityMatrix joint = tensor(rho_s, DensityMatrix::basis_state({2}, 0));
  return DensityMatrix({2, 2}, u * joint.matrix() * u.adjoint());
}

std::vector<double> uniform_grid(double start, double stop, int points) {
  if (points < 2) throw RangeError("grid needs at least two points");
  if (!(stop > start)) throw RangeError("grid stop must exceed start");
  std::vector<double> grid(points);
  const double step = (stop - start) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = start + step * i;
  grid.back() = stop;
  return grid;
}

std::optional<double> intermediate_map_min_choi_eigenvalue(const ChannelSnapshot& earlier,
                                                           const ChannelSnapshot& later) {
  const Eigen::MatrixXcd t1 = transfer_matrix(earlier);
  const Eigen::MatrixXcd t2 = transfer_matrix(later);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(t1);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::MatrixXcd inter = t2 * lu.inverse();
  const int d = earlier.input_dim();
  Eigen::MatrixXcd choi = choi_from_transfer(inter, d, d);
  choi = 0.5 * (choi + choi.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(choi, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() / d;
}

namespace {

template <typename Family, typename RateFn, typename SnapFn>
DivisibilityReport divisibility_scan(const Family& fam, std::span<const double> grid, RateFn rate, SnapFn snap) {
  DivisibilityReport report;
  for (double t : grid) {
    bool violated = false;
    try {
      violated = rate(fam, t) < -kRateTolerance;
    } catch (const PoleError&) {
      violated = true;
    }
    if (violated) {
      report.divisible = false;
      report.first_violation = t;
      break;
    }
  }
  double min_eig = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto e = intermediate_map_min_choi_eigenvalue(snap(fam, grid[i - 1]), snap(fam, grid[i]));
    if (!e) continue;
    min_eig = std::min(min_eig, *e);
    if (*e < -kChoiTolerance && report.choi_divisible) {
      report.choi_divisible = false;
      report.first_choi_violation = grid[i];
    }
  }
  report.min_choi_eigenvalue = min_eig;
  return report;
}

}  // namespace

DivisibilityReport is_divisible(const AmplitudeDampingFamily& fam, std::span<const double> t_grid) {
  return divisibility_scan(fam, t_grid, ad_decay_rate, ad_snapshot);
}

DivisibilityReport is_divisible(const PhaseDampingFamily& fam, std::span<const double> t_grid) {
  return divisibility_scan(fam, t_grid, pd_dephasing_rate, pd_snapshot);
}

}  // namespace nearmark
