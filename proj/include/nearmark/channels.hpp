#pragma once

// Time-dependent qubit damping channels.
//
// Amplitude damping follows rho' = gamma_a(t) [s- rho s+ - {s+ s-, rho}/2] with
// the Lorentzian-bath rate
//   gamma_a(t) = 2 lambda gamma0 sinh(gt/2) / (g cosh(gt/2) + lambda sinh(gt/2)),
//   g = sqrt(lambda^2 - 2 gamma0 lambda),
// whose solution is rho_ee(t) = G(t)^2 rho_ee(0), rho_eg(t) = G(t) rho_eg(0) with
//   G(t) = exp(-lambda t/2) [cosh(gt/2) + (lambda/g) sinh(gt/2)].
// Phase damping follows rho' = gamma(t)/2 [sz rho sz - rho] with the zero
// temperature Ohmic-like rate
//   gamma(t) = w_c [1 + (w_c t)^2]^(-s/2) Gamma(s) sin(s atan(w_c t)),
// so coherences decay as exp(-int_0^t gamma).
//
// Times are measured in units of kappa (rates in 1/kappa). Basis: |0> is the
// ground state |g>, |1> the excited state |e>.

#include <optional>
#include <span>
#include <vector>

#include "nearmark/quantum.hpp"

namespace nearmark {

struct AmplitudeDampingFamily {
  double gamma0;
  double lambda;

  /// Throws RangeError unless gamma0 > 0 and lambda > 0.
  AmplitudeDampingFamily(double gamma0, double lambda);

  /// sqrt(lambda^2 - 2 gamma0 lambda); purely imaginary when gamma0 > lambda/2.
  cplx g() const;
  bool g_is_imaginary() const { return 2.0 * gamma0 > lambda; }
  /// Divisible iff lambda >= 2 gamma0 (the rate never turns negative).
  bool analytically_divisible() const { return lambda >= 2.0 * gamma0; }

  friend bool operator==(const AmplitudeDampingFamily&, const AmplitudeDampingFamily&) = default;
};

struct PhaseDampingFamily {
  double s;
  double omega_c;

  /// Throws RangeError unless s > 0 and omega_c > 0.
  PhaseDampingFamily(double s, double omega_c);

  /// Zero-temperature dephasing is divisible iff s <= 2.
  bool analytically_divisible() const { return s <= 2.0; }

  friend bool operator==(const PhaseDampingFamily&, const PhaseDampingFamily&) = default;
};

/// Throws PoleError within 1e-9 of a pole (only possible for imaginary g).
double ad_decay_rate(const AmplitudeDampingFamily& fam, double t);

/// Times t in [0, horizon] where the denominator of gamma_a vanishes (G(t) = 0).
std::vector<double> ad_rate_poles(const AmplitudeDampingFamily& fam, double horizon);

/// Real-valued for all parameters; returned as complex to keep the general form.
cplx ad_decoherence_function(const AmplitudeDampingFamily& fam, double t);

/// Kraus pair {diag(1, G), sqrt(1 - G^2) |0><1|}. Finite at rate poles.
ChannelSnapshot ad_snapshot(const AmplitudeDampingFamily& fam, double t);

/// |e,0> -> G|e,0> + sqrt(1-G^2)|g,1>, |g,0> -> |g,0>, applied to rho_s (x) |0><0|_E.
/// Output dims are {2, 2} with the system first.
DensityMatrix ad_dilation(const AmplitudeDampingFamily& fam, double t, const DensityMatrix& rho_s);

double pd_dephasing_rate(const PhaseDampingFamily& fam, double t);

/// int_0^t gamma(u) du, evaluated in closed form:
///   Gamma(s-1) [1 - cos((s-1) atan x) (1+x^2)^((1-s)/2)],  x = w_c t,
/// with the s -> 1 limit log(1+x^2)/2.
double pd_integrated_rate(const PhaseDampingFamily& fam, double t);

/// exp(-pd_integrated_rate).
double pd_coherence_factor(const PhaseDampingFamily& fam, double t);

/// First t in (0, horizon] where the dephasing rate changes sign from
/// positive to negative, bracketed on a `points` grid and refined by bisection.
std::optional<double> pd_first_rate_zero(const PhaseDampingFamily& fam, double horizon, int points = 2000);

/// Phase-flip Kraus pair with coherence multiplier pd_coherence_factor.
ChannelSnapshot pd_snapshot(const PhaseDampingFamily& fam, double t);

/// |0,0> -> |0,0>, |1,0> -> |1>(c|0> + sqrt(1-c^2)|1>) on rho_s (x) |0><0|_E.
DensityMatrix pd_dilation(const PhaseDampingFamily& fam, double t, const DensityMatrix& rho_s);

struct DivisibilityReport {
  bool divisible = true;
  std::optional<double> first_violation;
  /// Cross-check: every intermediate map between consecutive grid times has a
  /// Choi matrix with smallest eigenvalue >= -1e-8.
  bool choi_divisible = true;
  std::optional<double> first_choi_violation;
  double min_choi_eigenvalue = 0.0;
};

inline constexpr int kDefaultDivisibilityPoints = 2000;
inline constexpr double kRateTolerance = 1e-9;
inline constexpr double kChoiTolerance = 1e-8;

/// Rate positivity on every grid point (poles count as violations) plus the
/// intermediate-map Choi cross-check.
DivisibilityReport is_divisible(const AmplitudeDampingFamily& fam, std::span<const double> t_grid);
DivisibilityReport is_divisible(const PhaseDampingFamily& fam, std::span<const double> t_grid);

std::vector<double> uniform_grid(double start, double stop, int points);

/// Smallest Choi eigenvalue of later o earlier^{-1}, or nullopt if earlier is singular.
std::optional<double> intermediate_map_min_choi_eigenvalue(const ChannelSnapshot& earlier,
                                                           const ChannelSnapshot& later);

}  // namespace nearmark
