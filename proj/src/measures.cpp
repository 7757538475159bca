#include "nearmark/measures.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <thread>

#include "nearmark/errors.hpp"

namespace nearmark {

namespace {

constexpr int kCertificationPoints = 200;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Transfer = Eigen::Matrix4cd;
using VecState = Eigen::Vector4cd;

VecState vectorise(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionMismatch("measures act on qubit states");
  const auto& m = rho.matrix();
  return {m(0, 0), m(1, 0), m(0, 1), m(1, 1)};
}

Eigen::Matrix2cd unvectorise(const VecState& v) {
  Eigen::Matrix2cd m;
  m << v(0), v(2), v(1), v(3);
  return m;
}

// Trace norm of the Hermitian 2x2 matrix whose column-major vectorisation is d.
double trace_norm_vec(const VecState& d) {
  const double m = 0.5 * (d(0).real() + d(3).real());
  const double half_diff = 0.5 * (d(0).real() - d(3).real());
  const double r = std::sqrt(half_diff * half_diff + std::norm(d(2)));
  return 2.0 * std::max(std::abs(m), r);
}

double state_distance(const Transfer& probe, const Transfer& cand, const VecState& v, DistanceBackend backend) {
  if (backend == DistanceBackend::trace) return trace_norm_vec((probe - cand) * v);
  const DensityMatrix a({2}, unvectorise(probe * v));
  const DensityMatrix b({2}, unvectorise(cand * v));
  return relative_entropy(a, b);
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

struct CandidateScore {
  double value;
  std::size_t state;
};

template <typename Family, typename Rate>
bool rate_nonnegative(const Family& fam, double horizon, Rate rate) {
  for (double t : uniform_grid(0.0, horizon, kCertificationPoints)) {
    try {
      if (rate(fam, t) < -kRateTolerance) return false;
    } catch (const PoleError&) {
      return false;
    }
  }
  return true;
}

MeasureResult state_measure(const ChannelFamily& probe, double t, const CandidateSet& candidates,
                            std::span<const DensityMatrix> states, const MeasureOptions& options, MeasureMode mode) {
  if (candidates.members.empty()) throw ConfigError("candidate set is empty");
  if (states.empty()) throw ConfigError("state set is empty");
  const bool maximise_states = mode == MeasureMode::max;
  const Transfer probe_t = family_transfer(probe, t);
  std::vector<VecState> vecs;
  vecs.reserve(states.size());
  for (const auto& s : states) vecs.push_back(vectorise(s));

  const std::size_t n = candidates.members.size();
  std::vector<Transfer> cand_t(n);
  for (std::size_t j = 0; j < n; ++j) cand_t[j] = family_transfer(candidates.members[j], t);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<CandidateScore> scores(n);
  parallel_for(n, resolve_threads(options.threads), [&](std::size_t j) {
    CandidateScore best{maximise_states ? -kInf : kInf, 0};
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      const double d = state_distance(probe_t, cand_t[j], vecs[i], options.backend);
      if (maximise_states ? d > best.value : d < best.value) best = {d, i};
    }
    scores[j] = best;
  });

  MeasureResult result;
  result.time = t;
  result.mode = mode;
  result.epsilon = candidates.epsilon;
  result.backend = options.backend;
  result.value = kInf;
  bool found = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(scores[j].value)) continue;
    if (!found || scores[j].value < result.value) {
      found = true;
      result.value = scores[j].value;
      result.candidate_index = j;
      result.state_index = scores[j].state;
    }
  }
  if (found) {
    result.argmin_parameter = family_parameter(candidates.members[result.candidate_index]);
    result.probe_state = states[*result.state_index];
  }
  return result;
}

}  // namespace

ChannelSnapshot snapshot(const ChannelFamily& family, double t) {
  return std::visit(overloaded{[t](const AmplitudeDampingFamily& f) { return ad_snapshot(f, t); },
                               [t](const PhaseDampingFamily& f) { return pd_snapshot(f, t); },
                               [t](const CollisionChannelFamily& f) { return f.snapshot(t); }},
                    family);
}

Eigen::MatrixXcd family_transfer(const ChannelFamily& family, double t) {
  if (const auto* c = std::get_if<CollisionChannelFamily>(&family)) return c->transfer(t);
  return transfer_matrix(snapshot(family, t));
}

FamilyTag family_tag(const ChannelFamily& family) {
  return std::visit(overloaded{[](const AmplitudeDampingFamily&) { return FamilyTag::amplitude_damping; },
                               [](const PhaseDampingFamily&) { return FamilyTag::phase_damping; },
                               [](const CollisionChannelFamily&) { return FamilyTag::collision; }},
                    family);
}

double family_parameter(const ChannelFamily& family) {
  return std::visit(overloaded{[](const AmplitudeDampingFamily& f) { return f.gamma0; },
                               [](const PhaseDampingFamily& f) { return f.s; },
                               [](const CollisionChannelFamily& f) { return f.epsilon(); }},
                    family);
}

std::string to_string(MeasureMode mode) {
  switch (mode) {
    case MeasureMode::max:
      return "max";
    case MeasureMode::min:
      return "min";
    case MeasureMode::cjks:
      return "cjks";
  }
  return "?";
}

std::string to_string(DistanceBackend backend) {
  return backend == DistanceBackend::trace ? "trace" : "relative_entropy";
}

MeasureMode parse_mode(const std::string& text) {
  if (text == "max") return MeasureMode::max;
  if (text == "min") return MeasureMode::min;
  if (text == "cjks") return MeasureMode::cjks;
  throw ConfigError("unknown mode '" + text + "' (expected max, min or cjks)");
}

DistanceBackend parse_backend(const std::string& text) {
  if (text == "trace") return DistanceBackend::trace;
  if (text == "relative_entropy") return DistanceBackend::relative_entropy;
  throw ConfigError("unknown distance backend '" + text + "' (expected trace or relative_entropy)");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NEARMARK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

CandidateSet make_divisible_candidates(const ChannelFamily& probe, const SampleConfig& config, double horizon) {
  config.validate();
  CandidateSet set;
  set.config = config;
  set.epsilon = 0.0;
  set.members.reserve(config.n_maps);
  for (int j = 0; j < config.n_maps; ++j) {
    Rng rng = cell_rng(config.seed, StreamKind::maps, static_cast<std::uint64_t>(j));
    if (const auto* ad = std::get_if<AmplitudeDampingFamily>(&probe)) {
      set.family = FamilyTag::amplitude_damping;
      set.members.emplace_back(draw_divisible_ad(ad->lambda, rng, config.gamma_margin));
    } else if (const auto* pd = std::get_if<PhaseDampingFamily>(&probe)) {
      set.family = FamilyTag::phase_damping;
      set.members.emplace_back(draw_divisible_pd(pd->omega_c, rng, config.s_min, config.s_max));
    } else {
      throw ConfigError("divisible candidates need an amplitude or phase damping probe");
    }
  }
  const bool probe_divisible =
      std::visit(overloaded{[](const AmplitudeDampingFamily& f) { return f.analytically_divisible(); },
                            [](const PhaseDampingFamily& f) { return f.analytically_divisible(); },
                            [](const CollisionChannelFamily&) { return false; }},
                 probe);
  if (probe_divisible) set.members.push_back(probe);
  if (!certify(set, horizon)) throw std::logic_error("sampled candidate failed divisibility certification");
  return set;
}

CandidateSet make_collision_candidates(double epsilon, const SampleConfig& config, double step_time, int steps) {
  config.validate();
  if (!(epsilon > 0.0 && epsilon <= 2.0)) throw ConfigError("collision candidates need epsilon in (0, 2]");
  CandidateSet set;
  set.config = config;
  set.epsilon = epsilon;
  set.family = FamilyTag::collision;
  set.members.reserve(config.n_maps);
  for (int j = 0; j < config.n_maps; ++j) {
    Rng rng = cell_rng(config.seed, StreamKind::maps, static_cast<std::uint64_t>(j));
    std::uniform_real_distribution<double> u(0.0, epsilon);
    const double eps_j = epsilon - u(rng);  // (0, epsilon]
    const CollisionTrace trace = run_collision_model(CollisionModel(eps_j, steps), steps);
    set.members.emplace_back(CollisionChannelFamily(trace, step_time));
  }
  return set;
}

bool certify(const CandidateSet& candidates, double horizon) {
  for (const auto& member : candidates.members) {
    const bool ok = std::visit(
        overloaded{[&](const AmplitudeDampingFamily& f) {
                     return f.analytically_divisible() && rate_nonnegative(f, horizon, ad_decay_rate);
                   },
                   [&](const PhaseDampingFamily& f) {
                     return f.analytically_divisible() && rate_nonnegative(f, horizon, pd_dephasing_rate);
                   },
                   [&](const CollisionChannelFamily& f) {
                     // Collision maps are certified by construction; re-check the epsilon range.
                     return f.epsilon() <= candidates.epsilon + 1e-12 && f.max_steps() >= 0;
                   }},
        member);
    if (!ok) return false;
  }
  return true;
}

MeasureResult max_distance_measure(const ChannelFamily& probe, double t, const CandidateSet& candidates,
                                   std::span<const DensityMatrix> states, const MeasureOptions& options) {
  return state_measure(probe, t, candidates, states, options, MeasureMode::max);
}

MeasureResult min_distance_measure(const ChannelFamily& probe, double t, const CandidateSet& candidates,
                                   std::span<const DensityMatrix> states, const MeasureOptions& options) {
  return state_measure(probe, t, candidates, states, options, MeasureMode::min);
}

MeasureResult cjks_measure(const ChannelFamily& probe, double t, const CandidateSet& candidates,
                           const MeasureOptions& options) {
  if (candidates.members.empty()) throw ConfigError("candidate set is empty");
  const Eigen::MatrixXcd probe_choi = choi_from_transfer(family_transfer(probe, t), 2, 2) / 2.0;
  const std::size_t n = candidates.members.size();
  std::vector<double> values(n);
  parallel_for(n, resolve_threads(options.threads), [&](std::size_t j) {
    const Eigen::MatrixXcd cand_choi = choi_from_transfer(family_transfer(candidates.members[j], t), 2, 2) / 2.0;
    if (options.backend == DistanceBackend::trace) {
      values[j] = trace_norm(0.5 * ((probe_choi - cand_choi) + (probe_choi - cand_choi).adjoint()));
    } else {
      values[j] = relative_entropy(DensityMatrix({2, 2}, probe_choi), DensityMatrix({2, 2}, cand_choi));
    }
  });
  MeasureResult result;
  result.time = t;
  result.mode = MeasureMode::cjks;
  result.epsilon = candidates.epsilon;
  result.backend = options.backend;
  result.value = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(values[j])) continue;
    if (!found || values[j] < result.value) {
      found = true;
      result.value = values[j];
      result.candidate_index = j;
    }
  }
  if (found) result.argmin_parameter = family_parameter(candidates.members[result.candidate_index]);
  return result;
}

std::vector<MeasureResult> measure_curve(const ChannelFamily& probe, std::span<const double> t_grid, MeasureMode mode,
                                         const CandidateSet& candidates, std::span<const DensityMatrix> states,
                                         const MeasureOptions& options) {
  std::vector<MeasureResult> curve;
  curve.reserve(t_grid.size());
  for (double t : t_grid) {
    switch (mode) {
      case MeasureMode::max:
        curve.push_back(max_distance_measure(probe, t, candidates, states, options));
        break;
      case MeasureMode::min:
        curve.push_back(min_distance_measure(probe, t, candidates, states, options));
        break;
      case MeasureMode::cjks:
        curve.push_back(cjks_measure(probe, t, candidates, options));
        break;
    }
  }
  return curve;
}

}  // namespace nearmark
