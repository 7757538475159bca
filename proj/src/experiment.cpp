#include "nearmark/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nearmark/channels.hpp"
#include "nearmark/collision.hpp"
#include "nearmark/errors.hpp"

namespace nearmark {

namespace {

namespace pt = boost::property_tree;

constexpr int kCiMaps = 200;
constexpr int kCiStates = 200;
constexpr int kCiPoints = 50;
constexpr int kDefaultCollisionSteps = 100;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"probe", {"family", "gamma0", "lambda", "s", "omega_c"}},
      {"measure", {"mode", "epsilon", "distance", "threads"}},
      {"grid", {"start", "stop", "points", "axis"}},
      {"sampling", {"seed", "n_states", "n_maps", "gamma_margin", "s_min", "s_max"}},
      {"collision", {"step_time"}},
      {"bound", {"entanglement_budget", "diameter_pairs", "seed"}},
      {"output", {"path"}},
  };
  return keys;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  try {
    return tree.get<T>(key, fallback);
  } catch (const pt::ptree_error& e) {
    throw ConfigError("bad value for " + key + ": " + e.what());
  }
}

template <typename T>
T require(const pt::ptree& tree, const std::string& key) {
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_error& e) {
    throw ConfigError("missing or bad value for " + key + ": " + e.what());
  }
}

TimeAxis parse_axis(const std::string& text) {
  if (text == "gt_over_i") return TimeAxis::gt_over_i;
  if (text == "omega_c_t") return TimeAxis::omega_c_t;
  if (text == "t") return TimeAxis::t;
  throw ConfigError("unknown time axis: " + text);
}

ChannelFamily parse_probe(const pt::ptree& tree) {
  const auto family = require<std::string>(tree, "probe.family");
  try {
    if (family == "amplitude_damping") {
      return AmplitudeDampingFamily(require<double>(tree, "probe.gamma0"), require<double>(tree, "probe.lambda"));
    }
    if (family == "phase_damping") {
      return PhaseDampingFamily(require<double>(tree, "probe.s"), get<double>(tree, "probe.omega_c", 1.0));
    }
  } catch (const RangeError& e) {
    throw ConfigError(std::string("invalid probe parameters: ") + e.what());
  }
  throw ConfigError("unknown probe family: " + family);
}

CandidateSet candidates_for(const ExperimentConfig& config, double horizon) {
  if (config.epsilon == 0.0) return make_divisible_candidates(config.probe, config.sampling, horizon);
  const double step = config.step_time > 0.0 ? config.step_time : horizon / kDefaultCollisionSteps;
  const int steps = std::max(1, static_cast<int>(std::ceil(horizon / step - 1e-9)));
  return make_collision_candidates(config.epsilon, config.sampling, step, steps);
}

}  // namespace

Profile parse_profile(const std::string& text) {
  if (text == "full") return Profile::full;
  if (text == "ci") return Profile::ci;
  throw ConfigError("unknown profile: " + text);
}

void ExperimentConfig::validate() const {
  if (grid_points < 2) throw ConfigError("grid.points must be at least 2");
  if (!(grid_start >= 0.0) || !(grid_stop > grid_start)) throw ConfigError("grid needs 0 <= start < stop");
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) throw ConfigError("measure.epsilon must lie in [0, 2]");
  if (step_time < 0.0) throw ConfigError("collision.step_time must be non-negative");
  if (threads < 0) throw ConfigError("measure.threads must be non-negative");
  if (bound.entanglement_budget < 1 || bound.diameter_pairs < 1) throw ConfigError("bound budgets must be positive");
  if (mode == MeasureMode::cjks && backend == DistanceBackend::relative_entropy) {
    throw ConfigError("cjks mode supports the trace distance only");
  }
  const auto* ad = std::get_if<AmplitudeDampingFamily>(&probe);
  const auto* pd = std::get_if<PhaseDampingFamily>(&probe);
  if (axis == TimeAxis::gt_over_i && !(ad && ad->g_is_imaginary())) {
    throw ConfigError("axis gt_over_i needs an amplitude damping probe with imaginary g");
  }
  if (axis == TimeAxis::omega_c_t && !pd) throw ConfigError("axis omega_c_t needs a phase damping probe");
  sampling.validate();
}

std::vector<double> ExperimentConfig::axis_grid() const { return uniform_grid(grid_start, grid_stop, grid_points); }

double ExperimentConfig::to_time(double axis_value) const {
  switch (axis) {
    case TimeAxis::gt_over_i:
      return axis_value / std::abs(std::get<AmplitudeDampingFamily>(probe).g());
    case TimeAxis::omega_c_t:
      return axis_value / std::get<PhaseDampingFamily>(probe).omega_c;
    case TimeAxis::t:
      return axis_value;
  }
  return axis_value;
}

ExperimentConfig apply_profile(ExperimentConfig config, Profile profile) {
  if (profile == Profile::ci) {
    config.sampling.n_maps = std::min(config.sampling.n_maps, kCiMaps);
    config.sampling.n_states = std::min(config.sampling.n_states, kCiStates);
    config.grid_points = std::min(config.grid_points, kCiPoints);
  }
  return config;
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ptree_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) throw ConfigError("unknown section: " + section);
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("unknown key: " + section + "." + key);
    }
  }

  ExperimentConfig c;
  c.probe = parse_probe(tree);
  c.mode = parse_mode(get<std::string>(tree, "measure.mode", "max"));
  c.epsilon = get<double>(tree, "measure.epsilon", 0.0);
  c.backend = parse_backend(get<std::string>(tree, "measure.distance", "trace"));
  c.threads = get<int>(tree, "measure.threads", 0);
  c.grid_start = get<double>(tree, "grid.start", 0.0);
  c.grid_stop = require<double>(tree, "grid.stop");
  c.grid_points = get<int>(tree, "grid.points", 2000);
  c.axis = parse_axis(get<std::string>(tree, "grid.axis", "t"));
  c.sampling.seed = get<std::uint64_t>(tree, "sampling.seed", c.sampling.seed);
  c.sampling.n_states = get<int>(tree, "sampling.n_states", c.sampling.n_states);
  c.sampling.n_maps = get<int>(tree, "sampling.n_maps", c.sampling.n_maps);
  c.sampling.gamma_margin = get<double>(tree, "sampling.gamma_margin", c.sampling.gamma_margin);
  c.sampling.s_min = get<double>(tree, "sampling.s_min", c.sampling.s_min);
  c.sampling.s_max = get<double>(tree, "sampling.s_max", c.sampling.s_max);
  c.step_time = get<double>(tree, "collision.step_time", 0.0);
  c.bound.entanglement_budget = get<int>(tree, "bound.entanglement_budget", c.bound.entanglement_budget);
  c.bound.diameter_pairs = get<int>(tree, "bound.diameter_pairs", c.bound.diameter_pairs);
  c.bound.seed = get<std::uint64_t>(tree, "bound.seed", c.bound.seed);
  c.output_path = get<std::string>(tree, "output.path", "");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  return parse_config(in);
}

ExperimentRun run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentRun run;
  run.axis = config.axis_grid();
  std::vector<double> times;
  times.reserve(run.axis.size());
  for (double x : run.axis) times.push_back(config.to_time(x));
  const CandidateSet candidates = candidates_for(config, times.back());
  const std::vector<DensityMatrix> states =
      config.mode == MeasureMode::cjks ? std::vector<DensityMatrix>{} : sample_qubit_states(config.sampling);
  MeasureOptions options;
  options.backend = config.backend;
  options.threads = config.threads;
  run.results = measure_curve(config.probe, times, config.mode, candidates, states, options);
  return run;
}

void write_curve_csv(std::ostream& out, const ExperimentConfig& config, const ExperimentRun& run) {
  out << std::setprecision(17);
  out << "time_axis,value,mode,epsilon,argmin_param,probe_param,seed\n";
  const double probe_param = family_parameter(config.probe);
  for (std::size_t i = 0; i < run.results.size(); ++i) {
    const MeasureResult& r = run.results[i];
    out << run.axis[i] << ',' << r.value << ',' << to_string(r.mode) << ',' << r.epsilon << ','
        << r.argmin_parameter << ',' << probe_param << ',' << config.sampling.seed << '\n';
  }
}

bool BoundRun::all_hold() const {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.holds; });
}

BoundRun run_bound_report(const ExperimentConfig& config) {
  if (config.mode == MeasureMode::cjks) throw ConfigError("bound reports need max or min mode");
  if (config.backend != DistanceBackend::trace) throw ConfigError("bound reports need the trace distance");
  const ExperimentRun run = run_experiment(config);
  const Dilation dilation = dilation_for(config.probe);
  BoundRun out;
  out.axis = run.axis;
  for (const MeasureResult& r : run.results) out.reports.push_back(verify_bound(r, dilation, config.epsilon, config.bound));
  return out;
}

void write_bound_csv(std::ostream& out, const BoundRun& run) {
  out << std::setprecision(17);
  out << "time_axis,N,E,d,slack\n";
  for (std::size_t i = 0; i < run.reports.size(); ++i) {
    const BoundReport& r = run.reports[i];
    out << run.axis[i] << ',' << r.measure << ',' << r.entanglement << ',' << r.diameter << ',' << r.slack << '\n';
  }
}

void write_collision_csv(std::ostream& out, const CollisionTrace& trace) {
  out << std::setprecision(17);
  out << "step,I_Q\n";
  for (const auto& s : trace.steps) out << s.step << ',' << s.mutual_information << '\n';
}

}  // namespace nearmark
