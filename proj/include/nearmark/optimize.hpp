#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nearmark {

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free simplex minimisation (GSL nmsimplex2). Stops after
/// max_evaluations objective calls or once the simplex size drops below tol.
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, double initial_step, int max_evaluations,
                           double tol = 1e-10);

/// Largest x in [lo, hi] with feasible(x), assuming feasibility is monotone
/// (feasible(lo) holds). Returns hi when hi itself is feasible.
double bisect_largest_feasible(const std::function<bool(double)>& feasible, double lo, double hi,
                               double tol = 1e-12);

}  // namespace nearmark
