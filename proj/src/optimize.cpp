#include "nearmark/optimize.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace nearmark {

namespace {

struct Context {
  const Objective* f;
  int evaluations = 0;
  int budget = 0;
  std::vector<double> best_x;
  double best = std::numeric_limits<double>::infinity();
};

double trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<Context*>(params);
  std::span<const double> x(v->data, v->size);
  double value = (*ctx->f)(x);
  ++ctx->evaluations;
  if (!std::isfinite(value)) value = 1e300;
  if (value < ctx->best) {
    ctx->best = value;
    ctx->best_x.assign(x.begin(), x.end());
  }
  return value;
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, double initial_step, int max_evaluations,
                           double tol) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;

  Context ctx{&f, 0, max_evaluations, x0, std::numeric_limits<double>::infinity()};
  const std::size_t n = x0.size();
  if (n == 0) {
    MinimizeResult r;
    r.value = f(std::span<const double>());
    r.evaluations = 1;
    return r;
  }
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(step.get(), i, initial_step);
  }
  gsl_multimin_function fn{&trampoline, n, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> minimizer(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(minimizer.get(), &fn, x.get(), step.get());
  while (ctx.evaluations < ctx.budget) {
    if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(minimizer.get());
    if (gsl_multimin_test_size(size, tol) == GSL_SUCCESS) break;
  }
  return {ctx.best_x, ctx.best, ctx.evaluations};
}

double bisect_largest_feasible(const std::function<bool(double)>& feasible, double lo, double hi, double tol) {
  if (feasible(hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace nearmark
