#ifndef SELFGEN_NEURAL_GRAD_CHECK_H_
#define SELFGEN_NEURAL_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <string>

#include "selfgen/neural/graph.h"
#include "selfgen/neural/param_store.h"

namespace selfgen {

// Builds the scalar loss on a fresh graph. Must be deterministic.
using LossBuilder = std::function<Var(Graph&)>;

struct GradCheckOptions {
  double eps = 1e-4;
  // Coordinates checked; all of them when the store has no more than this.
  std::size_t max_coordinates = 400;
  std::uint64_t seed = 17;
  // Denominator floor. Central differences of an O(10) loss carry roundoff
  // near 1e-10, so relative error on smaller gradients is noise.
  double floor = 1e-6;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst_parameter;  // "name[index]" of the largest error
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares reverse-mode gradients with central differences
// (f(p+eps) - f(p-eps)) / 2eps. Relative error per coordinate is
// |g_ad - g_fd| / max(|g_ad|, |g_fd|, floor). Throws NumericalError when a
// gradient or loss value is not finite. Leaves parameters unchanged and
// gradients zeroed.
GradCheckResult GradCheck(const LossBuilder& loss, ParamStore& params,
                          const GradCheckOptions& options = {});

}  // namespace selfgen

#endif  // SELFGEN_NEURAL_GRAD_CHECK_H_
