#include "selfgen/neural/grad_check.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "selfgen/errors.h"
#include "selfgen/neural/rng.h"

namespace selfgen {
namespace {

double Evaluate(const LossBuilder& loss) {
  Graph g;
  const double v = g.scalar(loss(g));
  if (!std::isfinite(v)) throw NumericalError("grad check: non-finite loss");
  return v;
}

}  // namespace

GradCheckResult GradCheck(const LossBuilder& loss, ParamStore& params,
                          const GradCheckOptions& options) {
  params.ZeroGrads();
  {
    Graph g;
    Var l = loss(g);
    g.Backward(l);
  }
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t k = 0; k < params.at(p).value.size(); ++k) coords.emplace_back(p, k);
  }
  if (coords.size() > options.max_coordinates) {
    RngStream rng(options.seed);
    for (std::size_t i = 0; i < options.max_coordinates; ++i) {
      std::swap(coords[i], coords[i + rng.Below(coords.size() - i)]);
    }
    coords.resize(options.max_coordinates);
  }

  GradCheckResult result;
  for (auto [p, k] : coords) {
    Parameter& param = params.at(p);
    const double analytic = param.grad[k];
    if (!std::isfinite(analytic)) throw NumericalError("grad check: non-finite gradient");
    const double saved = param.value[k];
    param.value[k] = saved + options.eps;
    const double up = Evaluate(loss);
    param.value[k] = saved - options.eps;
    const double down = Evaluate(loss);
    param.value[k] = saved;
    const double numeric = (up - down) / (2.0 * options.eps);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), options.floor});
    const double rel = std::abs(analytic - numeric) / denom;
    if (rel > result.max_relative_error || result.coordinates == 0) {
      result.max_relative_error = rel;
      result.worst_parameter = param.name + "[" + std::to_string(k) + "]";
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
    ++result.coordinates;
  }
  params.ZeroGrads();
  return result;
}

}  // namespace selfgen
