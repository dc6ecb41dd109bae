#ifndef SELFGEN_NEURAL_PARAM_STORE_H_
#define SELFGEN_NEURAL_PARAM_STORE_H_

#include <cstddef>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "selfgen/neural/rng.h"
#include "selfgen/neural/tensor.h"

namespace selfgen {

enum class ParamRole { kWeight, kBias };

struct Parameter {
  std::string name;
  ParamRole role = ParamRole::kWeight;
  Tensor value;
  Tensor grad;  // same shape as value
};

// Named parameters in insertion order. References returned by Add/Get stay
// valid for the lifetime of the store.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore& other);
  ParamStore& operator=(const ParamStore& other);
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  Parameter& Add(std::string name, std::vector<std::size_t> shape,
                 ParamRole role = ParamRole::kWeight);
  Parameter& Get(std::string_view name);
  const Parameter& Get(std::string_view name) const;
  bool Has(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  Parameter& at(std::size_t i) { return params_[i]; }
  const Parameter& at(std::size_t i) const { return params_[i]; }
  std::size_t NumScalars() const;

  void ZeroGrads();
  // Weights uniform on [-scale, scale]; biases zero.
  void InitUniform(RngStream& rng, double scale);
  double GradNorm() const;
  // Rescales all gradients when their global L2 norm exceeds max_norm.
  void ClipGradNorm(double max_norm);

  // True when names, shapes and every value bit agree.
  bool BitIdentical(const ParamStore& other) const;

 private:
  std::deque<Parameter> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// p <- p - lr * (g + weight_decay * p). Gradients are left untouched.
void SgdStep(ParamStore& params, double lr, double weight_decay);

}  // namespace selfgen

#endif  // SELFGEN_NEURAL_PARAM_STORE_H_
