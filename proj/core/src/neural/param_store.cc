#include "selfgen/neural/param_store.h"

#include <cmath>
#include <cstring>

#include "selfgen/errors.h"

namespace selfgen {

ParamStore::ParamStore(const ParamStore& other)
    : params_(other.params_), index_(other.index_) {}

ParamStore& ParamStore::operator=(const ParamStore& other) {
  params_ = other.params_;
  index_ = other.index_;
  return *this;
}

Parameter& ParamStore::Add(std::string name, std::vector<std::size_t> shape,
                           ParamRole role) {
  if (index_.count(name)) throw Error("duplicate parameter '" + name + "'");
  index_.emplace(name, params_.size());
  Tensor value = Tensor::FromShape(shape);
  Tensor grad = Tensor::FromShape(shape);
  params_.push_back({std::move(name), role, std::move(value), std::move(grad)});
  return params_.back();
}

Parameter& ParamStore::Get(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("no parameter '" + std::string(name) + "'");
  return params_[it->second];
}

const Parameter& ParamStore::Get(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("no parameter '" + std::string(name) + "'");
  return params_[it->second];
}

bool ParamStore::Has(std::string_view name) const { return index_.count(name) > 0; }

std::size_t ParamStore::NumScalars() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += p.value.size();
  return n;
}

void ParamStore::ZeroGrads() {
  for (Parameter& p : params_) p.grad.Fill(0.0);
}

void ParamStore::InitUniform(RngStream& rng, double scale) {
  for (Parameter& p : params_) {
    if (p.role == ParamRole::kBias) {
      p.value.Fill(0.0);
      continue;
    }
    for (double& v : p.value.values()) v = rng.Uniform(-scale, scale);
  }
}

double ParamStore::GradNorm() const {
  double s = 0.0;
  for (const Parameter& p : params_) {
    for (double g : p.grad.values()) s += g * g;
  }
  return std::sqrt(s);
}

void ParamStore::ClipGradNorm(double max_norm) {
  const double norm = GradNorm();
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for (Parameter& p : params_) {
    for (double& g : p.grad.values()) g *= scale;
  }
}

bool ParamStore::BitIdentical(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Parameter& a = params_[i];
    const Parameter& b = other.params_[i];
    if (a.name != b.name || a.value.shape() != b.value.shape()) return false;
    if (std::memcmp(a.value.storage().data(), b.value.storage().data(),
                    a.value.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

void SgdStep(ParamStore& params, double lr, double weight_decay) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.at(i);
    auto v = p.value.values();
    auto g = p.grad.values();
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] -= lr * (g[k] + weight_decay * v[k]);
    }
  }
}

}  // namespace selfgen
