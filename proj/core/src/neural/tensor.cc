#include "selfgen/neural/tensor.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfgen/errors.h"

namespace selfgen {

Tensor::Tensor(std::size_t n, double fill) : rank_(1), dims_{n, 1}, data_(n, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rank_(2), dims_{rows, cols}, data_(rows * cols, fill) {}

Tensor Tensor::FromVector(std::vector<double> values) {
  Tensor t;
  t.rank_ = 1;
  t.dims_ = {values.size(), 1};
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::FromShape(const std::vector<std::size_t>& shape) {
  if (shape.size() == 1) return Tensor(shape[0]);
  if (shape.size() == 2) return Tensor(shape[0], shape[1]);
  throw DimensionError("tensors must have rank 1 or 2, got " + ShapeString(shape));
}

std::vector<std::size_t> Tensor::shape() const {
  if (rank_ == 1) return {dims_[0]};
  return {dims_[0], dims_[1]};
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::CheckFinite(std::string_view what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite value in " + std::string(what));
    }
  }
}

std::string ShapeString(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace selfgen
