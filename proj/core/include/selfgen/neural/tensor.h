#ifndef SELFGEN_NEURAL_TENSOR_H_
#define SELFGEN_NEURAL_TENSOR_H_

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace selfgen {

// Dense row-major float64 array of rank 1 or 2.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::size_t n, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Tensor FromVector(std::vector<double> values);
  static Tensor FromShape(const std::vector<std::size_t>& shape);

  int rank() const { return rank_; }
  std::vector<std::size_t> shape() const;
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const { return dims_[0]; }
  std::size_t cols() const { return rank_ == 2 ? dims_[1] : 1; }
  bool SameShape(const Tensor& other) const {
    return rank_ == other.rank_ && dims_ == other.dims_;
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * dims_[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * dims_[1] + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> row(std::size_t r) {
    return std::span<double>(data_).subspan(r * cols(), cols());
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols(), cols());
  }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void Fill(double v);
  // Throws NumericalError naming `what` when any entry is NaN or infinite.
  void CheckFinite(std::string_view what) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  int rank_ = 1;
  std::array<std::size_t, 2> dims_{0, 1};
  std::vector<double> data_;
};

std::string ShapeString(const std::vector<std::size_t>& shape);

}  // namespace selfgen

#endif  // SELFGEN_NEURAL_TENSOR_H_
