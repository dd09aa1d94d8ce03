#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace mcdtsf {

// Dense row-major matrix of doubles. Vectors are 1 x n or n x 1 tensors.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  static Tensor row(std::span<const double> v) {
    Tensor t(1, static_cast<int>(v.size()));
    std::copy(v.begin(), v.end(), t.data.begin());
    return t;
  }
  static Tensor column(std::span<const double> v) {
    Tensor t(static_cast<int>(v.size()), 1);
    std::copy(v.begin(), v.end(), t.data.begin());
    return t;
  }

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<size_t>(r) * cols + c];
  }

  size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// c = a @ b
Tensor matmul(const Tensor& a, const Tensor& b);
// c = a @ b^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
// c = a^T @ b
Tensor matmul_tn(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

void add_inplace(Tensor& dst, const Tensor& src);
void axpy_inplace(Tensor& dst, double alpha, const Tensor& src);
bool all_finite(const Tensor& t);

}  // namespace mcdtsf
