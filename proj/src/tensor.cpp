#include "mcdtsf/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace mcdtsf {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dims differ");
  Tensor c(a.rows, b.cols);
  const int n = a.rows, k = a.cols, m = b.cols;
  for (int i = 0; i < n; ++i) {
    double* ci = c.data.data() + static_cast<size_t>(i) * m;
    const double* ai = a.data.data() + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b.data.data() + static_cast<size_t>(p) * m;
      for (int j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: inner dims differ");
  Tensor c(a.rows, b.rows);
  const int n = a.rows, k = a.cols, m = b.rows;
  for (int i = 0; i < n; ++i) {
    const double* ai = a.data.data() + static_cast<size_t>(i) * k;
    double* ci = c.data.data() + static_cast<size_t>(i) * m;
    for (int j = 0; j < m; ++j) {
      const double* bj = b.data.data() + static_cast<size_t>(j) * k;
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
      ci[j] = acc;
    }
  }
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: inner dims differ");
  Tensor c(a.cols, b.cols);
  const int n = a.cols, k = a.rows, m = b.cols;
  for (int p = 0; p < k; ++p) {
    const double* ap = a.data.data() + static_cast<size_t>(p) * n;
    const double* bp = b.data.data() + static_cast<size_t>(p) * m;
    for (int i = 0; i < n; ++i) {
      const double av = ap[i];
      double* ci = c.data.data() + static_cast<size_t>(i) * m;
      for (int j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  Tensor t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

void add_inplace(Tensor& dst, const Tensor& src) {
  if (!dst.same_shape(src)) throw std::invalid_argument("add_inplace: shape mismatch");
  for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

void axpy_inplace(Tensor& dst, double alpha, const Tensor& src) {
  if (!dst.same_shape(src)) throw std::invalid_argument("axpy_inplace: shape mismatch");
  for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += alpha * src.data[i];
}

bool all_finite(const Tensor& t) {
  for (double v : t.data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace mcdtsf
