#pragma once

// Dense row-major matrix container used throughout: one row per coordinate,
// one column per feature/channel. Real (double) and complex (complex<double>)
// instantiations only. Matrix products are delegated to Eigen; everything
// else is explicit loops so the arithmetic order is fixed and reproducible.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace iinr {

using cdouble = std::complex<double>;
using index_t = std::int64_t;

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class T>
struct Tensor2 {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<T> data;

  Tensor2() = default;
  Tensor2(index_t r, index_t c, T fill = T{}) : rows(r), cols(c) {
    if (r < 0 || c < 0) throw ShapeError("Tensor2: negative dimension");
    data.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill);
  }

  index_t size() const { return rows * cols; }
  bool empty() const { return data.empty(); }

  T& operator()(index_t r, index_t c) { return data[static_cast<std::size_t>(r * cols + c)]; }
  const T& operator()(index_t r, index_t c) const {
    return data[static_cast<std::size_t>(r * cols + c)];
  }

  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

using Mat = Tensor2<double>;
using CMat = Tensor2<cdouble>;

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError("shape mismatch: " + what);
}

template <class T>
using EigenRowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
Eigen::Map<const EigenRowMajor<T>> emap(const Tensor2<T>& t) {
  return {t.data.data(), t.rows, t.cols};
}

template <class T>
Eigen::Map<EigenRowMajor<T>> emap(Tensor2<T>& t) {
  return {t.data.data(), t.rows, t.cols};
}

// out = a * b
template <class T>
Tensor2<T> matmul(const Tensor2<T>& a, const Tensor2<T>& b) {
  require_shape(a.cols == b.rows, "matmul inner dims");
  Tensor2<T> out(a.rows, b.cols);
  emap(out).noalias() = emap(a) * emap(b);
  return out;
}

// out = a^H * b  (plain transpose for real scalars)
template <class T>
Tensor2<T> matmul_adjoint_a(const Tensor2<T>& a, const Tensor2<T>& b) {
  require_shape(a.rows == b.rows, "matmul_adjoint_a row count");
  Tensor2<T> out(a.cols, b.cols);
  emap(out).noalias() = emap(a).adjoint() * emap(b);
  return out;
}

// out = a * b^H
template <class T>
Tensor2<T> matmul_adjoint_b(const Tensor2<T>& a, const Tensor2<T>& b) {
  require_shape(a.cols == b.cols, "matmul_adjoint_b col count");
  Tensor2<T> out(a.rows, b.rows);
  emap(out).noalias() = emap(a) * emap(b).adjoint();
  return out;
}

template <class T>
Tensor2<T> hadamard(const Tensor2<T>& a, const Tensor2<T>& b) {
  require_shape(a.same_shape(b), "hadamard");
  Tensor2<T> out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

template <class T>
void add_inplace(Tensor2<T>& a, const Tensor2<T>& b) {
  require_shape(a.same_shape(b), "add_inplace");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

template <class T>
Tensor2<T> scaled(const Tensor2<T>& a, T s) {
  Tensor2<T> out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * s;
  return out;
}

template <class T>
std::vector<T> col_sum(const Tensor2<T>& a) {
  std::vector<T> s(static_cast<std::size_t>(a.cols), T{});
  for (index_t r = 0; r < a.rows; ++r)
    for (index_t c = 0; c < a.cols; ++c) s[static_cast<std::size_t>(c)] += a(r, c);
  return s;
}

// Column-wise concatenation; all parts must share a row count.
template <class T>
Tensor2<T> hconcat(std::initializer_list<const Tensor2<T>*> parts) {
  index_t rows = -1, cols = 0;
  for (const auto* p : parts) {
    if (rows < 0) rows = p->rows;
    require_shape(p->rows == rows, "hconcat rows");
    cols += p->cols;
  }
  Tensor2<T> out(rows, cols);
  for (index_t r = 0; r < rows; ++r) {
    index_t c0 = 0;
    for (const auto* p : parts) {
      for (index_t c = 0; c < p->cols; ++c) out(r, c0 + c) = (*p)(r, c);
      c0 += p->cols;
    }
  }
  return out;
}

template <class T>
Tensor2<T> slice_cols(const Tensor2<T>& a, index_t first, index_t count) {
  require_shape(first >= 0 && first + count <= a.cols, "slice_cols range");
  Tensor2<T> out(a.rows, count);
  for (index_t r = 0; r < a.rows; ++r)
    for (index_t c = 0; c < count; ++c) out(r, c) = a(r, first + c);
  return out;
}

inline CMat promote(const Mat& a) {
  CMat out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = cdouble(a.data[i], 0.0);
  return out;
}

inline Mat real_part(const CMat& a) {
  Mat out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i].real();
  return out;
}

inline bool all_finite(const Mat& a) {
  for (double v : a.data)
    if (!std::isfinite(v)) return false;
  return true;
}

inline bool all_finite(const CMat& a) {
  for (const cdouble& v : a.data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  require_shape(a.same_shape(b), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline bool bit_equal(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (std::memcmp(&a.data[i], &b.data[i], sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace iinr
