#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptdgnn {

// Dense row-major f64 matrix. Row vectors are 1 x c matrices.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  Matrix(int r, int c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != static_cast<std::size_t>(r) * c)
      throw std::invalid_argument("Matrix: value count does not match shape");
  }

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

inline std::string shape_str(const Matrix& m) {
  return "(" + std::to_string(m.rows) + "x" + std::to_string(m.cols) + ")";
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw std::runtime_error("matmul shape mismatch " + shape_str(a) + " * " + shape_str(b));
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
      double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

// a^T * b
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows)
    throw std::runtime_error("matmul_tn shape mismatch " + shape_str(a) + " , " + shape_str(b));
  Matrix out(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const double* arow = &a.data[static_cast<std::size_t>(k) * a.cols];
    const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
    for (int i = 0; i < a.cols; ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

// a * b^T
inline Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols)
    throw std::runtime_error("matmul_nt shape mismatch " + shape_str(a) + " , " + shape_str(b));
  Matrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = &b.data[static_cast<std::size_t>(j) * b.cols];
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
      out.at(i, j) = s;
    }
  }
  return out;
}

// Fixed sparse matrix in CSR form; entries are constants, never differentiated.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // size rows + 1
  std::vector<int> col_idx;
  std::vector<double> vals;

  static SparseMatrix identity(int n) {
    SparseMatrix s;
    s.rows = s.cols = n;
    s.row_ptr.resize(n + 1);
    s.col_idx.resize(n);
    s.vals.assign(n, 1.0);
    for (int i = 0; i <= n; ++i) s.row_ptr[i] = i;
    for (int i = 0; i < n; ++i) s.col_idx[i] = i;
    return s;
  }
};

inline Matrix spmm(const SparseMatrix& s, const Matrix& h) {
  if (s.cols != h.rows)
    throw std::runtime_error("spmm shape mismatch: sparse cols " + std::to_string(s.cols) +
                             " vs dense rows " + std::to_string(h.rows));
  Matrix out(s.rows, h.cols);
  for (int i = 0; i < s.rows; ++i) {
    double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
    for (int p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
      const double w = s.vals[p];
      const double* hrow = &h.data[static_cast<std::size_t>(s.col_idx[p]) * h.cols];
      for (int j = 0; j < h.cols; ++j) orow[j] += w * hrow[j];
    }
  }
  return out;
}

// s^T * g, accumulated into out (out must be s.cols x g.cols)
inline void spmm_transpose_add(const SparseMatrix& s, const Matrix& g, Matrix& out) {
  if (out.rows != s.cols || out.cols != g.cols || g.rows != s.rows)
    throw std::runtime_error("spmm_transpose_add shape mismatch");
  for (int i = 0; i < s.rows; ++i) {
    const double* grow = &g.data[static_cast<std::size_t>(i) * g.cols];
    for (int p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
      const double w = s.vals[p];
      double* orow = &out.data[static_cast<std::size_t>(s.col_idx[p]) * out.cols];
      for (int j = 0; j < g.cols; ++j) orow[j] += w * grow[j];
    }
  }
}

}  // namespace ptdgnn
