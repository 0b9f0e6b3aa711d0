#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "homx/field.hpp"

namespace homx {

// Dense matrix over F_p, row-major. Zero-row / zero-column shapes are legal
// and show up constantly (zero modules), so nothing here assumes rows*cols>0.
class Mat {
 public:
  Mat() : f_(), rows_(0), cols_(0) {}
  Mat(Field f, int rows, int cols)
      : f_(f), rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0) {
    if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
  }
  Mat(Field f, std::initializer_list<std::initializer_list<long long>> rows) : f_(f) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    a_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw ShapeError("ragged matrix literal");
      for (long long v : r) a_.push_back(f_.reduce(v));
    }
  }

  static Mat identity(Field f, int n) {
    Mat m(f, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }
  static Mat zero(Field f, int rows, int cols) { return Mat(f, rows, cols); }

  Field field() const { return f_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  uint32_t& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  uint32_t at(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  bool is_zero() const {
    for (uint32_t v : a_)
      if (v) return false;
    return true;
  }
  bool is_identity() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (at(i, j) != (i == j ? 1u : 0u)) return false;
    return true;
  }

  bool operator==(const Mat& o) const {
    return f_ == o.f_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat operator+(const Mat& o) const {
    check_same_shape(o, "+");
    Mat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = f_.add(a_[i], o.a_[i]);
    return r;
  }
  Mat operator-(const Mat& o) const {
    check_same_shape(o, "-");
    Mat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = f_.sub(a_[i], o.a_[i]);
    return r;
  }
  Mat operator-() const {
    Mat r = *this;
    for (auto& v : r.a_) v = f_.neg(v);
    return r;
  }
  Mat scaled(uint32_t c) const {
    Mat r = *this;
    for (auto& v : r.a_) v = f_.mul(v, c);
    return r;
  }

  Mat operator*(const Mat& o) const {
    if (f_ != o.f_) throw MismatchError("matrix product over different fields");
    if (cols_ != o.rows_)
      throw ShapeError("matrix product shape mismatch: " + shape_str() + " * " + o.shape_str());
    Mat r(f_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        uint32_t v = at(i, k);
        if (!v) continue;
        for (int j = 0; j < o.cols_; ++j)
          r.at(i, j) = f_.add(r.at(i, j), f_.mul(v, o.at(k, j)));
      }
    return r;
  }

  Mat transpose() const {
    Mat r(f_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  Mat row(int i) const {
    Mat r(f_, 1, cols_);
    for (int j = 0; j < cols_; ++j) r.at(0, j) = at(i, j);
    return r;
  }
  Mat col(int j) const {
    Mat r(f_, rows_, 1);
    for (int i = 0; i < rows_; ++i) r.at(i, 0) = at(i, j);
    return r;
  }

  // Contiguous block copy, rows [r0,r0+nr), cols [c0,c0+nc).
  Mat block(int r0, int c0, int nr, int nc) const {
    Mat r(f_, nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
    return r;
  }

  static Mat hstack(const Mat& a, const Mat& b) {
    if (a.f_ != b.f_) throw MismatchError("hstack over different fields");
    if (a.rows_ != b.rows_) throw ShapeError("hstack row mismatch");
    Mat r(a.f_, a.rows_, a.cols_ + b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
      for (int j = 0; j < b.cols_; ++j) r.at(i, a.cols_ + j) = b.at(i, j);
    }
    return r;
  }
  static Mat vstack(const Mat& a, const Mat& b) {
    if (a.f_ != b.f_) throw MismatchError("vstack over different fields");
    if (a.cols_ != b.cols_) throw ShapeError("vstack col mismatch");
    Mat r(a.f_, a.rows_ + b.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) r.at(a.rows_ + i, j) = b.at(i, j);
    return r;
  }

  // Assemble from a grid of blocks; grid[i][j] has shape row_dims[i] x col_dims[j].
  static Mat from_blocks(Field f, const std::vector<int>& row_dims,
                         const std::vector<int>& col_dims,
                         const std::vector<std::vector<Mat>>& grid) {
    int total_r = 0, total_c = 0;
    for (int d : row_dims) total_r += d;
    for (int d : col_dims) total_c += d;
    Mat r(f, total_r, total_c);
    int r0 = 0;
    for (size_t i = 0; i < row_dims.size(); ++i) {
      int c0 = 0;
      for (size_t j = 0; j < col_dims.size(); ++j) {
        const Mat& b = grid[i][j];
        if (b.rows() != row_dims[i] || b.cols() != col_dims[j])
          throw ShapeError("block shape disagrees with grid dims");
        for (int bi = 0; bi < b.rows(); ++bi)
          for (int bj = 0; bj < b.cols(); ++bj) r.at(r0 + bi, c0 + bj) = b.at(bi, bj);
        c0 += col_dims[j];
      }
      r0 += row_dims[i];
    }
    return r;
  }

  // Row-major flattening as a 1 x (rows*cols) row vector; inverse below.
  Mat vec_row() const {
    Mat r(f_, 1, rows_ * cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i];
    return r;
  }
  static Mat unvec_row(const Mat& v, int rows, int cols) {
    if (v.rows() != 1 || v.cols() != rows * cols) throw ShapeError("unvec shape mismatch");
    Mat r(v.field(), rows, cols);
    for (int i = 0; i < rows * cols; ++i) r.a_[static_cast<size_t>(i)] = v.at(0, i);
    return r;
  }

  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  void check_same_shape(const Mat& o, const char* op) const {
    if (f_ != o.f_) throw MismatchError(std::string("matrix ") + op + " over different fields");
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw ShapeError(std::string("matrix ") + op + " shape mismatch: " + shape_str() +
                       " vs " + o.shape_str());
  }

  Field f_;
  int rows_, cols_;
  std::vector<uint32_t> a_;
};

}  // namespace homx
