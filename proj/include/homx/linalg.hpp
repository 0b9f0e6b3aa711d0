#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "homx/matrix.hpp"

namespace homx {

/******** Row reduction ********/

struct Rref {
  Mat r;
  std::vector<int> pivots;  // pivot column of each nonzero row, strictly increasing
  int rank = 0;
};

// Gauss-Jordan with first-nonzero pivot choice; fully deterministic.
inline Rref rref(const Mat& m) {
  Rref out{m, {}, 0};
  Mat& r = out.r;
  int lead = 0;
  for (int col = 0; col < r.cols() && lead < r.rows(); ++col) {
    int piv = -1;
    for (int i = lead; i < r.rows(); ++i)
      if (r.at(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != lead)
      for (int j = 0; j < r.cols(); ++j) std::swap(r.at(piv, j), r.at(lead, j));
    uint32_t inv = m.field().inv(r.at(lead, col));
    for (int j = 0; j < r.cols(); ++j) r.at(lead, j) = m.field().mul(r.at(lead, j), inv);
    for (int i = 0; i < r.rows(); ++i) {
      if (i == lead) continue;
      uint32_t c = r.at(i, col);
      if (!c) continue;
      for (int j = 0; j < r.cols(); ++j)
        r.at(i, j) = m.field().sub(r.at(i, j), m.field().mul(c, r.at(lead, j)));
    }
    out.pivots.push_back(col);
    ++lead;
  }
  out.rank = static_cast<int>(out.pivots.size());
  return out;
}

inline int rank(const Mat& m) { return rref(m).rank; }

/******** Canonical subspace bases ********/
// A subspace of F^n is always represented as a matrix whose rows are the rref
// basis: equal subspaces produce literally equal matrices.

inline Mat canonical_rows(const Mat& rows) {
  Rref r = rref(rows);
  return r.r.block(0, 0, r.rank, rows.cols());
}

// Basis of { x : m x = 0 } as canonical rows (each row one kernel vector).
inline Mat kernel_basis(const Mat& m) {
  Rref r = rref(m);
  std::vector<int> free_cols;
  {
    size_t pi = 0;
    for (int c = 0; c < m.cols(); ++c) {
      if (pi < r.pivots.size() && r.pivots[pi] == c)
        ++pi;
      else
        free_cols.push_back(c);
    }
  }
  Mat basis(m.field(), static_cast<int>(free_cols.size()), m.cols());
  for (size_t fi = 0; fi < free_cols.size(); ++fi) {
    int fc = free_cols[fi];
    basis.at(static_cast<int>(fi), fc) = 1;
    for (int i = 0; i < r.rank; ++i)
      basis.at(static_cast<int>(fi), r.pivots[i]) = m.field().neg(r.r.at(i, fc));
  }
  return canonical_rows(basis);
}

// Basis of the column space of m, as canonical rows (vectors in F^{m.rows}).
inline Mat image_basis(const Mat& m) { return canonical_rows(m.transpose()); }

inline Mat subspace_sum(const std::vector<Mat>& bases) {
  if (bases.empty()) throw ShapeError("subspace_sum of nothing");
  Mat acc = bases[0];
  for (size_t i = 1; i < bases.size(); ++i) acc = Mat::vstack(acc, bases[i]);
  return canonical_rows(acc);
}

inline bool subspace_contains(const Mat& space_rows, const Mat& vectors_rows) {
  if (vectors_rows.rows() == 0) return true;
  Mat stacked = Mat::vstack(space_rows, vectors_rows);
  return rank(stacked) == rank(space_rows);
}

inline bool subspace_equal(const Mat& a_rows, const Mat& b_rows) {
  return canonical_rows(a_rows) == canonical_rows(b_rows);
}

// Rows spanning (row space of a) ∩ (row space of b): x = u a = v b, found from
// the kernel of [a^T | -b^T] acting on (u, v) stacked coefficients... solved on
// the transpose side: kernel of hstack gives coefficient pairs.
inline Mat subspace_intersection(const Mat& a_rows, const Mat& b_rows) {
  if (a_rows.cols() != b_rows.cols()) throw ShapeError("intersection in different ambient spaces");
  Mat coeff = Mat::hstack(a_rows.transpose(), -b_rows.transpose());
  Mat ker = kernel_basis(coeff);  // rows (u | v)
  Mat result(a_rows.field(), ker.rows(), a_rows.cols());
  for (int i = 0; i < ker.rows(); ++i) {
    Mat u = ker.block(i, 0, 1, a_rows.rows());
    Mat x = u * a_rows;
    for (int j = 0; j < a_rows.cols(); ++j) result.at(i, j) = x.at(0, j);
  }
  return canonical_rows(result);
}

/******** Linear solve ********/

struct Solution {
  Mat particular;  // a.cols x b.cols, free variables set to 0
  Mat nullspace;   // canonical rows, basis of ker(a)
};

// Solve a x = b columnwise (b may have several columns). The particular
// solution is the canonical one: zero in every free-variable position.
inline std::optional<Solution> solve(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw ShapeError("solve: lhs/rhs row mismatch");
  Rref ab = rref(Mat::hstack(a, b));
  // Inconsistent iff some pivot falls in the b-columns.
  for (int p : ab.pivots)
    if (p >= a.cols()) return std::nullopt;
  Mat particular(a.field(), a.cols(), b.cols());
  for (int i = 0; i < ab.rank; ++i)
    for (int j = 0; j < b.cols(); ++j)
      particular.at(ab.pivots[i], j) = ab.r.at(i, a.cols() + j);
  return Solution{particular, kernel_basis(a)};
}

inline bool is_invertible(const Mat& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

inline Mat inverse(const Mat& m) {
  if (m.rows() != m.cols()) throw ShapeError("inverse of non-square matrix");
  auto s = solve(m, Mat::identity(m.field(), m.rows()));
  if (!s || s->nullspace.rows() != 0) throw ValueError("matrix is singular");
  return s->particular;
}

/******** Systems over unknown matrix blocks ********/
// Most operations reduce to "find matrices X_1..X_k with sum_i L X_b R = RHS
// for a list of such equations". Unknown blocks are vectorized row-major and
// concatenated in creation order, so solutions are canonical and reproducible.

class MatSystem {
 public:
  explicit MatSystem(Field f) : f_(f) {}

  int add_unknown(int rows, int cols) {
    blocks_.push_back({rows, cols, total_});
    total_ += rows * cols;
    return static_cast<int>(blocks_.size()) - 1;
  }

  struct Term {
    int block;
    Mat left;   // shape: eq_rows x block_rows
    Mat right;  // shape: block_cols x eq_cols
  };

  // Adds eq_rows*eq_cols scalar equations: sum_t left_t X_{b_t} right_t = rhs.
  void add_equation(const std::vector<Term>& terms, const Mat& rhs) {
    for (const auto& t : terms) {
      const Block& b = blocks_.at(static_cast<size_t>(t.block));
      if (t.left.cols() != b.rows || t.right.rows() != b.cols)
        throw ShapeError("system term shape disagrees with unknown block");
      if (t.left.rows() != rhs.rows() || t.right.cols() != rhs.cols())
        throw ShapeError("system term shape disagrees with rhs");
    }
    for (int i = 0; i < rhs.rows(); ++i)
      for (int j = 0; j < rhs.cols(); ++j) {
        std::vector<uint32_t> row(static_cast<size_t>(total_), 0);
        for (const auto& t : terms) {
          const Block& b = blocks_[static_cast<size_t>(t.block)];
          // coefficient of X[k][l] in (L X R)[i][j] is L[i][k] * R[l][j]
          for (int k = 0; k < b.rows; ++k) {
            uint32_t lv = t.left.at(i, k);
            if (!lv) continue;
            for (int l = 0; l < b.cols; ++l) {
              uint32_t c = f_.mul(lv, t.right.at(l, j));
              size_t idx = static_cast<size_t>(b.offset + k * b.cols + l);
              row[idx] = f_.add(row[idx], c);
            }
          }
        }
        rows_.push_back(std::move(row));
        rhs_.push_back(rhs.at(i, j));
      }
  }

  // Canonical particular solution (free vars zero), or nullopt if infeasible.
  std::optional<std::vector<Mat>> solve_canonical() const {
    Mat a = assemble();
    Mat b(f_, a.rows(), 1);
    for (size_t i = 0; i < rhs_.size(); ++i) b.at(static_cast<int>(i), 0) = rhs_[i];
    auto s = homx::solve(a, b);
    if (!s) return std::nullopt;
    return unpack(s->particular.transpose());  // 1 x total row
  }

  // Canonical basis of the homogeneous solution space, each element unpacked
  // into its blocks.
  std::vector<std::vector<Mat>> kernel() const {
    Mat k = kernel_basis(assemble());
    std::vector<std::vector<Mat>> out;
    out.reserve(static_cast<size_t>(k.rows()));
    for (int i = 0; i < k.rows(); ++i) out.push_back(unpack(k.row(i)));
    return out;
  }

  int unknown_count() const { return total_; }

 private:
  struct Block {
    int rows, cols, offset;
  };

  Mat assemble() const {
    // Rows are sized to the unknowns existing when their equation was added;
    // unknowns created later have zero coefficient there.
    Mat a(f_, static_cast<int>(rows_.size()), total_);
    for (size_t i = 0; i < rows_.size(); ++i) {
      int known = static_cast<int>(rows_[i].size());
      for (int j = 0; j < known; ++j) a.at(static_cast<int>(i), j) = rows_[i][static_cast<size_t>(j)];
    }
    return a;
  }

  std::vector<Mat> unpack(const Mat& flat_row) const {
    std::vector<Mat> out;
    out.reserve(blocks_.size());
    for (const Block& b : blocks_) {
      Mat m(f_, b.rows, b.cols);
      for (int k = 0; k < b.rows; ++k)
        for (int l = 0; l < b.cols; ++l) m.at(k, l) = flat_row.at(0, b.offset + k * b.cols + l);
      out.push_back(std::move(m));
    }
    return out;
  }

  Field f_;
  std::vector<Block> blocks_;
  int total_ = 0;
  std::vector<std::vector<uint32_t>> rows_;
  std::vector<uint32_t> rhs_;
};

}  // namespace homx
