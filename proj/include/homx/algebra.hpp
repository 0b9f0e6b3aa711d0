#pragma once

#include <memory>
#include <string>
#include <vector>

#include "homx/linalg.hpp"

namespace homx {

// Finite-dimensional F_p-algebra given by structure constants, together with
// certified structure data: a basis of the Jacobson radical and a complete
// set of primitive orthogonal idempotents. The constructor *verifies* the
// certificates instead of trusting them:
//   - associativity and two-sided unit law on all basis triples,
//   - radical rows span a nilpotent two-sided ideal,
//   - idempotents are orthogonal, sum to 1, and each e has
//     dim(eAe) - dim(eJe) = 1 (split basic),
//   - dim A - dim J equals the number of idempotents, which pins A/J = F^r
//     and hence J = rad A.
class Algebra {
 public:
  static std::shared_ptr<const Algebra> create(
      Field f, int dim, const std::vector<std::vector<std::vector<long long>>>& mult,
      const std::vector<long long>& unit, const std::vector<std::vector<long long>>& radical,
      const std::vector<std::vector<long long>>& idempotents,
      std::vector<std::string> basis_names = {}) {
    auto a = std::shared_ptr<Algebra>(new Algebra());
    a->f_ = f;
    a->dim_ = dim;
    if (dim < 1) throw ValueError("algebra dimension must be positive");
    if (static_cast<int>(mult.size()) != dim) throw ValueError("mult tensor has wrong size");
    a->left_.assign(static_cast<size_t>(dim), Mat(f, dim, dim));
    a->right_.assign(static_cast<size_t>(dim), Mat(f, dim, dim));
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(mult[i].size()) != dim) throw ValueError("mult tensor has wrong size");
      for (int j = 0; j < dim; ++j) {
        if (static_cast<int>(mult[i][j].size()) != dim)
          throw ValueError("mult tensor has wrong size");
        for (int k = 0; k < dim; ++k) {
          uint32_t c = f.reduce(mult[i][j][k]);
          a->left_[static_cast<size_t>(i)].at(k, j) = c;   // (b_i b_j)_k
          a->right_[static_cast<size_t>(j)].at(k, i) = c;  // same number, filed by j
        }
      }
    }
    a->unit_ = column(f, dim, unit, "unit");
    a->radical_ = Mat(f, 0, dim);
    for (const auto& r : radical)
      a->radical_ = Mat::vstack(a->radical_, column(f, dim, r, "radical element").transpose());
    a->radical_ = canonical_rows(a->radical_);
    for (const auto& e : idempotents)
      a->idempotents_.push_back(column(f, dim, e, "idempotent"));
    if (basis_names.empty())
      for (int i = 0; i < dim; ++i) basis_names.push_back("b" + std::to_string(i));
    if (static_cast<int>(basis_names.size()) != dim)
      throw ValueError("basis_names has wrong length");
    a->names_ = std::move(basis_names);
    a->validate();
    return a;
  }

  Field field() const { return f_; }
  int dim() const { return dim_; }
  const Mat& unit() const { return unit_; }
  const Mat& radical_rows() const { return radical_; }
  const std::vector<Mat>& idempotents() const { return idempotents_; }
  const std::vector<std::string>& basis_names() const { return names_; }

  // b_i * b_j as a coordinate column.
  Mat basis_product(int i, int j) const { return left_[static_cast<size_t>(i)].col(j); }
  // u * v for coordinate columns.
  Mat mul(const Mat& u, const Mat& v) const { return left_mult_matrix(u) * v; }
  // Matrix of w -> u * w.
  Mat left_mult_matrix(const Mat& u) const {
    Mat m(f_, dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      if (u.at(i, 0)) m = m + left_[static_cast<size_t>(i)].scaled(u.at(i, 0));
    return m;
  }
  // Matrix of w -> w * u.
  Mat right_mult_matrix(const Mat& u) const {
    Mat m(f_, dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      if (u.at(i, 0)) m = m + right_[static_cast<size_t>(i)].scaled(u.at(i, 0));
    return m;
  }

  // Structure constants c[i][j][k], i.e. coordinate k of b_i*b_j.
  uint32_t structure_constant(int i, int j, int k) const {
    return left_[static_cast<size_t>(i)].at(k, j);
  }

  // Same data with reversed multiplication. Radical and idempotents carry over.
  std::shared_ptr<const Algebra> opposite() const {
    std::vector<std::vector<std::vector<long long>>> mult(
        static_cast<size_t>(dim_),
        std::vector<std::vector<long long>>(static_cast<size_t>(dim_),
                                            std::vector<long long>(static_cast<size_t>(dim_))));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) mult[i][j][k] = structure_constant(j, i, k);
    std::vector<long long> unit(static_cast<size_t>(dim_));
    for (int i = 0; i < dim_; ++i) unit[i] = unit_.at(i, 0);
    std::vector<std::vector<long long>> rad, idem;
    for (int i = 0; i < radical_.rows(); ++i) {
      std::vector<long long> row(static_cast<size_t>(dim_));
      for (int j = 0; j < dim_; ++j) row[j] = radical_.at(i, j);
      rad.push_back(std::move(row));
    }
    for (const Mat& e : idempotents_) {
      std::vector<long long> v(static_cast<size_t>(dim_));
      for (int i = 0; i < dim_; ++i) v[i] = e.at(i, 0);
      idem.push_back(std::move(v));
    }
    return create(f_, dim_, mult, unit, rad, idem, names_);
  }

  bool operator==(const Algebra& o) const {
    if (f_ != o.f_ || dim_ != o.dim_ || unit_ != o.unit_ || radical_ != o.radical_) return false;
    if (idempotents_ != o.idempotents_) return false;
    for (int i = 0; i < dim_; ++i)
      if (left_[static_cast<size_t>(i)] != o.left_[static_cast<size_t>(i)]) return false;
    return true;
  }
  bool operator!=(const Algebra& o) const { return !(*this == o); }

 private:
  Algebra() = default;

  static Mat column(Field f, int dim, const std::vector<long long>& v, const char* what) {
    if (static_cast<int>(v.size()) != dim)
      throw ValueError(std::string(what) + " has wrong length");
    Mat m(f, dim, 1);
    for (int i = 0; i < dim; ++i) m.at(i, 0) = f.reduce(v[i]);
    return m;
  }

  Mat basis_vec(int i) const {
    Mat e(f_, dim_, 1);
    e.at(i, 0) = 1;
    return e;
  }

  // Span of all products u*v, u from rows_a, v from rows_b (as row bases).
  Mat product_span(const Mat& rows_a, const Mat& rows_b) const {
    Mat acc(f_, 0, dim_);
    for (int i = 0; i < rows_a.rows(); ++i)
      for (int j = 0; j < rows_b.rows(); ++j)
        acc = Mat::vstack(acc, mul(rows_a.row(i).transpose(), rows_b.row(j).transpose()).transpose());
    return canonical_rows(acc);
  }

  void validate() const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          if (mul(basis_product(i, j), basis_vec(k)) != mul(basis_vec(i), basis_product(j, k)))
            throw ValueError("mult tensor not associative at basis triple (" + names_[i] + "," +
                             names_[j] + "," + names_[k] + ")");
    for (int i = 0; i < dim_; ++i) {
      if (mul(unit_, basis_vec(i)) != basis_vec(i) || mul(basis_vec(i), unit_) != basis_vec(i))
        throw ValueError("unit vector is not a two-sided unit");
    }

    // Radical certificate: two-sided ideal, nilpotent.
    Mat full = Mat::identity(f_, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int r = 0; r < radical_.rows(); ++r) {
        Mat rv = radical_.row(r).transpose();
        if (!subspace_contains(radical_, mul(basis_vec(i), rv).transpose()))
          throw ValueError("radical rows are not a left ideal");
        if (!subspace_contains(radical_, mul(rv, basis_vec(i)).transpose()))
          throw ValueError("radical rows are not a right ideal");
      }
    }
    Mat power = radical_;
    for (int k = 0; k < dim_ && power.rows() > 0; ++k) power = product_span(power, radical_);
    if (power.rows() > 0) throw ValueError("radical rows do not span a nilpotent ideal");

    // Idempotent certificate.
    if (idempotents_.empty()) throw ValueError("need at least one idempotent");
    Mat sum(f_, dim_, 1);
    for (size_t i = 0; i < idempotents_.size(); ++i) {
      const Mat& e = idempotents_[i];
      if (mul(e, e) != e) throw ValueError("idempotent " + std::to_string(i) + " fails e*e=e");
      for (size_t j = 0; j < idempotents_.size(); ++j) {
        if (i == j) continue;
        if (!mul(e, idempotents_[j]).is_zero())
          throw ValueError("idempotents " + std::to_string(i) + "," + std::to_string(j) +
                           " not orthogonal");
      }
      sum = sum + e;
    }
    if (sum != unit_) throw ValueError("idempotents do not sum to the unit");

    // Split-basic primitivity: dim eAe - dim eJe = 1 for every e, and the
    // Peirce count dim A - dim J = #idempotents (forces A/J = F^r).
    for (size_t i = 0; i < idempotents_.size(); ++i) {
      const Mat& e = idempotents_[i];
      Mat eae(f_, 0, dim_);
      for (int b = 0; b < dim_; ++b)
        eae = Mat::vstack(eae, mul(mul(e, basis_vec(b)), e).transpose());
      Mat eje(f_, 0, dim_);
      for (int r = 0; r < radical_.rows(); ++r)
        eje = Mat::vstack(eje, mul(mul(e, radical_.row(r).transpose()), e).transpose());
      if (rank(eae) - rank(eje) != 1)
        throw ValueError("idempotent " + std::to_string(i) +
                         " is not primitive split (dim eAe - dim eJe != 1)");
    }
    if (dim_ - radical_.rows() != static_cast<int>(idempotents_.size()))
      throw ValueError("dim A - dim J must equal the number of idempotents");
    (void)full;
  }

  Field f_;
  int dim_ = 0;
  std::vector<Mat> left_, right_;
  Mat unit_;
  Mat radical_;
  std::vector<Mat> idempotents_;
  std::vector<std::string> names_;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

inline bool same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
  return a == b || (a && b && *a == *b);
}

}  // namespace homx
