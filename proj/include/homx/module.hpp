#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homx/algebra.hpp"

namespace homx {

/******** Modules ********/

// Finite-dimensional left module: one action matrix per algebra basis element.
// The factory verifies action(1) = id and action(b_i b_j) = action(b_i)action(b_j).
class Module {
 public:
  static Module create(AlgebraPtr alg, std::vector<Mat> action) {
    Module m;
    m.alg_ = std::move(alg);
    m.action_ = std::move(action);
    if (static_cast<int>(m.action_.size()) != m.alg_->dim())
      throw ValueError("module needs one action matrix per algebra basis element");
    m.dim_ = m.action_.empty() ? 0 : m.action_[0].rows();
    for (const Mat& a : m.action_) {
      if (a.rows() != m.dim_ || a.cols() != m.dim_) throw ValueError("ragged action matrices");
      if (a.field() != m.alg_->field()) throw MismatchError("action over wrong field");
    }
    m.validate();
    return m;
  }

  static Module zero(AlgebraPtr alg) {
    Module m;
    Field f = alg->field();
    m.action_.assign(static_cast<size_t>(alg->dim()), Mat(f, 0, 0));
    m.alg_ = std::move(alg);
    m.dim_ = 0;
    return m;
  }

  const AlgebraPtr& algebra() const { return alg_; }
  int dim() const { return dim_; }
  bool is_zero() const { return dim_ == 0; }
  Field field() const { return alg_->field(); }
  const std::vector<Mat>& action() const { return action_; }

  // Action of the algebra element with coordinate column u.
  Mat act(const Mat& u) const {
    Mat m(field(), dim_, dim_);
    for (int i = 0; i < alg_->dim(); ++i)
      if (u.at(i, 0)) m = m + action_[static_cast<size_t>(i)].scaled(u.at(i, 0));
    return m;
  }

  bool operator==(const Module& o) const {
    return same_algebra(alg_, o.alg_) && dim_ == o.dim_ && action_ == o.action_;
  }
  bool operator!=(const Module& o) const { return !(*this == o); }

 private:
  void validate() const {
    if (act(alg_->unit()) != Mat::identity(field(), dim_))
      throw ValueError("module action: unit does not act as identity");
    for (int i = 0; i < alg_->dim(); ++i)
      for (int j = 0; j < alg_->dim(); ++j)
        if (action_[static_cast<size_t>(i)] * action_[static_cast<size_t>(j)] !=
            act(alg_->basis_product(i, j)))
          throw ValueError("module action does not respect multiplication at basis pair (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");
  }

  AlgebraPtr alg_;
  int dim_ = 0;
  std::vector<Mat> action_;
};

/******** Morphisms ********/

class ModuleMorphism {
 public:
  static ModuleMorphism create(Module source, Module target, Mat mat) {
    if (!same_algebra(source.algebra(), target.algebra()))
      throw MismatchError("morphism between modules over different algebras");
    if (mat.rows() != target.dim() || mat.cols() != source.dim())
      throw ShapeError("morphism matrix must be target.dim x source.dim, got " + mat.shape_str());
    ModuleMorphism f;
    f.source_ = std::move(source);
    f.target_ = std::move(target);
    f.mat_ = std::move(mat);
    for (int i = 0; i < f.source_.algebra()->dim(); ++i)
      if (f.mat_ * f.source_.action()[static_cast<size_t>(i)] !=
          f.target_.action()[static_cast<size_t>(i)] * f.mat_)
        throw ValueError("matrix does not commute with the action of basis element " +
                         f.source_.algebra()->basis_names()[static_cast<size_t>(i)]);
    return f;
  }

  static ModuleMorphism zero(Module source, Module target) {
    Mat m(source.field(), target.dim(), source.dim());
    return create(std::move(source), std::move(target), std::move(m));
  }
  static ModuleMorphism identity(Module m) {
    Mat id = Mat::identity(m.field(), m.dim());
    Module copy = m;
    return create(std::move(copy), std::move(m), std::move(id));
  }

  const Module& source() const { return source_; }
  const Module& target() const { return target_; }
  const Mat& mat() const { return mat_; }

  bool is_zero() const { return mat_.is_zero(); }
  bool is_monic() const { return rank(mat_) == source_.dim(); }
  bool is_epic() const { return rank(mat_) == target_.dim(); }
  bool is_iso() const { return source_.dim() == target_.dim() && is_monic(); }

  // g.compose(f) = g after f.
  ModuleMorphism compose(const ModuleMorphism& f) const {
    if (f.target_ != source_) throw MismatchError("composition middle modules disagree");
    return create(f.source_, target_, mat_ * f.mat_);
  }

  ModuleMorphism operator+(const ModuleMorphism& o) const {
    if (source_ != o.source_ || target_ != o.target_)
      throw MismatchError("sum of morphisms with different endpoints");
    return create(source_, target_, mat_ + o.mat_);
  }
  ModuleMorphism operator-() const { return create(source_, target_, -mat_); }

  bool operator==(const ModuleMorphism& o) const {
    return source_ == o.source_ && target_ == o.target_ && mat_ == o.mat_;
  }

 private:
  ModuleMorphism() = default;
  Module source_, target_;
  Mat mat_;
};

// The algebra as a left module over itself.
inline Module regular_module(const AlgebraPtr& alg) {
  std::vector<Mat> action;
  for (int i = 0; i < alg->dim(); ++i) {
    Mat e(alg->field(), alg->dim(), 1);
    e.at(i, 0) = 1;
    action.push_back(alg->left_mult_matrix(e));
  }
  return Module::create(alg, std::move(action));
}

/******** Hom spaces ********/

// Canonical basis of Hom_A(m, n): kernel of the commutation system, rref rows.
inline std::vector<ModuleMorphism> hom_basis(const Module& m, const Module& n) {
  if (!same_algebra(m.algebra(), n.algebra()))
    throw MismatchError("hom between modules over different algebras");
  Field f = m.field();
  MatSystem sys(f);
  int x = sys.add_unknown(n.dim(), m.dim());
  Mat id_n = Mat::identity(f, n.dim());
  Mat id_m = Mat::identity(f, m.dim());
  for (int i = 0; i < m.algebra()->dim(); ++i) {
    // F rho_m(b) - rho_n(b) F = 0
    sys.add_equation({{x, id_n, m.action()[static_cast<size_t>(i)]},
                      {x, -n.action()[static_cast<size_t>(i)], id_m}},
                     Mat(f, n.dim(), m.dim()));
  }
  std::vector<ModuleMorphism> basis;
  for (auto& sol : sys.kernel()) basis.push_back(ModuleMorphism::create(m, n, sol[0]));
  return basis;
}

inline int hom_dim(const Module& m, const Module& n) {
  return static_cast<int>(hom_basis(m, n).size());
}

/******** Direct sums ********/

struct DirectSum {
  Module sum;
  std::vector<ModuleMorphism> injections;
  std::vector<ModuleMorphism> projections;
};

inline DirectSum direct_sum(const std::vector<Module>& parts, AlgebraPtr alg_if_empty = nullptr) {
  if (parts.empty() && !alg_if_empty) throw ValueError("direct_sum of nothing needs an algebra");
  AlgebraPtr alg = parts.empty() ? alg_if_empty : parts[0].algebra();
  Field f = alg->field();
  int total = 0;
  for (const Module& p : parts) {
    if (!same_algebra(p.algebra(), alg)) throw MismatchError("direct sum across algebras");
    total += p.dim();
  }
  std::vector<Mat> action;
  for (int i = 0; i < alg->dim(); ++i) {
    Mat blk(f, total, total);
    int off = 0;
    for (const Module& p : parts) {
      const Mat& a = p.action()[static_cast<size_t>(i)];
      for (int r = 0; r < p.dim(); ++r)
        for (int c = 0; c < p.dim(); ++c) blk.at(off + r, off + c) = a.at(r, c);
      off += p.dim();
    }
    action.push_back(std::move(blk));
  }
  DirectSum out{Module::create(alg, std::move(action)), {}, {}};
  int off = 0;
  for (const Module& p : parts) {
    Mat inj(f, total, p.dim());
    Mat prj(f, p.dim(), total);
    for (int r = 0; r < p.dim(); ++r) {
      inj.at(off + r, r) = 1;
      prj.at(r, off + r) = 1;
    }
    out.injections.push_back(ModuleMorphism::create(p, out.sum, std::move(inj)));
    out.projections.push_back(ModuleMorphism::create(out.sum, p, std::move(prj)));
    off += p.dim();
  }
  return out;
}

/******** Submodules, kernels, cokernels ********/

struct SubmoduleResult {
  Module sub;
  ModuleMorphism inclusion;
};

// Module structure on the row span of `rows` (must be action-invariant).
inline SubmoduleResult submodule(const Module& m, const Mat& rows_in) {
  Mat rows = canonical_rows(rows_in);
  Field f = m.field();
  Mat incl = rows.transpose();  // m.dim x k
  std::vector<Mat> action;
  for (int i = 0; i < m.algebra()->dim(); ++i) {
    // act(b_i) restricted: solve incl * X = act * incl; invariance makes it feasible.
    auto s = solve(incl, m.action()[static_cast<size_t>(i)] * incl);
    if (!s) throw ValueError("rows do not span an action-invariant subspace");
    action.push_back(s->particular);
  }
  Module sub = Module::create(m.algebra(), std::move(action));
  return {sub, ModuleMorphism::create(sub, m, incl)};
}

struct QuotientResult {
  Module quotient;
  ModuleMorphism projection;
  Mat section;  // m.dim x q.dim, splits projection F-linearly (not A-linearly)
};

// Quotient by an invariant row span. Basis: classes of the non-pivot standard
// basis vectors of the subspace's rref.
inline QuotientResult quotient(const Module& m, const Mat& rows_in) {
  Mat rows = canonical_rows(rows_in);
  Field f = m.field();
  Rref r = rref(rows);
  std::vector<int> free_cols;
  {
    size_t pi = 0;
    for (int c = 0; c < m.dim(); ++c) {
      if (pi < r.pivots.size() && r.pivots[pi] == c)
        ++pi;
      else
        free_cols.push_back(c);
    }
  }
  int q = static_cast<int>(free_cols.size());
  // proj: reduce by the subspace, read off free coordinates.
  Mat proj(f, q, m.dim());
  for (int c = 0; c < m.dim(); ++c) {
    Mat e(f, m.dim(), 1);
    e.at(c, 0) = 1;
    // reduce e modulo rows: subtract row_i * e[pivot_i]
    Mat red = e;
    for (int i = 0; i < rows.rows(); ++i) {
      uint32_t coef = red.at(r.pivots[i], 0);
      if (coef) red = red - rows.row(i).transpose().scaled(coef);
    }
    for (int qi = 0; qi < q; ++qi) proj.at(qi, c) = red.at(free_cols[static_cast<size_t>(qi)], 0);
  }
  Mat section(f, m.dim(), q);
  for (int qi = 0; qi < q; ++qi) section.at(free_cols[static_cast<size_t>(qi)], qi) = 1;
  std::vector<Mat> action;
  for (int i = 0; i < m.algebra()->dim(); ++i)
    action.push_back(proj * m.action()[static_cast<size_t>(i)] * section);
  Module qm = Module::create(m.algebra(), std::move(action));
  // Invariance check: projection must be a morphism.
  ModuleMorphism pm = ModuleMorphism::create(m, qm, proj);
  return {qm, pm, section};
}

struct KernelResult {
  Module kernel;
  ModuleMorphism inclusion;
};

inline KernelResult kernel(const ModuleMorphism& phi) {
  auto s = submodule(phi.source(), kernel_basis(phi.mat()));
  return {s.sub, s.inclusion};
}

struct CokernelResult {
  Module cokernel;
  ModuleMorphism projection;
  Mat section;
};

inline CokernelResult cokernel(const ModuleMorphism& phi) {
  auto q = quotient(phi.target(), image_basis(phi.mat()));
  return {q.quotient, q.projection, q.section};
}

/******** Universal-property factorizations ********/

// h with incl ∘ h = g, for monic incl and im(g) ⊆ im(incl).
inline ModuleMorphism factor_through_injection(const ModuleMorphism& incl,
                                               const ModuleMorphism& g) {
  if (incl.target() != g.target()) throw MismatchError("factor_through_injection targets differ");
  auto s = solve(incl.mat(), g.mat());
  if (!s) throw NoLiftError("map does not land in the submodule");
  return ModuleMorphism::create(g.source(), incl.source(), s->particular);
}

// h with h ∘ proj = g, for epic proj and g vanishing on ker(proj).
inline ModuleMorphism factor_through_surjection(const ModuleMorphism& proj,
                                                const ModuleMorphism& g) {
  if (proj.source() != g.source()) throw MismatchError("factor_through_surjection sources differ");
  auto s = solve(proj.mat().transpose(), g.mat().transpose());
  if (!s) throw NoLiftError("map does not kill the kernel of the projection");
  return ModuleMorphism::create(proj.target(), g.target(), s->particular.transpose());
}

// Canonical h with phi ∘ h = g, for phi and g sharing a target; this is the
// factorization a precover must produce. nullopt when no morphism works.
inline std::optional<ModuleMorphism> lift_along(const ModuleMorphism& phi,
                                                const ModuleMorphism& g) {
  if (phi.target() != g.target()) throw MismatchError("lift_along targets differ");
  Field f = phi.source().field();
  MatSystem sys(f);
  int h = sys.add_unknown(phi.source().dim(), g.source().dim());
  Mat id_c = Mat::identity(f, phi.source().dim());
  Mat id_t = Mat::identity(f, g.source().dim());
  sys.add_equation({{h, phi.mat(), id_t}}, g.mat());
  for (int i = 0; i < phi.source().algebra()->dim(); ++i)
    sys.add_equation({{h, id_c, g.source().action()[static_cast<size_t>(i)]},
                      {h, -phi.source().action()[static_cast<size_t>(i)], id_t}},
                     Mat(f, phi.source().dim(), g.source().dim()));
  auto sol = sys.solve_canonical();
  if (!sol) return std::nullopt;
  return ModuleMorphism::create(g.source(), phi.source(), (*sol)[0]);
}

// Canonical h with h ∘ phi = g, for phi and g sharing a source; the
// factorization a preenvelope must produce.
inline std::optional<ModuleMorphism> extend_along(const ModuleMorphism& phi,
                                                  const ModuleMorphism& g) {
  if (phi.source() != g.source()) throw MismatchError("extend_along sources differ");
  Field f = phi.target().field();
  MatSystem sys(f);
  int h = sys.add_unknown(g.target().dim(), phi.target().dim());
  Mat id_c = Mat::identity(f, phi.target().dim());
  Mat id_t = Mat::identity(f, g.target().dim());
  sys.add_equation({{h, id_t, phi.mat()}}, g.mat());
  for (int i = 0; i < phi.source().algebra()->dim(); ++i)
    sys.add_equation({{h, id_t, phi.target().action()[static_cast<size_t>(i)]},
                      {h, -g.target().action()[static_cast<size_t>(i)], id_c}},
                     Mat(f, g.target().dim(), phi.target().dim()));
  auto sol = sys.solve_canonical();
  if (!sol) return std::nullopt;
  return ModuleMorphism::create(phi.target(), g.target(), (*sol)[0]);
}

/******** Structure subspaces ********/

// J*M as canonical rows in M's coordinates.
inline Mat radical_subspace(const Module& m) {
  const Mat& jrows = m.algebra()->radical_rows();
  Mat acc(m.field(), 0, m.dim());
  for (int r = 0; r < jrows.rows(); ++r)
    acc = Mat::vstack(acc, image_basis(m.act(jrows.row(r).transpose())));
  return canonical_rows(acc);
}

// soc(M) = annihilator of J: intersection of kernels of the radical action.
inline Mat socle_subspace(const Module& m) {
  const Mat& jrows = m.algebra()->radical_rows();
  if (jrows.rows() == 0) return Mat::identity(m.field(), m.dim());
  Mat stacked(m.field(), 0, m.dim());
  for (int r = 0; r < jrows.rows(); ++r)
    stacked = Mat::vstack(stacked, m.act(jrows.row(r).transpose()));
  return kernel_basis(stacked);
}

// top(M) = M / JM with the induced action.
inline QuotientResult top(const Module& m) { return quotient(m, radical_subspace(m)); }

/******** Duality ********/

// F-linear dual as a left module over the opposite algebra; strictly
// involutive on matrices (transpose twice is the identity).
inline Module dualize(const Module& m, const AlgebraPtr& opposite) {
  std::vector<Mat> action;
  for (const Mat& a : m.action()) action.push_back(a.transpose());
  return Module::create(opposite, std::move(action));
}

// Contravariant: dualize(f): D(target) -> D(source), matrix transposed.
inline ModuleMorphism dualize(const ModuleMorphism& f, const AlgebraPtr& opposite) {
  return ModuleMorphism::create(dualize(f.target(), opposite), dualize(f.source(), opposite),
                                f.mat().transpose());
}

}  // namespace homx
