#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homx/module.hpp"

namespace homx {

/******** Approximation classes ********/

enum class ClassKind { Projectives, Injectives, AddClosure };

// Indecomposable projectives A*e_i, presented as submodules of the regular
// module so their basis vectors are literal algebra elements.
inline std::vector<SubmoduleResult> indecomposable_projective_presentations(
    const AlgebraPtr& alg) {
  Module reg = regular_module(alg);
  std::vector<SubmoduleResult> out;
  for (const Mat& e : alg->idempotents())
    out.push_back(submodule(reg, image_basis(alg->right_mult_matrix(e))));
  return out;
}

inline std::vector<Module> indecomposable_projectives(const AlgebraPtr& alg) {
  std::vector<Module> out;
  for (auto& p : indecomposable_projective_presentations(alg)) out.push_back(std::move(p.sub));
  return out;
}

// An additively closed class of modules, presented by finitely many additive
// generators. Projectives and injectives carry exact generator lists too
// (the A*e_i and their duals), so every class can be treated uniformly; the
// special kinds additionally unlock cover/envelope constructions.
class ApproxClass {
 public:
  static ApproxClass projectives(AlgebraPtr alg) {
    ApproxClass c;
    c.kind_ = ClassKind::Projectives;
    c.gens_ = indecomposable_projectives(alg);
    c.alg_ = std::move(alg);
    return c;
  }

  static ApproxClass injectives(AlgebraPtr alg) {
    ApproxClass c;
    c.kind_ = ClassKind::Injectives;
    c.alg_ = std::move(alg);
    auto op = c.alg_->opposite();
    for (const Module& p : indecomposable_projectives(op)) c.gens_.push_back(dualize(p, c.alg_));
    return c;
  }

  static ApproxClass add_closure(std::vector<Module> gens, AlgebraPtr alg_if_empty = nullptr) {
    if (gens.empty() && !alg_if_empty)
      throw ValueError("add_closure of an empty list needs an algebra");
    ApproxClass c;
    c.kind_ = ClassKind::AddClosure;
    c.alg_ = gens.empty() ? std::move(alg_if_empty) : gens[0].algebra();
    for (const Module& g : gens)
      if (!same_algebra(g.algebra(), c.alg_))
        throw MismatchError("add_closure generators over different algebras");
    c.gens_ = std::move(gens);
    return c;
  }

  ClassKind kind() const { return kind_; }
  const AlgebraPtr& algebra() const { return alg_; }
  const std::vector<Module>& generators() const { return gens_; }

  // Projectives and injectives are closed under extensions; a bare additive
  // closure need not be, and downstream certificates say so.
  bool extension_closed_certified() const { return kind_ != ClassKind::AddClosure; }

  // Image of the class under F-linear duality, over the opposite algebra.
  ApproxClass dual() const {
    auto op = alg_->opposite();
    switch (kind_) {
      case ClassKind::Projectives:
        return injectives(op);
      case ClassKind::Injectives:
        return projectives(op);
      case ClassKind::AddClosure: {
        std::vector<Module> d;
        for (const Module& g : gens_) d.push_back(dualize(g, op));
        return add_closure(std::move(d), op);
      }
    }
    throw ValueError("unreachable class kind");
  }

  std::string name() const {
    switch (kind_) {
      case ClassKind::Projectives:
        return "projectives";
      case ClassKind::Injectives:
        return "injectives";
      case ClassKind::AddClosure:
        return "add(" + std::to_string(gens_.size()) + " generators)";
    }
    return "?";
  }

 private:
  ApproxClass() = default;
  ClassKind kind_ = ClassKind::AddClosure;
  AlgebraPtr alg_;
  std::vector<Module> gens_;
};

/******** Approximation maps ********/

// A class approximation together with how it was assembled: for a precover
// the map runs C -> m, for a preenvelope m -> C, with C a sum of
// multiplicities[i] copies of generator i (in generator order).
struct ApproxMap {
  ModuleMorphism map;
  std::vector<int> multiplicities;
  std::string method;
};

// phi: ⊕_i G_i^{dim Hom(G_i,m)} -> m, one summand per hom-basis element.
// Every map from a generator factors through phi by construction.
inline ApproxMap evaluation_map(const ApproxClass& cls, const Module& m) {
  Field f = m.field();
  std::vector<Module> parts;
  std::vector<int> mult;
  Mat big(f, m.dim(), 0);
  for (const Module& g : cls.generators()) {
    auto basis = hom_basis(g, m);
    mult.push_back(static_cast<int>(basis.size()));
    for (const auto& b : basis) {
      parts.push_back(g);
      big = Mat::hstack(big, b.mat());
    }
  }
  DirectSum ds = direct_sum(parts, cls.algebra());
  return {ModuleMorphism::create(ds.sum, m, std::move(big)), std::move(mult), "evaluation"};
}

// psi: m -> ⊕_i G_i^{dim Hom(m,G_i)}; every map into a generator factors
// through psi.
inline ApproxMap coevaluation_map(const ApproxClass& cls, const Module& m) {
  Field f = m.field();
  std::vector<Module> parts;
  std::vector<int> mult;
  Mat big(f, 0, m.dim());
  for (const Module& g : cls.generators()) {
    auto basis = hom_basis(m, g);
    mult.push_back(static_cast<int>(basis.size()));
    for (const auto& b : basis) {
      parts.push_back(g);
      big = Mat::vstack(big, b.mat());
    }
  }
  DirectSum ds = direct_sum(parts, cls.algebra());
  return {ModuleMorphism::create(m, ds.sum, std::move(big)), std::move(mult), "coevaluation"};
}

// Projective cover: P = ⊕ (A e_i)^{dim e_i·top(m)} -> m, sending the chosen
// generator of each copy to an idempotent-corrected preimage of a top basis
// vector. Certified epic with superfluous kernel (ker ⊆ J·P).
inline ApproxMap projective_cover(const Module& m) {
  const AlgebraPtr& alg = m.algebra();
  Field f = m.field();
  QuotientResult t = top(m);
  auto pres = indecomposable_projective_presentations(alg);
  std::vector<Module> parts;
  Mat big(f, m.dim(), 0);
  std::vector<int> mult;
  for (size_t i = 0; i < alg->idempotents().size(); ++i) {
    const Mat& e = alg->idempotents()[i];
    Mat img = image_basis(t.quotient.act(e));  // basis of e·top(m)
    mult.push_back(img.rows());
    for (int r = 0; r < img.rows(); ++r) {
      // u = e * (any preimage of the top vector); still a preimage since the
      // top vector lies in the image of e.
      Mat u = m.act(e) * (t.section * img.row(r).transpose());
      const Mat& incl = pres[i].inclusion.mat();  // columns: basis of A e_i in A
      Mat block(f, m.dim(), 0);
      for (int c = 0; c < incl.cols(); ++c) block = Mat::hstack(block, m.act(incl.col(c)) * u);
      parts.push_back(pres[i].sub);
      big = Mat::hstack(big, block);
    }
  }
  DirectSum ds = direct_sum(parts, alg);
  ModuleMorphism phi = ModuleMorphism::create(ds.sum, m, std::move(big));
  if (!phi.is_epic()) throw CheckError("projective cover failed to be epic");
  if (!subspace_contains(radical_subspace(ds.sum), kernel_basis(phi.mat())))
    throw CheckError("projective cover kernel is not superfluous");
  return {std::move(phi), std::move(mult), "projective_cover"};
}

// Injective envelope: dual of the projective cover of the dual module.
// Certified monic with essential image (socle of the target inside the image).
inline ApproxMap injective_envelope(const Module& m) {
  const AlgebraPtr& alg = m.algebra();
  auto op = alg->opposite();
  ApproxMap cover = projective_cover(dualize(m, op));
  ModuleMorphism env = dualize(cover.map, alg);
  if (!env.is_monic()) throw CheckError("injective envelope failed to be monic");
  if (!subspace_contains(image_basis(env.mat()), socle_subspace(env.target())))
    throw CheckError("injective envelope image does not contain the socle");
  return {std::move(env), std::move(cover.multiplicities), "injective_envelope"};
}

// Class precover of m. For projectives this is the cover (minimal); other
// kinds use the evaluation map.
inline ApproxMap precover(const ApproxClass& cls, const Module& m) {
  if (cls.kind() == ClassKind::Projectives) return projective_cover(m);
  return evaluation_map(cls, m);
}

// Class preenvelope of m. For injectives this is the envelope (minimal).
inline ApproxMap preenvelope(const ApproxClass& cls, const Module& m) {
  if (cls.kind() == ClassKind::Injectives) return injective_envelope(m);
  return coevaluation_map(cls, m);
}

// Second opinion for cross-checks: precover computed on the dual side.
inline ApproxMap precover_via_duality(const ApproxClass& cls, const Module& m) {
  auto op = cls.algebra()->opposite();
  ApproxMap env = preenvelope(cls.dual(), dualize(m, op));
  ModuleMorphism back = dualize(env.map, cls.algebra());
  return {std::move(back), std::move(env.multiplicities), env.method + " (dualized)"};
}

inline ApproxMap preenvelope_via_duality(const ApproxClass& cls, const Module& m) {
  auto op = cls.algebra()->opposite();
  ApproxMap cov = precover(cls.dual(), dualize(m, op));
  ModuleMorphism back = dualize(cov.map, cls.algebra());
  return {std::move(back), std::move(cov.multiplicities), cov.method + " (dualized)"};
}

/******** Membership ********/

// m lies in the class iff the evaluation precover splits; the section is the
// splitting certificate.
struct MemberResult {
  bool member = false;
  ModuleMorphism approximation;
  std::optional<ModuleMorphism> section;
};

inline MemberResult member(const ApproxClass& cls, const Module& m) {
  ApproxMap ev = evaluation_map(cls, m);
  auto s = lift_along(ev.map, ModuleMorphism::identity(m));
  return {s.has_value(), std::move(ev.map), std::move(s)};
}

/******** Resolvents ********/

// Left class resolution by iterated precovers onto kernels:
//   E_depth -> ... -> E_1 -> E_0 -> m,   t_{k+1}: E_{k+1} ->> ... -> K_k = ker t_k.
// Exact after Hom(G,-) for every generator G; plain exactness may fail when
// stage precovers are not epic.
struct Resolvent {
  ApproxClass cls;
  Module target;
  std::vector<Module> terms;                     // E_0..E_depth
  ApproxMap augmentation_data;                   // t_0: E_0 -> m
  std::vector<ModuleMorphism> maps;              // t_k: E_k -> E_{k-1}, k >= 1
  std::vector<Module> kernels;                   // K_k = ker t_k, k = 0..depth
  std::vector<ModuleMorphism> kernel_inclusions; // K_k -> E_k
  std::vector<ApproxMap> stage_data;             // precover E_{k+1} -> K_k

  const ModuleMorphism& augmentation() const { return augmentation_data.map; }
  int depth() const { return static_cast<int>(terms.size()) - 1; }
};

inline Resolvent resolvent(const ApproxClass& cls, const Module& m, int depth) {
  if (depth < 0) throw ValueError("resolvent depth must be nonnegative");
  ApproxMap aug = precover(cls, m);
  Resolvent r{cls, m, {aug.map.source()}, std::move(aug), {}, {}, {}, {}};
  KernelResult k0 = kernel(r.augmentation());
  r.kernels.push_back(std::move(k0.kernel));
  r.kernel_inclusions.push_back(std::move(k0.inclusion));
  for (int s = 0; s < depth; ++s) {
    ApproxMap st = precover(cls, r.kernels.back());
    r.terms.push_back(st.map.source());
    r.maps.push_back(r.kernel_inclusions.back().compose(st.map));
    KernelResult kk = kernel(st.map);
    r.kernels.push_back(std::move(kk.kernel));
    r.kernel_inclusions.push_back(std::move(kk.inclusion));
    r.stage_data.push_back(std::move(st));
  }
  return r;
}

// Right class resolution by iterated preenvelopes of cokernels:
//   m -> E^0 -> E^1 -> ...,   t^{k+1}: E^k ->> C^k = coker t^k -> E^{k+1}.
struct Coresolvent {
  ApproxClass cls;
  Module source;
  std::vector<Module> terms;                        // E^0..E^depth
  ApproxMap augmentation_data;                      // t^0: m -> E^0
  std::vector<ModuleMorphism> maps;                 // t^k: E^{k-1} -> E^k, k >= 1
  std::vector<Module> cokernels;                    // C^k, k = 0..depth
  std::vector<ModuleMorphism> cokernel_projections; // E^k -> C^k
  std::vector<ApproxMap> stage_data;                // preenvelope C^k -> E^{k+1}

  const ModuleMorphism& augmentation() const { return augmentation_data.map; }
  int depth() const { return static_cast<int>(terms.size()) - 1; }
};

inline Coresolvent coresolvent(const ApproxClass& cls, const Module& m, int depth) {
  if (depth < 0) throw ValueError("coresolvent depth must be nonnegative");
  ApproxMap aug = preenvelope(cls, m);
  Coresolvent r{cls, m, {aug.map.target()}, std::move(aug), {}, {}, {}, {}};
  CokernelResult c0 = cokernel(r.augmentation());
  r.cokernels.push_back(std::move(c0.cokernel));
  r.cokernel_projections.push_back(std::move(c0.projection));
  for (int s = 0; s < depth; ++s) {
    ApproxMap st = preenvelope(cls, r.cokernels.back());
    r.terms.push_back(st.map.target());
    r.maps.push_back(st.map.compose(r.cokernel_projections.back()));
    CokernelResult cc = cokernel(st.map);
    r.cokernels.push_back(std::move(cc.cokernel));
    r.cokernel_projections.push_back(std::move(cc.projection));
    r.stage_data.push_back(std::move(st));
  }
  return r;
}

/******** Hom-exactness certificates ********/

// Rank of the post-composition map Hom(g, t.source) -> Hom(g, t.target).
inline int postcompose_rank(const ModuleMorphism& t, const Module& g) {
  Mat stacked(g.field(), 0, t.target().dim() * g.dim());
  for (const auto& b : hom_basis(g, t.source()))
    stacked = Mat::vstack(stacked, t.compose(b).mat().vec_row());
  return rank(stacked);
}

// Rank of the pre-composition map Hom(t.target, g) -> Hom(t.source, g).
inline int precompose_rank(const ModuleMorphism& t, const Module& g) {
  Mat stacked(g.field(), 0, g.dim() * t.source().dim());
  for (const auto& b : hom_basis(t.target(), g))
    stacked = Mat::vstack(stacked, b.compose(t).mat().vec_row());
  return rank(stacked);
}

// Certifies Hom(G,-)-exactness of a resolvent for every class generator G:
// each stage map (and the augmentation) stays surjective after Hom(G,-).
inline void check_resolvent_hom_exact(const Resolvent& r) {
  for (const Module& g : r.cls.generators()) {
    if (postcompose_rank(r.augmentation(), g) != hom_dim(g, r.target))
      throw CheckError("resolvent augmentation is not Hom(G,-)-onto");
    for (size_t k = 0; k < r.stage_data.size(); ++k)
      if (postcompose_rank(r.stage_data[k].map, g) != hom_dim(g, r.kernels[k]))
        throw CheckError("resolvent stage " + std::to_string(k + 1) + " is not Hom(G,-)-onto");
  }
}

// Dual certificate for a coresolvent: Hom(-,G)-exactness.
inline void check_coresolvent_hom_exact(const Coresolvent& r) {
  for (const Module& g : r.cls.generators()) {
    if (precompose_rank(r.augmentation(), g) != hom_dim(r.source, g))
      throw CheckError("coresolvent augmentation is not Hom(-,G)-onto");
    for (size_t k = 0; k < r.stage_data.size(); ++k)
      if (precompose_rank(r.stage_data[k].map, g) != hom_dim(r.cokernels[k], g))
        throw CheckError("coresolvent stage " + std::to_string(k + 1) + " is not Hom(-,G)-onto");
  }
}

}  // namespace homx
