#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homx/approx.hpp"
#include "homx/complex.hpp"
#include "homx/trace.hpp"

namespace homx {

/******** Module-level precover lifting ********/

// Canonical theta with phi ∘ theta = beta. Failure is a finding (phi is not a
// precover for this source), not a crash elsewhere, hence the typed error.
inline ModuleMorphism lift_through_precover(const ModuleMorphism& beta,
                                            const ModuleMorphism& phi) {
  auto h = lift_along(phi, beta);
  if (!h) throw NoLiftError("no factorization through the precover");
  return *h;
}

inline ModuleMorphism extend_through_preenvelope(const ModuleMorphism& beta,
                                                 const ModuleMorphism& phi) {
  auto h = extend_along(phi, beta);
  if (!h) throw NoLiftError("no factorization across the preenvelope");
  return *h;
}

/******** Componentwise lift ********/

enum class LiftMode { MonicPrecover, EpicPreenvelope };

struct ComponentwiseLift {
  Complex p;
  ChainMap f;  // p -> x (monic mode) or x -> p (epic mode)
  Trace trace;
};

// Degreewise approximations glued into a complex: the differential on P is the
// canonical lift of d∘f through the neighbouring approximation, and d² = 0 on
// P is forced by monicity (resp. epicity) of the components.
inline ComponentwiseLift componentwise_lift(const Complex& x, const ApproxClass& cls,
                                            LiftMode mode) {
  bool monic = mode == LiftMode::MonicPrecover;
  Trace trace;
  if (x.is_zero()) {
    Complex z = Complex::zero_complex(x.algebra());
    ChainMap f = monic ? ChainMap::zero(z, x) : ChainMap::zero(x, z);
    trace.finalize();
    return {std::move(z), std::move(f), std::move(trace)};
  }
  std::vector<Module> terms;
  std::vector<ModuleMorphism> comps;  // f_n per degree
  for (int n = x.lo(); n <= x.hi(); ++n) {
    Module xn = x.term(n);
    MemberResult mem = member(cls, xn);
    if (mem.member) {
      terms.push_back(xn);
      comps.push_back(ModuleMorphism::identity(xn));
      trace.step("f", 0, n, comps.back().mat(), "identity approximation");
      continue;
    }
    if (monic) {
      ApproxMap ap = precover(cls, xn);
      if (!ap.map.is_monic())
        throw HypothesisError("componentwise precover is not monic", n);
      terms.push_back(ap.map.source());
      comps.push_back(ap.map);
    } else {
      ApproxMap ap = preenvelope(cls, xn);
      if (!ap.map.is_epic())
        throw HypothesisError("componentwise preenvelope is not epic", n);
      terms.push_back(ap.map.target());
      comps.push_back(ap.map);
    }
    trace.step("f", 0, n, comps.back().mat());
  }
  std::vector<ModuleMorphism> diffs;
  for (int n = x.lo() + 1; n <= x.hi(); ++n) {
    size_t i = static_cast<size_t>(n - x.lo());
    ModuleMorphism lambda = monic
        ? lift_through_precover(x.diff(n).compose(comps[i]), comps[i - 1])
        : extend_through_preenvelope(comps[i - 1].compose(x.diff(n)), comps[i]);
    trace.step("lambda", 0, n, lambda.mat());
    trace.square("f lambda matches d f at degree " + std::to_string(n),
                 monic ? comps[i - 1].mat() * lambda.mat()
                       : lambda.mat() * comps[i].mat(),
                 monic ? x.diff(n).mat() * comps[i].mat()
                       : comps[i - 1].mat() * x.diff(n).mat());
    diffs.push_back(std::move(lambda));
  }
  Complex p = Complex::create(x.algebra(), x.lo(), std::move(terms), std::move(diffs));
  std::map<int, Mat> fm;
  for (int n = x.lo(); n <= x.hi(); ++n) {
    Mat c = comps[static_cast<size_t>(n - x.lo())].mat();
    if (c.rows() > 0 && c.cols() > 0 && !c.is_zero()) fm.emplace(n, std::move(c));
  }
  ChainMap f = monic ? ChainMap::create(p, x, std::move(fm))
                     : ChainMap::create(x, p, std::move(fm));
  if (monic && !f.is_degreewise_monic())
    throw CheckError("componentwise lift lost monicity");
  if (!monic && !f.is_degreewise_epic())
    throw CheckError("componentwise lift lost epicity");
  trace.finalize();
  return {std::move(p), std::move(f), std::move(trace)};
}

/******** Bounded precover by cone induction ********/

// One induction stage: the resolvent of x_k spliced below the cone, the lift
// nu into the previous stage, and the assembled approximation of the
// truncation X(k) = x restricted to degrees <= k.
struct PrecoverStage {
  int degree;             // splice degree k
  Resolvent res;          // resolvent of x_k
  Complex spliced;        // res spliced at k-1 (at k for the base stage)
  ChainMap nu;            // spliced -> previous d; zero for the base
  Complex d;              // D(k), terms in the class, top degree lo + depth
  ChainMap phi;           // D(k) -> X(k)
  ChainMap include_prev;  // D(k-1) -> D(k) subcomplex inclusion
};

struct BoundedPrecover {
  ApproxClass cls;
  Complex x;
  int depth = 0;
  int safe_lo = 0;
  int safe_hi = -1;  // truncation cannot affect factorization tests in [safe_lo, safe_hi]
  std::vector<PrecoverStage> stages;  // base stage first
  std::vector<Complex> kernels;       // L^k = Ker(D(k) -> X(k)) per stage
  Trace trace;

  const Complex& d() const { return stages.back().d; }
  const ChainMap& phi() const { return stages.back().phi; }
};

namespace detail {

// Solves d_target ∘ s = w for a module morphism s; feasibility is the
// Hom(-, L) exactness the construction guarantees inside the safe window.
inline ModuleMorphism corrective_term(const ModuleMorphism& diff, const ModuleMorphism& w,
                                      int degree) {
  auto s = lift_along(diff, w);
  if (!s)
    throw NoLiftError("corrective term at degree " + std::to_string(degree) +
                      " does not exist; the test leaves the safe window");
  return *s;
}

// Lifts a map landing in Ker t_j through the resolvent stage precover
// E_{j+1} -> K_j.
inline ModuleMorphism kernel_stage_lift(const Resolvent& res, size_t j,
                                        const ModuleMorphism& w, int degree) {
  ModuleMorphism into_kernel = factor_through_injection(res.kernel_inclusions[j], w);
  if (j >= res.stage_data.size()) {
    if (!into_kernel.mat().is_zero())
      throw NoLiftError("resolvent depth exhausted at degree " + std::to_string(degree));
    return ModuleMorphism::zero(w.source(), res.terms.back());
  }
  auto r = lift_along(res.stage_data[j].map, into_kernel);
  if (!r)
    throw NoLiftError("kernel stage lift failed at degree " + std::to_string(degree) +
                      "; source is not in the class");
  return *r;
}

// The literal stage recipe: lift beta: A -> X(k) through phi(k) using the
// stored resolvent and nu data, one corrective term per degree.
inline ChainMap lift_precover_stage(const BoundedPrecover& pc, size_t si, const ChainMap& beta,
                                    Trace* tr) {
  const PrecoverStage& st = pc.stages[si];
  const Complex& a = beta.source();
  if (a.is_zero()) return ChainMap::zero(a, st.d);
  if (st.d.is_zero()) {
    if (!beta.is_zero())
      throw NoLiftError("approximation is the zero complex but the test map is not");
    return ChainMap::zero(a, st.d);
  }
  Field f = a.field();
  int k = st.degree;
  int stage_no = static_cast<int>(si);
  std::map<int, Mat> comps;

  // Degrees < k: recurse into the previous stage and embed along the cone.
  if (si > 0) {
    Complex a_prev = truncate_above(a, k - 1);
    const Complex& x_prev = pc.stages[si - 1].phi.target();
    std::map<int, Mat> gm;
    for (int m = a_prev.lo(); m <= a_prev.hi(); ++m) {
      Mat c = beta.component(m);
      if (c.rows() > 0 && c.cols() > 0 && !c.is_zero()) gm.emplace(m, std::move(c));
    }
    ChainMap gamma = ChainMap::create(a_prev, x_prev, std::move(gm));
    ChainMap embedded = st.include_prev.compose(lift_precover_stage(pc, si - 1, gamma, tr));
    for (int m = a_prev.lo(); m <= std::min(k - 1, a_prev.hi()); ++m) {
      Mat c = embedded.component(m);
      if (c.rows() > 0 && c.cols() > 0 && !c.is_zero()) comps.emplace(m, std::move(c));
    }
  }

  const Resolvent& res = st.res;
  const bool base = si == 0;
  const Complex* dprev = base ? nullptr : &pc.stages[si - 1].d;

  // Degree k: theta_k = (s, r) with t0 r = beta_k and d s = theta' d - nu r.
  ModuleMorphism beta_k = beta.component_morphism(k);
  auto r = lift_along(res.augmentation(), beta_k);
  if (!r)
    throw NoLiftError("degree " + std::to_string(k) +
                      ": no lift through the class precover of this term");
  if (tr) tr->step("r", stage_no, k, r->mat());
  ModuleMorphism theta_k = *r;
  if (!base) {
    ModuleMorphism prev_part =
        ModuleMorphism::create(a.term(k), dprev->term(k - 1),
                               comps.count(k - 1)
                                   ? Mat(comps.at(k - 1)).block(0, 0, dprev->term(k - 1).dim(),
                                                                a.term(k - 1).dim()) *
                                         beta.source().diff(k).mat()
                                   : Mat(f, dprev->term(k - 1).dim(), a.term(k).dim()));
    ModuleMorphism w = prev_part + (-st.nu.component_morphism(k - 1).compose(*r));
    ModuleMorphism s = corrective_term(dprev->diff(k), w, k);
    if (tr) tr->step("s", stage_no, k, s.mat());
    theta_k = ModuleMorphism::create(a.term(k), st.d.term(k),
                                     Mat::vstack(s.mat(), r->mat()));
  }
  if (theta_k.mat().rows() > 0 && theta_k.mat().cols() > 0 && !theta_k.mat().is_zero())
    comps.emplace(k, theta_k.mat());

  // Degree k+1: theta_{k+1} = (s1, -r1) with t1 r1 = r d and
  // d s1 = s d + nu r1 (the starred corrective identity).
  if (a.term(k + 1).dim() > 0) {
    ModuleMorphism w_e = r->compose(a.diff(k + 1));
    ModuleMorphism r1 = kernel_stage_lift(res, 0, w_e, k + 1);
    if (tr) tr->step("r1", stage_no, k + 1, r1.mat());
    ModuleMorphism theta_k1 = r1;
    if (!base) {
      Mat s_mat = theta_k.mat().block(0, 0, dprev->term(k).dim(), a.term(k).dim());
      ModuleMorphism s_mor = ModuleMorphism::create(a.term(k), dprev->term(k), s_mat);
      ModuleMorphism w1 = s_mor.compose(a.diff(k + 1)) + st.nu.component_morphism(k).compose(r1);
      ModuleMorphism s1 = corrective_term(dprev->diff(k + 1), w1, k + 1);
      if (tr) tr->step("s1", stage_no, k + 1, s1.mat());
      theta_k1 = ModuleMorphism::create(a.term(k + 1), st.d.term(k + 1),
                                        Mat::vstack(s1.mat(), -r1.mat()));
    }
    if (!theta_k1.mat().is_zero()) comps.emplace(k + 1, theta_k1.mat());
  }

  // Degrees >= k+2: one canonical corrective solve per degree.
  for (int m = k + 2; m <= a.hi(); ++m) {
    if (a.term(m).dim() == 0) continue;
    Mat prev = comps.count(m - 1) ? comps.at(m - 1)
                                  : Mat(f, st.d.term(m - 1).dim(), a.term(m - 1).dim());
    ModuleMorphism w = ModuleMorphism::create(a.term(m), st.d.term(m - 1),
                                              prev * a.diff(m).mat());
    ModuleMorphism theta_m = corrective_term(st.d.diff(m), w, m);
    if (tr) tr->step("theta", stage_no, m, theta_m.mat());
    if (!theta_m.mat().is_zero()) comps.emplace(m, theta_m.mat());
  }

  return ChainMap::create(a, st.d, std::move(comps));
}

}  // namespace detail

// Factorization through the finished construction, built by the per-stage
// corrective recipe and cross-checked against an independent global solve.
inline ChainMap lift_through_bounded_precover(const BoundedPrecover& pc, const ChainMap& beta,
                                              Trace* tr = nullptr) {
  if (beta.target() != pc.stages.back().phi.target())
    throw MismatchError("lift target is not the covered complex");
  ChainMap theta = [&] {
    try {
      return detail::lift_precover_stage(pc, pc.stages.size() - 1, beta, tr);
    } catch (const NoLiftError&) {
      // Inside the safe window the stage recipe cannot fail when a
      // factorization exists at all; a disagreement there is a real defect.
      if (beta.source().hi() <= pc.safe_hi && lift_chain_map_along(pc.phi(), beta))
        throw CheckError("stage recipe failed inside the safe window");
      throw;
    }
  }();
  if (pc.phi().compose(theta) != beta)
    throw CheckError("stage recipe produced a non-factorization");
  if (!lift_chain_map_along(pc.phi(), beta))
    throw CheckError("global solve disagrees: no factorization exists");
  return theta;
}

inline BoundedPrecover bounded_precover(const Complex& x, const ApproxClass& cls, int depth) {
  if (!same_algebra(x.algebra(), cls.algebra()))
    throw MismatchError("complex and class over different algebras");
  if (depth < 0) throw ValueError("depth must be nonnegative");
  BoundedPrecover out{cls, x, depth, 0, -1, {}, {}, {}};
  if (x.is_zero()) {
    Complex z = Complex::zero_complex(x.algebra());
    out.safe_lo = 0;
    out.safe_hi = depth - 1;
    out.stages.push_back({0, resolvent(cls, Module::zero(x.algebra()), 0), z,
                          ChainMap::zero(z, z), z, ChainMap::zero(z, x),
                          ChainMap::zero(z, z)});
    out.kernels.push_back(z);
    out.trace.finalize();
    return out;
  }
  int lo = x.lo(), hi = x.hi();
  if (depth < hi - lo)
    throw WindowError("depth " + std::to_string(depth) + " below the support length " +
                      std::to_string(hi - lo));
  out.safe_lo = lo;
  out.safe_hi = lo + depth - 1;

  for (int k = lo; k <= hi; ++k) {
    Complex xk = truncate_above(x, k);
    if (k == lo) {
      Resolvent res = resolvent(cls, x.term(lo), depth);
      Complex d = splice_resolvent(res, lo);
      std::map<int, Mat> pm;
      if (!res.augmentation().mat().is_zero()) pm.emplace(lo, res.augmentation().mat());
      ChainMap phi = ChainMap::create(d, xk, std::move(pm));
      out.trace.step("t0", 0, lo, res.augmentation().mat(), "base augmentation");
      Complex z = Complex::zero_complex(x.algebra());
      out.stages.push_back({lo, std::move(res), d, ChainMap::zero(z, z), d, std::move(phi),
                            ChainMap::zero(z, d)});
    } else {
      const PrecoverStage& prev = out.stages.back();
      int stage_no = static_cast<int>(out.stages.size());
      Resolvent res = resolvent(cls, x.term(k), lo + depth - k);
      Complex spliced = splice_resolvent(res, k - 1);
      // sigma = d_k ∘ t0 into X(k-1), concentrated in degree k-1.
      std::map<int, Mat> sm;
      Mat sig = x.diff(k).mat() * res.augmentation().mat();
      if (sig.rows() > 0 && !sig.is_zero()) sm.emplace(k - 1, sig);
      ChainMap sigma = ChainMap::create(spliced, prev.phi.target(), std::move(sm));
      ChainMap nu = detail::lift_precover_stage(out, out.stages.size() - 1, sigma, &out.trace);
      if (prev.phi.compose(nu) != sigma)
        throw CheckError("nu does not lift sigma through the previous stage");
      if (!lift_chain_map_along(prev.phi, sigma))
        throw CheckError("global solve cannot reproduce the nu lift");
      for (int m = spliced.lo(); m <= spliced.hi(); ++m)
        out.trace.step("nu", stage_no, m, nu.component(m));
      ConeUp cone = cone_source_up(nu);
      std::map<int, Mat> pm;
      for (int m = lo; m < k; ++m) {
        if (x.term(m).dim() == 0) continue;
        Mat c = Mat::hstack(prev.phi.component(m),
                            Mat(x.field(), x.term(m).dim(), spliced.term(m - 1).dim()));
        if (!c.is_zero()) pm.emplace(m, std::move(c));
      }
      if (x.term(k).dim() > 0) {
        Mat c = Mat::hstack(Mat(x.field(), x.term(k).dim(), prev.d.term(k).dim()),
                            res.augmentation().mat());
        if (!c.is_zero()) pm.emplace(k, std::move(c));
        out.trace.step("t0", stage_no, k, res.augmentation().mat(), "splice column (0, t0)");
      }
      ChainMap phi = ChainMap::create(cone.cone, xk, std::move(pm));
      out.stages.push_back({k, std::move(res), std::move(spliced), std::move(nu), cone.cone,
                            std::move(phi), cone.include_target});
    }

    // L^k = Ker(phi), with the splice-degree shape D(k-1)_k ⊕ Ker t0 and
    // certified Hom(G, L^k) exactness inside the safe window.
    const PrecoverStage& st = out.stages.back();
    SubcomplexResult lk = kernel_complex(st.phi);
    if (k > lo) {
      int expect = out.stages[out.stages.size() - 2].d.term(k).dim() +
                   st.res.kernels[0].dim();
      if (lk.sub.term(k).dim() != expect)
        throw CheckError("kernel at the splice degree is not D_prev ⊕ Ker t0");
    }
    for (const Module& g : cls.generators())
      for (int m = std::max(lk.sub.lo(), lo); m <= std::min(lk.sub.hi(), out.safe_hi); ++m)
        if (!hom_post_exact_at(g, lk.sub, m))
          throw CheckError("Hom(G, L) fails exactness at degree " + std::to_string(m));
    out.kernels.push_back(lk.sub);
  }
  if (!is_class_complex(cls, out.d()).ok)
    throw CheckError("constructed approximation leaves the class");
  out.trace.finalize();
  return out;
}

/******** Bounded preenvelope by cone induction ********/

// Mirror of the precover induction: coresolvents spliced above the cone,
// descending splice degrees, and the cone flavour that keeps the extension
// target below. Implemented directly, not by dualizing the precover code, so
// the two sides can certify each other through the duality functor.
struct EnvelopeStage {
  int degree;            // splice degree k
  Coresolvent cores;     // coresolvent of x_k
  Complex spliced;       // cores spliced at k+1 (at k for the base stage)
  ChainMap nu;           // previous d -> spliced; zero for the base
  Complex d;             // D(k), terms in the class, bottom degree hi - depth
  ChainMap phi;          // X(k) -> D(k)
  ChainMap project_prev; // D(k) -> D(k+1) quotient projection
};

struct BoundedPreenvelope {
  ApproxClass cls;
  Complex x;
  int depth = 0;
  int safe_lo = 0;
  int safe_hi = -1;
  std::vector<EnvelopeStage> stages;  // base stage first
  std::vector<Complex> cokernels;     // L^k = Coker(X(k) -> D(k)) per stage
  Trace trace;

  const Complex& d() const { return stages.back().d; }
  const ChainMap& phi() const { return stages.back().phi; }
};

namespace detail {

// Solves s ∘ d_source = w; feasibility is Hom(L, -) exactness inside the
// safe window.
inline ModuleMorphism corrective_coterm(const ModuleMorphism& diff, const ModuleMorphism& w,
                                        int degree) {
  auto s = extend_along(diff, w);
  if (!s)
    throw NoLiftError("corrective term at degree " + std::to_string(degree) +
                      " does not exist; the test leaves the safe window");
  return *s;
}

// Extends a map killing Im t^j across the coresolvent stage preenvelope
// C^j -> E^{j+1}.
inline ModuleMorphism cokernel_stage_extend(const Coresolvent& cores, size_t j,
                                            const ModuleMorphism& w, int degree) {
  ModuleMorphism from_coker = factor_through_surjection(cores.cokernel_projections[j], w);
  if (j >= cores.stage_data.size()) {
    if (!from_coker.mat().is_zero())
      throw NoLiftError("coresolvent depth exhausted at degree " + std::to_string(degree));
    return ModuleMorphism::zero(cores.terms.back(), w.target());
  }
  auto r = extend_along(cores.stage_data[j].map, from_coker);
  if (!r)
    throw NoLiftError("cokernel stage extension failed at degree " + std::to_string(degree) +
                      "; target is not in the class");
  return *r;
}

// The literal stage recipe on the envelope side: extend beta: X(k) -> A
// across phi(k), one corrective term per degree, descending.
inline ChainMap extend_envelope_stage(const BoundedPreenvelope& pc, size_t si,
                                      const ChainMap& beta, Trace* tr) {
  const EnvelopeStage& st = pc.stages[si];
  const Complex& a = beta.target();
  if (a.is_zero()) return ChainMap::zero(st.d, a);
  if (st.d.is_zero()) {
    if (!beta.is_zero())
      throw NoLiftError("approximation is the zero complex but the test map is not");
    return ChainMap::zero(st.d, a);
  }
  Field f = a.field();
  int k = st.degree;
  int stage_no = static_cast<int>(si);
  std::map<int, Mat> comps;

  // Degrees > k: recurse into the previous stage and project along the cone.
  // The restricted test map is a chain map only into the truncated target;
  // the square this cuts at degree k+1 is restored by the corrective term.
  if (si > 0) {
    const Complex& x_next = pc.stages[si - 1].phi.source();
    Complex a_next = truncate_below(a, k + 1);
    std::map<int, Mat> gm;
    for (int m = x_next.lo(); m <= x_next.hi(); ++m) {
      Mat c = beta.component(m);
      if (c.rows() > 0 && c.cols() > 0 && !c.is_zero()) gm.emplace(m, std::move(c));
    }
    ChainMap gamma = ChainMap::create(x_next, a_next, std::move(gm));
    ChainMap projected = extend_envelope_stage(pc, si - 1, gamma, tr).compose(st.project_prev);
    for (int m = std::max(k + 1, projected.source().lo()); m <= projected.source().hi(); ++m) {
      Mat c = projected.component(m);
      if (c.rows() > 0 && c.cols() > 0 && !c.is_zero()) comps.emplace(m, std::move(c));
    }
  }

  const Coresolvent& cores = st.cores;
  const bool base = si == 0;
  const Complex* dprev = base ? nullptr : &pc.stages[si - 1].d;

  // Degree k: theta_k = (s, r) with r t0 = beta_k and s d = d theta' - r nu.
  ModuleMorphism beta_k = beta.component_morphism(k);
  auto r = extend_along(cores.augmentation(), beta_k);
  if (!r)
    throw NoLiftError("degree " + std::to_string(k) +
                      ": no extension across the class preenvelope of this term");
  if (tr) tr->step("r", stage_no, k, r->mat());
  ModuleMorphism theta_k = *r;
  if (!base) {
    ModuleMorphism next_part =
        ModuleMorphism::create(dprev->term(k + 1), a.term(k),
                               comps.count(k + 1)
                                   ? a.diff(k + 1).mat() *
                                         Mat(comps.at(k + 1)).block(0, 0, a.term(k + 1).dim(),
                                                                    dprev->term(k + 1).dim())
                                   : Mat(f, a.term(k).dim(), dprev->term(k + 1).dim()));
    ModuleMorphism w = next_part + (-r->compose(st.nu.component_morphism(k + 1)));
    ModuleMorphism s = corrective_coterm(dprev->diff(k + 1), w, k);
    if (tr) tr->step("s", stage_no, k, s.mat());
    theta_k = ModuleMorphism::create(st.d.term(k), a.term(k),
                                     Mat::hstack(s.mat(), r->mat()));
  }
  if (theta_k.mat().rows() > 0 && theta_k.mat().cols() > 0 && !theta_k.mat().is_zero())
    comps.emplace(k, theta_k.mat());

  // Degree k-1: theta_{k-1} = (s1, -r1) with r1 t1 = d r and
  // s1 d = d s + r1 nu (the starred corrective identity, mirrored).
  if (a.term(k - 1).dim() > 0) {
    ModuleMorphism w_e = a.diff(k).compose(*r);
    ModuleMorphism r1 = cokernel_stage_extend(cores, 0, w_e, k - 1);
    if (tr) tr->step("r1", stage_no, k - 1, r1.mat());
    ModuleMorphism theta_k1 = r1;
    if (!base) {
      Mat s_mat = theta_k.mat().block(0, 0, a.term(k).dim(), dprev->term(k).dim());
      ModuleMorphism s_mor = ModuleMorphism::create(dprev->term(k), a.term(k), s_mat);
      ModuleMorphism w1 = a.diff(k).compose(s_mor) + r1.compose(st.nu.component_morphism(k));
      ModuleMorphism s1 = corrective_coterm(dprev->diff(k), w1, k - 1);
      if (tr) tr->step("s1", stage_no, k - 1, s1.mat());
      theta_k1 = ModuleMorphism::create(st.d.term(k - 1), a.term(k - 1),
                                        Mat::hstack(s1.mat(), -r1.mat()));
    }
    if (!theta_k1.mat().is_zero()) comps.emplace(k - 1, theta_k1.mat());
  }

  // Degrees <= k-2: one canonical corrective solve per degree, descending.
  for (int m = k - 2; m >= a.lo(); --m) {
    if (a.term(m).dim() == 0) continue;
    Mat next = comps.count(m + 1) ? comps.at(m + 1)
                                  : Mat(f, a.term(m + 1).dim(), st.d.term(m + 1).dim());
    ModuleMorphism w = ModuleMorphism::create(st.d.term(m + 1), a.term(m),
                                              a.diff(m + 1).mat() * next);
    ModuleMorphism theta_m = corrective_coterm(st.d.diff(m + 1), w, m);
    if (tr) tr->step("theta", stage_no, m, theta_m.mat());
    if (!theta_m.mat().is_zero()) comps.emplace(m, theta_m.mat());
  }

  return ChainMap::create(st.d, a, std::move(comps));
}

}  // namespace detail

// Factorization across the finished construction, mirrored from the precover
// side and cross-checked against an independent global solve.
inline ChainMap extend_through_bounded_preenvelope(const BoundedPreenvelope& pc,
                                                   const ChainMap& beta, Trace* tr = nullptr) {
  if (beta.source() != pc.stages.back().phi.source())
    throw MismatchError("extension source is not the enveloped complex");
  ChainMap theta = [&] {
    try {
      return detail::extend_envelope_stage(pc, pc.stages.size() - 1, beta, tr);
    } catch (const NoLiftError&) {
      if (beta.target().lo() >= pc.safe_lo && extend_chain_map_along(pc.phi(), beta))
        throw CheckError("stage recipe failed inside the safe window");
      throw;
    }
  }();
  if (theta.compose(pc.phi()) != beta)
    throw CheckError("stage recipe produced a non-factorization");
  if (!extend_chain_map_along(pc.phi(), beta))
    throw CheckError("global solve disagrees: no factorization exists");
  return theta;
}

inline BoundedPreenvelope bounded_preenvelope(const Complex& x, const ApproxClass& cls,
                                              int depth) {
  if (!same_algebra(x.algebra(), cls.algebra()))
    throw MismatchError("complex and class over different algebras");
  if (depth < 0) throw ValueError("depth must be nonnegative");
  BoundedPreenvelope out{cls, x, depth, 0, -1, {}, {}, {}};
  if (x.is_zero()) {
    Complex z = Complex::zero_complex(x.algebra());
    out.safe_lo = 1 - depth;
    out.safe_hi = 0;
    out.stages.push_back({0, coresolvent(cls, Module::zero(x.algebra()), 0), z,
                          ChainMap::zero(z, z), z, ChainMap::zero(x, z),
                          ChainMap::zero(z, z)});
    out.cokernels.push_back(z);
    out.trace.finalize();
    return out;
  }
  int lo = x.lo(), hi = x.hi();
  if (depth < hi - lo)
    throw WindowError("depth " + std::to_string(depth) + " below the support length " +
                      std::to_string(hi - lo));
  out.safe_lo = hi - depth + 1;
  out.safe_hi = hi;

  for (int k = hi; k >= lo; --k) {
    Complex xk = truncate_below(x, k);
    if (k == hi) {
      Coresolvent cores = coresolvent(cls, x.term(hi), depth);
      Complex d = splice_coresolvent(cores, hi);
      std::map<int, Mat> pm;
      if (!cores.augmentation().mat().is_zero()) pm.emplace(hi, cores.augmentation().mat());
      ChainMap phi = ChainMap::create(xk, d, std::move(pm));
      out.trace.step("t0", 0, hi, cores.augmentation().mat(), "base coaugmentation");
      Complex z = Complex::zero_complex(x.algebra());
      out.stages.push_back({hi, std::move(cores), d, ChainMap::zero(z, z), d, std::move(phi),
                            ChainMap::zero(d, z)});
    } else {
      const EnvelopeStage& prev = out.stages.back();
      int stage_no = static_cast<int>(out.stages.size());
      Coresolvent cores = coresolvent(cls, x.term(k), depth - (hi - k));
      Complex spliced = splice_coresolvent(cores, k + 1);
      // sigma = t0 ∘ d_{k+1} out of X(k+1), concentrated in degree k+1.
      std::map<int, Mat> sm;
      Mat sig = cores.augmentation().mat() * x.diff(k + 1).mat();
      if (sig.cols() > 0 && !sig.is_zero()) sm.emplace(k + 1, sig);
      ChainMap sigma = ChainMap::create(prev.phi.source(), spliced, std::move(sm));
      ChainMap nu = detail::extend_envelope_stage(out, out.stages.size() - 1, sigma, &out.trace);
      if (nu.compose(prev.phi) != sigma)
        throw CheckError("nu does not extend sigma across the previous stage");
      if (!extend_chain_map_along(prev.phi, sigma))
        throw CheckError("global solve cannot reproduce the nu extension");
      for (int m = spliced.lo(); m <= spliced.hi(); ++m)
        out.trace.step("nu", stage_no, m, nu.component(m));
      ConeDown cone = cone_target_down(nu);
      std::map<int, Mat> pm;
      for (int m = hi; m > k; --m) {
        if (x.term(m).dim() == 0) continue;
        Mat c = Mat::vstack(prev.phi.component(m),
                            Mat(x.field(), spliced.term(m + 1).dim(), x.term(m).dim()));
        if (!c.is_zero()) pm.emplace(m, std::move(c));
      }
      if (x.term(k).dim() > 0) {
        Mat c = Mat::vstack(Mat(x.field(), prev.d.term(k).dim(), x.term(k).dim()),
                            cores.augmentation().mat());
        if (!c.is_zero()) pm.emplace(k, std::move(c));
        out.trace.step("t0", stage_no, k, cores.augmentation().mat(), "splice row (0, t0)");
      }
      ChainMap phi = ChainMap::create(xk, cone.cone, std::move(pm));
      out.stages.push_back({k, std::move(cores), std::move(spliced), std::move(nu), cone.cone,
                            std::move(phi), cone.project_source});
    }

    // L^k = Coker(phi), with the splice-degree shape D(k+1)_k ⊕ Coker t0 and
    // certified Hom(L^k, G) exactness inside the safe window.
    const EnvelopeStage& st = out.stages.back();
    QuotientComplexResult lk = cokernel_complex(st.phi);
    if (k < hi) {
      int expect = out.stages[out.stages.size() - 2].d.term(k).dim() +
                   st.cores.cokernels[0].dim();
      if (lk.quotient.term(k).dim() != expect)
        throw CheckError("cokernel at the splice degree is not D_prev ⊕ Coker t0");
    }
    for (const Module& g : cls.generators())
      for (int m = std::max(lk.quotient.lo(), out.safe_lo);
           m <= std::min(lk.quotient.hi(), hi); ++m)
        if (!hom_pre_exact_at(g, lk.quotient, m))
          throw CheckError("Hom(L, G) fails exactness at degree " + std::to_string(m));
    out.cokernels.push_back(lk.quotient);
  }
  if (!is_class_complex(cls, out.d()).ok)
    throw CheckError("constructed approximation leaves the class");
  out.trace.finalize();
  return out;
}

}  // namespace homx
