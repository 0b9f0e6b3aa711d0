#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homx/construct.hpp"

namespace homx {

/******** Colimit tower: precovers of rising truncations ********/

// Stage n approximates x restricted to degrees <= lo+n. Finite support makes
// the tower stabilize: from stage hi-lo on, every stage is byte-identical,
// and the recorded colimit is that stabilized stage.
struct BoundedAbovePrecover {
  ApproxClass cls;
  Complex x;
  int depth = 0;
  int tower_len = 0;
  int stabilization_stage = 0;
  std::vector<BoundedPrecover> tower;  // stages 0..tower_len
  std::vector<ChainMap> into_next;     // colimit injection D(n) -> D(n+1)
  Trace trace;

  const BoundedPrecover& colimit() const { return tower.back(); }
  const Complex& d() const { return tower.back().d(); }
  const ChainMap& phi() const { return tower.back().phi(); }
};

namespace detail {

// Truncation maps: identity components on the shared window. The lower
// truncation is a subcomplex inclusion, the upper one a quotient projection.
inline ChainMap truncation_inclusion(const Complex& sub, const Complex& whole) {
  std::map<int, Mat> comps;
  for (int m = sub.lo(); m <= sub.hi(); ++m)
    if (sub.term(m).dim() > 0) comps.emplace(m, Mat::identity(sub.field(), sub.term(m).dim()));
  return ChainMap::create(sub, whole, std::move(comps));
}

inline ChainMap truncation_projection(const Complex& whole, const Complex& quot) {
  std::map<int, Mat> comps;
  for (int m = quot.lo(); m <= quot.hi(); ++m)
    if (quot.term(m).dim() > 0) comps.emplace(m, Mat::identity(quot.field(), quot.term(m).dim()));
  return ChainMap::create(whole, quot, std::move(comps));
}

}  // namespace detail

inline BoundedAbovePrecover bounded_above_precover(const Complex& x, const ApproxClass& cls,
                                                   int depth, int tower_len) {
  if (!same_algebra(x.algebra(), cls.algebra()))
    throw MismatchError("complex and class over different algebras");
  if (depth < 0 || tower_len < 0) throw ValueError("depth and tower length must be nonnegative");
  int n0 = x.is_zero() ? 0 : x.hi() - x.lo();
  if (tower_len < n0 + 1)
    throw NonStabilizedError("tower length " + std::to_string(tower_len) +
                             " cannot witness stabilization at stage " + std::to_string(n0));
  if (!x.is_zero() && depth < n0)
    throw WindowError("depth " + std::to_string(depth) + " below the support length " +
                      std::to_string(n0));
  BoundedAbovePrecover out{cls, x, depth, tower_len, n0, {}, {}, {}};
  for (int n = 0; n <= tower_len; ++n) {
    Complex xn = truncate_above(x, x.lo() + n);
    out.tower.push_back(bounded_precover(xn, cls, depth));
    out.trace.step("D", n, xn.is_zero() ? 0 : xn.hi(),
                   Mat(x.field(), out.tower.back().d().total_dim(), 0), "tower stage");
  }
  for (int n = n0; n < tower_len; ++n)
    if (out.tower[static_cast<size_t>(n)].d() != out.tower[static_cast<size_t>(n + 1)].d() ||
        out.tower[static_cast<size_t>(n)].phi() != out.tower[static_cast<size_t>(n + 1)].phi())
      throw CheckError("tower failed to stabilize at stage " + std::to_string(n0));

  for (int n = 0; n < tower_len; ++n) {
    const BoundedPrecover& cur = out.tower[static_cast<size_t>(n)];
    const BoundedPrecover& next = out.tower[static_cast<size_t>(n + 1)];
    ChainMap inc = [&] {
      if (next.x == cur.x) return ChainMap::identity(cur.d());
      const ChainMap& cone_inc = next.stages.back().include_prev;
      if (cone_inc.source() != cur.d() || cone_inc.target() != next.d())
        throw CheckError("consecutive tower stages do not nest");
      return cone_inc;
    }();
    // Reconciliation: the injection commutes with both approximations, and
    // the same factorization is recovered by the corrective-term recipe.
    ChainMap xinc = next.x == cur.x ? ChainMap::identity(cur.x)
                                    : detail::truncation_inclusion(cur.x, next.x);
    ChainMap beta = xinc.compose(cur.phi());
    if (next.phi().compose(inc) != beta)
      throw CheckError("colimit injection does not commute with the approximations");
    ChainMap alpha = [&] {
      try {
        return lift_through_bounded_precover(next, beta, &out.trace);
      } catch (const NoLiftError&) {
        // The recipe may dead-end at the shared top degree, one step past the
        // safe window; the structural injection witnesses a global solution.
        auto g = lift_chain_map_along(next.phi(), beta);
        if (!g) throw CheckError("colimit injection exists but no lift was found");
        out.trace.step("alpha", n, cur.d().hi(), Mat(x.field(), 0, 0),
                       "global solve at the truncation edge");
        return *g;
      }
    }();
    if (next.phi().compose(alpha) != beta)
      throw CheckError("tower reconciliation produced a non-factorization");
    out.into_next.push_back(std::move(inc));
  }
  out.trace.finalize();
  return out;
}

/******** Limit tower: precovers of falling truncations ********/

// One surjectivity probe: the rank of post-composition with the induced
// kernel map, against the full dimension of the target chain-map space.
struct WakamatsuEntry {
  int stage = 0;       // tests the induced map between stages n+1 and n
  std::string test;    // generator-built test complex
  int hom_next = 0;    // dim of the domain chain-map space
  int hom_cur = 0;     // dim of the codomain chain-map space
  int image_rank = 0;
  bool epic = false;
};

struct WakamatsuReport {
  bool extension_closed_certified = true;
  std::string warning;  // set when the class carries no extension-closure certificate
  std::vector<WakamatsuEntry> entries;

  bool all_epic() const {
    for (const WakamatsuEntry& e : entries)
      if (!e.epic) return false;
    return true;
  }
};

struct CoverTowerStage {
  Complex y;             // Y^n: x restricted to degrees >= hi-n
  BoundedPrecover pc;    // D^n -> Y^n
  Complex t;             // T^n = Ker(phi^n)
  ChainMap t_inclusion;  // T^n -> D^n
};

struct TowerCoverCandidate {
  ApproxClass cls;
  Complex x;
  int depth = 0;
  int tower_len = 0;
  int stabilization_stage = 0;
  std::vector<CoverTowerStage> stages;  // stages 0..tower_len
  std::vector<ChainMap> pi;             // pi[n]: D^{n+1} -> D^n over the truncation quotient
  std::vector<ChainMap> tau;            // induced kernel map T^{n+1} -> T^n
  WakamatsuReport wakamatsu;
  Trace trace;

  const Complex& d() const { return stages.back().pc.d(); }
  const ChainMap& phi() const { return stages.back().pc.phi(); }
};

namespace detail {

// Generator-built stalks and disks across [lo, hi], the probe family for the
// induced Hom surjectivity checks.
inline std::vector<std::pair<std::string, Complex>> generator_tests(const ApproxClass& cls,
                                                                    int lo, int hi) {
  std::vector<std::pair<std::string, Complex>> out;
  const std::vector<Module>& gens = cls.generators();
  for (size_t gi = 0; gi < gens.size(); ++gi) {
    for (int m = lo; m <= hi; ++m) {
      std::string tag = "G" + std::to_string(gi) + "," + std::to_string(m) + ")";
      out.emplace_back("stalk(" + tag, stalk(gens[gi], m));
      if (m > lo) out.emplace_back("disk(" + tag, disk(gens[gi], m));
    }
  }
  return out;
}

// Rank of { f -> post o f } (or the mirrored precomposition) against the full
// target space, recorded as one report entry per probe complex.
inline void hom_tower_entries(WakamatsuReport& rep, int stage, const ChainMap& induced,
                              const ApproxClass& cls, int lo, int hi, bool post) {
  for (auto& [name, s] : generator_tests(cls, lo, hi)) {
    std::vector<ChainMap> dom = post ? chain_maps_basis(s, induced.source())
                                     : chain_maps_basis(induced.target(), s);
    std::vector<ChainMap> cod = post ? chain_maps_basis(s, induced.target())
                                     : chain_maps_basis(induced.source(), s);
    if (dom.empty() && cod.empty()) continue;
    Mat stacked(s.field(), 0, 0);
    for (size_t i = 0; i < dom.size(); ++i) {
      Mat col = flatten_chain_map(post ? induced.compose(dom[i]) : dom[i].compose(induced));
      stacked = i == 0 ? col : Mat::hstack(stacked, col);
    }
    int r = stacked.cols() == 0 ? 0 : rank(stacked);
    rep.entries.push_back({stage, name, static_cast<int>(dom.size()),
                           static_cast<int>(cod.size()), r,
                           r == static_cast<int>(cod.size())});
  }
}

}  // namespace detail

inline TowerCoverCandidate tower_cover_candidate(const Complex& x, const ApproxClass& cls,
                                                 int depth, int tower_len) {
  if (!same_algebra(x.algebra(), cls.algebra()))
    throw MismatchError("complex and class over different algebras");
  if (depth < 0 || tower_len < 0) throw ValueError("depth and tower length must be nonnegative");
  int n0 = x.is_zero() ? 0 : x.hi() - x.lo();
  if (tower_len < n0 + 1)
    throw NonStabilizedError("tower length " + std::to_string(tower_len) +
                             " cannot witness stabilization at stage " + std::to_string(n0));
  TowerCoverCandidate out{cls, x, depth, tower_len, n0, {}, {}, {}, {}, {}};
  if (!cls.extension_closed_certified()) {
    out.wakamatsu.extension_closed_certified = false;
    out.wakamatsu.warning =
        "class carries no extension-closure certificate; "
        "the surjectivity ranks below are tested, not implied";
  }
  int top = x.is_zero() ? 0 : x.hi() + depth;

  for (int n = 0; n <= tower_len; ++n) {
    Complex y = x.is_zero() ? x : truncate_below(x, x.hi() - n);
    int stage_depth = x.is_zero() ? depth : top - y.lo();
    BoundedPrecover pc = bounded_precover(y, cls, stage_depth);
    SubcomplexResult ker = kernel_complex(pc.phi());
    out.trace.step("T", n, ker.sub.is_zero() ? 0 : ker.sub.lo(),
                   Mat(x.field(), ker.sub.total_dim(), 0), "kernel of the stage approximation");
    out.stages.push_back({std::move(y), std::move(pc), std::move(ker.sub),
                          std::move(ker.inclusion)});
  }
  for (int n = n0; n < tower_len; ++n)
    if (out.stages[static_cast<size_t>(n)].pc.d() != out.stages[static_cast<size_t>(n + 1)].pc.d() ||
        out.stages[static_cast<size_t>(n)].pc.phi() != out.stages[static_cast<size_t>(n + 1)].pc.phi())
      throw CheckError("tower failed to stabilize at stage " + std::to_string(n0));

  for (int n = 0; n < tower_len; ++n) {
    CoverTowerStage& cur = out.stages[static_cast<size_t>(n)];
    CoverTowerStage& next = out.stages[static_cast<size_t>(n + 1)];
    ChainMap q = next.y == cur.y ? ChainMap::identity(cur.y)
                                 : detail::truncation_projection(next.y, cur.y);
    ChainMap beta = q.compose(next.pc.phi());
    ChainMap pi = [&] {
      try {
        return lift_through_bounded_precover(cur.pc, beta, &out.trace);
      } catch (const NoLiftError&) {
        auto g = lift_chain_map_along(cur.pc.phi(), beta);
        if (!g)
          throw NoLiftError("tower map at stage " + std::to_string(n) +
                            " does not lift within this depth");
        out.trace.step("pi", n, next.pc.d().hi(), Mat(x.field(), 0, 0),
                       "global solve at the truncation edge");
        return *g;
      }
    }();
    if (cur.pc.phi().compose(pi) != beta)
      throw CheckError("tower map does not commute with the approximations");
    for (int m = pi.source().lo(); m <= pi.source().hi(); ++m)
      out.trace.step("pi", n, m, pi.component(m));

    // pi restricts to the kernels: phi^n pi iota_{n+1} = q phi^{n+1} iota_{n+1} = 0.
    std::map<int, Mat> tm;
    ChainMap into_d = pi.compose(next.t_inclusion);
    for (int m = next.t.lo(); m <= next.t.hi(); ++m) {
      if (next.t.term(m).dim() == 0 || cur.t.term(m).dim() == 0) continue;
      Mat c = factor_through_injection(cur.t_inclusion.component_morphism(m),
                                       into_d.component_morphism(m))
                  .mat();
      if (!c.is_zero()) tm.emplace(m, std::move(c));
    }
    ChainMap tau = ChainMap::create(next.t, cur.t, std::move(tm));
    if (!cur.t.is_zero())
      detail::hom_tower_entries(out.wakamatsu, n, tau, cls, cur.t.lo(),
                                std::min(cur.t.hi(), top - 1), true);
    out.pi.push_back(std::move(pi));
    out.tau.push_back(std::move(tau));
  }
  out.trace.finalize();
  return out;
}

/******** Limit tower, envelope side ********/

struct EnvelopeTowerStage {
  Complex z;              // Z^n: x restricted to degrees <= lo+n
  BoundedPreenvelope pe;  // Z^n -> D^n
  Complex t;              // T^n = Coker(phi^n)
  ChainMap t_projection;  // D^n -> T^n
};

struct TowerEnvelopeCandidate {
  ApproxClass cls;
  Complex x;
  int depth = 0;
  int tower_len = 0;
  int stabilization_stage = 0;
  std::vector<EnvelopeTowerStage> stages;  // stages 0..tower_len
  std::vector<ChainMap> rho;               // rho[n]: D^n -> D^{n+1} over the inclusion
  std::vector<ChainMap> tau;               // induced cokernel map T^n -> T^{n+1}
  WakamatsuReport wakamatsu;
  Trace trace;

  const Complex& d() const { return stages.back().pe.d(); }
  const ChainMap& phi() const { return stages.back().pe.phi(); }
};

inline TowerEnvelopeCandidate tower_envelope_candidate(const Complex& x, const ApproxClass& cls,
                                                       int depth, int tower_len) {
  if (!same_algebra(x.algebra(), cls.algebra()))
    throw MismatchError("complex and class over different algebras");
  if (depth < 0 || tower_len < 0) throw ValueError("depth and tower length must be nonnegative");
  int n0 = x.is_zero() ? 0 : x.hi() - x.lo();
  if (tower_len < n0 + 1)
    throw NonStabilizedError("tower length " + std::to_string(tower_len) +
                             " cannot witness stabilization at stage " + std::to_string(n0));
  TowerEnvelopeCandidate out{cls, x, depth, tower_len, n0, {}, {}, {}, {}, {}};
  if (!cls.extension_closed_certified()) {
    out.wakamatsu.extension_closed_certified = false;
    out.wakamatsu.warning =
        "class carries no extension-closure certificate; "
        "the surjectivity ranks below are tested, not implied";
  }
  int bottom = x.is_zero() ? 0 : x.lo() - depth;

  for (int n = 0; n <= tower_len; ++n) {
    Complex z = truncate_above(x, x.is_zero() ? 0 : x.lo() + n);
    int stage_depth = x.is_zero() ? depth : z.hi() - bottom;
    BoundedPreenvelope pe = bounded_preenvelope(z, cls, stage_depth);
    QuotientComplexResult coker = cokernel_complex(pe.phi());
    out.trace.step("T", n, coker.quotient.is_zero() ? 0 : coker.quotient.hi(),
                   Mat(x.field(), coker.quotient.total_dim(), 0),
                   "cokernel of the stage approximation");
    out.stages.push_back({std::move(z), std::move(pe), std::move(coker.quotient),
                          std::move(coker.projection)});
  }
  for (int n = n0; n < tower_len; ++n)
    if (out.stages[static_cast<size_t>(n)].pe.d() != out.stages[static_cast<size_t>(n + 1)].pe.d() ||
        out.stages[static_cast<size_t>(n)].pe.phi() != out.stages[static_cast<size_t>(n + 1)].pe.phi())
      throw CheckError("tower failed to stabilize at stage " + std::to_string(n0));

  for (int n = 0; n < tower_len; ++n) {
    EnvelopeTowerStage& cur = out.stages[static_cast<size_t>(n)];
    EnvelopeTowerStage& next = out.stages[static_cast<size_t>(n + 1)];
    ChainMap inc = next.z == cur.z ? ChainMap::identity(cur.z)
                                   : detail::truncation_inclusion(cur.z, next.z);
    ChainMap beta = next.pe.phi().compose(inc);
    ChainMap rho = [&] {
      try {
        return extend_through_bounded_preenvelope(cur.pe, beta, &out.trace);
      } catch (const NoLiftError&) {
        auto g = extend_chain_map_along(cur.pe.phi(), beta);
        if (!g)
          throw NoLiftError("tower map at stage " + std::to_string(n) +
                            " does not extend within this depth");
        out.trace.step("rho", n, next.pe.d().lo(), Mat(x.field(), 0, 0),
                       "global solve at the truncation edge");
        return *g;
      }
    }();
    if (rho.compose(cur.pe.phi()) != beta)
      throw CheckError("tower map does not commute with the approximations");
    for (int m = rho.source().lo(); m <= rho.source().hi(); ++m)
      out.trace.step("rho", n, m, rho.component(m));

    // rho descends to the cokernels: proj^{n+1} rho phi^n = proj^{n+1} phi^{n+1} inc = 0.
    std::map<int, Mat> tm;
    ChainMap from_d = next.t_projection.compose(rho);
    for (int m = cur.t.lo(); m <= cur.t.hi(); ++m) {
      if (cur.t.term(m).dim() == 0 || next.t.term(m).dim() == 0) continue;
      Mat c = factor_through_surjection(cur.t_projection.component_morphism(m),
                                        from_d.component_morphism(m))
                  .mat();
      if (!c.is_zero()) tm.emplace(m, std::move(c));
    }
    ChainMap tau = ChainMap::create(cur.t, next.t, std::move(tm));
    if (!cur.t.is_zero())
      detail::hom_tower_entries(out.wakamatsu, n, tau, cls,
                                std::max(cur.t.lo(), bottom + 1), cur.t.hi(), false);
    out.rho.push_back(std::move(rho));
    out.tau.push_back(std::move(tau));
  }
  out.trace.finalize();
  return out;
}

}  // namespace homx
