#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "homx/approx.hpp"
#include "homx/complex.hpp"
#include "homx/rng.hpp"

namespace homx {

/******** Reports ********/

enum class Property { Precover, Cover, Preenvelope, Envelope };

inline const char* property_name(Property p) {
  switch (p) {
    case Property::Precover: return "precover";
    case Property::Cover: return "cover";
    case Property::Preenvelope: return "preenvelope";
    case Property::Envelope: return "envelope";
  }
  return "?";
}

// A named test complex; verdicts are always relative to an explicit family.
struct TestComplex {
  std::string name;
  Complex c;
};

// Factorization checks: hom_dim counts the maps to cover, image_rank what the
// approximation reaches; a failing test stores a concrete map with no
// factorization. Automorphism checks: hom_dim is the affine dimension of the
// solution set, image_rank the number of points examined, and a failure
// stores a non-invertible comparison map.
struct TestOutcome {
  std::string test;
  bool pass = false;
  int hom_dim = 0;
  int image_rank = 0;
  std::optional<ChainMap> witness;
  std::optional<ChainMap> counterexample;
};

struct VerificationReport {
  std::string subject;
  Property property = Property::Precover;
  std::string family;
  bool exhaustive = true;
  int affine_dim = 0;         // automorphism checks only
  long long affine_points = 0;  // exact when exhaustive, else 0
  int sample_size = 0;          // sampled verdicts only
  uint64_t seed = 0;
  std::vector<TestOutcome> outcomes;

  bool pass() const {
    for (const TestOutcome& o : outcomes)
      if (!o.pass) return false;
    return true;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "property: " << property_name(property) << "\n";
    out << "subject: " << subject << "\n";
    out << "family: " << family << "\n";
    out << "mode: " << (exhaustive ? "exhaustive" : "sampled");
    if (!exhaustive) out << " (" << sample_size << " points, seed " << seed << ")";
    out << "\n";
    for (const TestOutcome& o : outcomes) {
      out << "  " << (o.pass ? "pass" : "FAIL") << "  " << o.test << "  dim " << o.hom_dim
          << "  reached " << o.image_rank;
      if (o.counterexample) out << "  (counterexample recorded)";
      out << "\n";
    }
    out << "verdict: " << (pass() ? "pass" : "FAIL") << "\n";
    return out.str();
  }
};

namespace detail {

inline std::string complex_text(const Complex& c) {
  if (c.is_zero()) return "0";
  std::string s = "[" + std::to_string(c.lo()) + ".." + std::to_string(c.hi()) + ":";
  for (int n = c.lo(); n <= c.hi(); ++n)
    s += (n == c.lo() ? "" : ",") + std::to_string(c.term(n).dim());
  return s + "]";
}

inline std::string map_subject(const ChainMap& phi) {
  return complex_text(phi.source()) + " -> " + complex_text(phi.target()) + " over F" +
         std::to_string(phi.source().field().p);
}

// Shared body of the two factorization checks. post = true tests
// postcomposition Hom(A, D) -> Hom(A, X) (precover); post = false tests
// precomposition Hom(E, A) -> Hom(X, A) (preenvelope).
inline VerificationReport factorization_report(const ChainMap& phi,
                                               const std::vector<TestComplex>& tests,
                                               const ApproxClass& cls, bool post) {
  VerificationReport rep;
  rep.subject = map_subject(phi);
  rep.property = post ? Property::Precover : Property::Preenvelope;
  rep.family = std::to_string(tests.size()) + " test complexes in " + cls.name();
  for (const TestComplex& t : tests) {
    ClassComplexCheck chk = is_class_complex(cls, t.c);
    if (!chk.ok)
      throw MismatchError("test complex '" + t.name + "' leaves the class at degree " +
                          std::to_string(chk.failing_degree));
    const Complex& reached = post ? phi.target() : phi.source();
    std::vector<ChainMap> want = post ? chain_maps_basis(t.c, reached)
                                      : chain_maps_basis(reached, t.c);
    std::vector<ChainMap> have = post ? chain_maps_basis(t.c, phi.source())
                                      : chain_maps_basis(phi.target(), t.c);
    TestOutcome o;
    o.test = t.name;
    o.hom_dim = static_cast<int>(want.size());
    Mat stacked(phi.source().field(), 0, 0);
    for (size_t i = 0; i < have.size(); ++i) {
      Mat col = flatten_chain_map(post ? phi.compose(have[i]) : have[i].compose(phi));
      stacked = i == 0 ? col : Mat::hstack(stacked, col);
    }
    o.image_rank = stacked.cols() == 0 ? 0 : rank(stacked);
    o.pass = o.image_rank == o.hom_dim;
    if (o.pass) {
      if (!want.empty()) {
        auto w = post ? lift_chain_map_along(phi, want[0]) : extend_chain_map_along(phi, want[0]);
        if (!w) throw CheckError("surjective rank yet a basis map fails to factor");
        o.witness = *w;
      }
    } else {
      // A rank deficit forces some basis map outside the image.
      for (const ChainMap& beta : want) {
        auto w = post ? lift_chain_map_along(phi, beta) : extend_chain_map_along(phi, beta);
        if (!w) {
          o.counterexample = beta;
          break;
        }
      }
      if (!o.counterexample) throw CheckError("deficient rank yet every basis map factors");
    }
    rep.outcomes.push_back(std::move(o));
  }
  return rep;
}

// Shared body of the two automorphism checks: the affine set of comparison
// endomorphisms fixing phi, examined for invertibility point by point. post =
// true solves phi.theta = phi on the source; post = false solves
// g.phi = phi on the target.
inline VerificationReport automorphism_report(const ChainMap& phi, long long budget,
                                              uint64_t seed, bool post) {
  if (budget < 1) throw ValueError("automorphism check needs a positive budget");
  const Complex& e = post ? phi.source() : phi.target();
  const Complex& other = post ? phi.target() : phi.source();
  Field f = e.field();
  VerificationReport rep;
  rep.subject = map_subject(phi);
  rep.property = post ? Property::Cover : Property::Envelope;
  rep.family = post ? "endomorphisms theta of the approximation with phi.theta = phi"
                    : "endomorphisms g of the approximation with g.phi = phi";
  rep.seed = seed;

  ChainMapSolver solver(e, e);
  int lo = std::min(e.lo(), other.lo()), hi = std::max(e.hi(), other.hi());
  for (int n = lo; n <= hi; ++n) {
    std::vector<MatSystem::Term> terms;
    if (solver.has_block(n)) {
      if (post)
        terms.push_back({solver.block(n), phi.component(n), Mat::identity(f, e.term(n).dim())});
      else
        terms.push_back({solver.block(n), Mat::identity(f, e.term(n).dim()), phi.component(n)});
    }
    Mat rhs = phi.component(n);
    if (terms.empty() && rhs.is_zero()) continue;
    solver.system().add_equation(terms, rhs);
  }
  auto particular = solver.system().solve_canonical();
  if (!particular) throw CheckError("the identity fixes phi, yet the solver found nothing");
  std::vector<std::vector<Mat>> nullsp = solver.system().kernel();
  int dim = static_cast<int>(nullsp.size());
  rep.affine_dim = dim;

  // p^dim without overflow: the loop saturates strictly past the budget.
  long long points = 1;
  bool within = true;
  for (int i = 0; i < dim && within; ++i) {
    if (points > budget / static_cast<long long>(f.p)) within = false;
    else points *= static_cast<long long>(f.p);
  }
  if (points > budget) within = false;
  rep.exhaustive = within;
  rep.affine_points = within ? points : 0;

  auto make = [&](const std::vector<uint32_t>& coef) {
    std::vector<Mat> sol = *particular;
    for (int i = 0; i < dim; ++i) {
      if (coef[i] == 0) continue;
      for (size_t b = 0; b < sol.size(); ++b)
        sol[b] = sol[b] + nullsp[static_cast<size_t>(i)][b].scaled(coef[i]);
    }
    return solver.assemble(sol);
  };

  TestOutcome o;
  o.test = post ? "every theta with phi.theta = phi is invertible"
                : "every g with g.phi = phi is invertible";
  o.hom_dim = dim;
  o.pass = true;
  long long checked = 0;
  if (within) {
    std::vector<uint32_t> coef(static_cast<size_t>(dim), 0);
    for (;;) {
      ChainMap theta = make(coef);
      ++checked;
      if (!theta.is_degreewise_iso()) {
        o.pass = false;
        o.counterexample = theta;
        break;
      }
      int i = 0;
      while (i < dim && ++coef[static_cast<size_t>(i)] == f.p) coef[static_cast<size_t>(i++)] = 0;
      if (i == dim) break;
    }
  } else {
    rep.sample_size = 1000;
    Rng rng(seed);
    std::vector<uint32_t> coef(static_cast<size_t>(dim), 0);
    for (int s = 0; s < rep.sample_size; ++s) {
      for (int i = 0; i < dim; ++i) coef[static_cast<size_t>(i)] = rng.below(f.p);
      ChainMap theta = make(coef);
      ++checked;
      if (!theta.is_degreewise_iso()) {
        o.pass = false;
        o.counterexample = theta;
        break;
      }
    }
  }
  o.image_rank = static_cast<int>(checked);
  rep.outcomes.push_back(std::move(o));
  return rep;
}

}  // namespace detail

/******** Factorization properties ********/

// Postcomposition by phi must reach every chain map test -> target; exact
// rank per test, with a canonical lift as witness and a concrete unreachable
// map as counterexample.
inline VerificationReport is_precover(const ChainMap& phi, const std::vector<TestComplex>& tests,
                                      const ApproxClass& cls) {
  return detail::factorization_report(phi, tests, cls, true);
}

inline VerificationReport is_preenvelope(const ChainMap& phi,
                                         const std::vector<TestComplex>& tests,
                                         const ApproxClass& cls) {
  return detail::factorization_report(phi, tests, cls, false);
}

/******** Automorphism properties ********/

// The affine set {theta | phi.theta = phi} is enumerated when its cardinality
// fits the budget (a proof for the minimality half of the cover property) and
// sampled otherwise (the report says so).
inline VerificationReport is_cover(const ChainMap& phi, long long budget = 1 << 16,
                                   uint64_t seed = 42) {
  return detail::automorphism_report(phi, budget, seed, true);
}

inline VerificationReport is_envelope(const ChainMap& phi, long long budget = 1 << 16,
                                      uint64_t seed = 42) {
  return detail::automorphism_report(phi, budget, seed, false);
}

/******** Test family generation ********/

// Deterministic family: stalks and disks of the class generators across
// [lo, hi], then seeded random direct sums and mapping cones of maps between
// those. Every output is certified termwise in the class.
inline std::vector<TestComplex> generate_tests(const ApproxClass& cls, int lo, int hi, int count,
                                               uint64_t seed) {
  if (count < 1) throw ValueError("generate_tests needs count >= 1");
  if (lo > hi) throw ValueError("generate_tests window is empty");
  std::vector<TestComplex> out;
  auto push = [&](std::string name, Complex c) {
    ClassComplexCheck chk = is_class_complex(cls, c);
    if (!chk.ok)
      throw CheckError("generated test '" + name + "' leaves the class at degree " +
                       std::to_string(chk.failing_degree));
    out.push_back({std::move(name), std::move(c)});
  };
  const std::vector<Module>& gens = cls.generators();
  if (gens.empty()) throw ValueError("generate_tests needs a class with generators");
  for (size_t gi = 0; gi < gens.size() && static_cast<int>(out.size()) < count; ++gi)
    for (int m = lo; m <= hi && static_cast<int>(out.size()) < count; ++m) {
      std::string tag = "G" + std::to_string(gi) + "," + std::to_string(m) + ")";
      push("stalk(" + tag, stalk(gens[gi], m));
      if (m > lo && static_cast<int>(out.size()) < count) push("disk(" + tag, disk(gens[gi], m));
    }
  // Random sums and cones draw pairs from the generator-built base family.
  uint32_t base = static_cast<uint32_t>(out.size());
  Rng rng(seed);
  for (int extra = 0; static_cast<int>(out.size()) < count; ++extra) {
    const TestComplex& a = out[rng.below(base)];
    const TestComplex& b = out[rng.below(base)];
    if (extra % 2 == 0) {
      push("sum(" + a.name + "+" + b.name + ")", direct_sum_complexes({a.c, b.c}).sum);
    } else {
      std::vector<ChainMap> basis = chain_maps_basis(a.c, b.c);
      std::map<int, Mat> comps;
      for (int n = a.c.lo(); n <= a.c.hi(); ++n) {
        Mat m(a.c.field(), b.c.term(n).dim(), a.c.term(n).dim());
        comps.emplace(n, std::move(m));
      }
      for (const ChainMap& g : basis) {
        uint32_t coef = rng.below(a.c.field().p);
        if (coef == 0) continue;
        for (auto& [n, m] : comps) m = m + g.component(n).scaled(coef);
      }
      ChainMap nu = ChainMap::create(a.c, b.c, std::move(comps));
      push("cone(" + a.name + "->" + b.name + ")", cone_source_up(nu).cone);
    }
  }
  return out;
}

}  // namespace homx
