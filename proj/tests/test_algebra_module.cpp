#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace homx;

namespace {

// Counts A-linear maps m -> n by enumerating every candidate matrix and
// checking commutation with hand-rolled modular arithmetic. Deliberately
// avoids Mat/rref so it cross-checks the library's hom machinery.
long long count_hom_by_enumeration(const Module& m, const Module& n) {
  uint32_t p = m.field().p;
  int rows = n.dim(), cols = m.dim();
  int cells = rows * cols;
  long long total = 1;
  for (int i = 0; i < cells; ++i) total *= p;  // fixture sizes keep this small
  long long hits = 0;
  std::vector<uint32_t> entry(static_cast<size_t>(std::max(cells, 1)), 0);
  for (long long it = 0; it < total; ++it) {
    long long v = it;
    for (int i = 0; i < cells; ++i) {
      entry[static_cast<size_t>(i)] = static_cast<uint32_t>(v % p);
      v /= p;
    }
    bool ok = true;
    for (int b = 0; ok && b < m.algebra()->dim(); ++b) {
      const Mat& am = m.action()[static_cast<size_t>(b)];
      const Mat& an = n.action()[static_cast<size_t>(b)];
      for (int r = 0; ok && r < rows; ++r)
        for (int c = 0; ok && c < cols; ++c) {
          uint32_t lhs = 0, rhs = 0;
          for (int k = 0; k < cols; ++k)
            lhs = (lhs + entry[static_cast<size_t>(r * cols + k)] * am.at(k, c)) % p;
          for (int k = 0; k < rows; ++k)
            rhs = (rhs + an.at(r, k) * entry[static_cast<size_t>(k * cols + c)]) % p;
          if (lhs != rhs) ok = false;
        }
    }
    if (ok) ++hits;
  }
  return hits;
}

long long pow_ll(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void check_hom_against_oracle(const Module& m, const Module& n) {
  auto basis = hom_basis(m, n);
  REQUIRE(count_hom_by_enumeration(m, n) == pow_ll(m.field().p, static_cast<int>(basis.size())));
  // Basis elements are independent: their vectorizations have full rank.
  Mat stacked(m.field(), 0, n.dim() * m.dim());
  for (const auto& f : basis) stacked = Mat::vstack(stacked, f.mat().vec_row());
  REQUIRE(rank(stacked) == static_cast<int>(basis.size()));
}

}  // namespace

TEST_CASE("algebra factories validate their certificates") {
  REQUIRE_NOTHROW(fixtures::dual_numbers(2));
  REQUIRE_NOTHROW(fixtures::dual_numbers(5));
  REQUIRE_NOTHROW(fixtures::arrow_algebra(2));
  REQUIRE_NOTHROW(fixtures::product_field(3));

  // b1*b1 = b0 but b1*b0 = 0 breaks associativity of (b1 b1) b1.
  REQUIRE_THROWS_AS(
      Algebra::create(Field(2), 2, {{{1, 0}, {0, 1}}, {{0, 0}, {1, 0}}}, {1, 0}, {}, {{1, 0}}),
      ValueError);
  // Wrong unit coordinates.
  REQUIRE_THROWS_AS(
      Algebra::create(Field(2), 2, {{{1, 0}, {0, 1}}, {{0, 1}, {0, 0}}}, {0, 1}, {{0, 1}},
                      {{1, 0}}),
      ValueError);
  // {e1} is not an ideal in the arrow algebra (a*e1 = a escapes).
  {
    auto q = fixtures::arrow_algebra();
    std::vector<std::vector<std::vector<long long>>> c(3,
        std::vector<std::vector<long long>>(3, std::vector<long long>(3, 0)));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) c[i][j][k] = q->structure_constant(i, j, k);
    REQUIRE_THROWS_WITH(
        Algebra::create(Field(2), 3, c, {1, 1, 0}, {{1, 0, 0}}, {{1, 0, 0}, {0, 1, 0}}),
        Catch::Matchers::ContainsSubstring("ideal"));
  }
  // The whole algebra is an ideal but not nilpotent.
  REQUIRE_THROWS_WITH(Algebra::create(Field(2), 2, {{{1, 0}, {0, 1}}, {{0, 1}, {0, 0}}}, {1, 0},
                                      {{1, 0}, {0, 1}}, {{1, 0}}),
                      Catch::Matchers::ContainsSubstring("nilpotent"));
  // x is not idempotent.
  REQUIRE_THROWS_WITH(Algebra::create(Field(2), 2, {{{1, 0}, {0, 1}}, {{0, 1}, {0, 0}}}, {1, 0},
                                      {{0, 1}}, {{0, 1}}),
                      Catch::Matchers::ContainsSubstring("e*e=e"));
  // e1 alone does not sum to the unit of F2 x F2.
  REQUIRE_THROWS_WITH(
      Algebra::create(Field(2), 2, {{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}}, {1, 1}, {}, {{1, 0}}),
      Catch::Matchers::ContainsSubstring("sum"));
  // The unit of F2 x F2 is idempotent but not primitive.
  REQUIRE_THROWS_WITH(
      Algebra::create(Field(2), 2, {{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}}, {1, 1}, {}, {{1, 1}}),
      Catch::Matchers::ContainsSubstring("primitive"));
}

TEST_CASE("structure constants, multiplication, and opposite algebra") {
  auto a2 = fixtures::dual_numbers();
  REQUIRE(a2->basis_product(1, 1).is_zero());  // x*x = 0
  Mat u(Field(2), {{1}, {1}});                 // 1 + x
  REQUIRE(a2->mul(u, u) == Mat(Field(2), {{1}, {0}}));  // (1+x)^2 = 1 in char 2

  auto q = fixtures::arrow_algebra();
  REQUIRE(q->structure_constant(0, 2, 2) == 0);  // e1*a = 0
  REQUIRE(q->structure_constant(2, 0, 2) == 1);  // a*e1 = a
  auto qop = q->opposite();
  REQUIRE(qop->structure_constant(0, 2, 2) == 1);  // e1 *op a = a*e1
  REQUIRE(*qop->opposite() == *q);
  REQUIRE(*a2->opposite() == *a2);  // commutative
  REQUIRE(*qop != *q);
}

TEST_CASE("module factories validate the action") {
  auto a2 = fixtures::dual_numbers();
  REQUIRE_NOTHROW(fixtures::simple_k(a2));
  REQUIRE_NOTHROW(fixtures::regular(a2));
  Field f = a2->field();
  // x acting as identity contradicts x*x = 0.
  REQUIRE_THROWS_AS(Module::create(a2, {Mat::identity(f, 1), Mat::identity(f, 1)}), ValueError);
  // Unit must act as identity.
  REQUIRE_THROWS_AS(Module::create(a2, {Mat(f, 1, 1), Mat(f, 1, 1)}), ValueError);
  // One matrix per basis element.
  REQUIRE_THROWS_AS(Module::create(a2, {Mat::identity(f, 1)}), ValueError);

  Module z = Module::zero(a2);
  REQUIRE(z.is_zero());
  REQUIRE(hom_dim(z, fixtures::regular(a2)) == 0);
  REQUIRE(hom_dim(fixtures::regular(a2), z) == 0);
}

TEST_CASE("hom bases match exhaustive enumeration") {
  auto a2 = fixtures::dual_numbers();
  Module reg2 = fixtures::regular(a2);
  Module k = fixtures::simple_k(a2);
  for (const Module* m : {&reg2, &k})
    for (const Module* n : {&reg2, &k}) check_hom_against_oracle(*m, *n);
  REQUIRE(hom_dim(reg2, reg2) == 2);
  REQUIRE(hom_dim(reg2, k) == 1);
  REQUIRE(hom_dim(k, reg2) == 1);
  REQUIRE(hom_dim(k, k) == 1);

  auto q = fixtures::arrow_algebra();
  Module reg3 = fixtures::regular(q);
  Module s1 = fixtures::arrow_simple(q, 1);
  Module s2 = fixtures::arrow_simple(q, 2);
  Module p1 = submodule(reg3, image_basis(q->right_mult_matrix(q->idempotents()[0]))).sub;
  REQUIRE(p1.dim() == 2);
  for (const Module* m : {&reg3, &s1, &s2, &p1})
    for (const Module* n : {&reg3, &s1, &s2, &p1}) check_hom_against_oracle(*m, *n);
  REQUIRE(hom_dim(reg3, reg3) == 3);  // End(A) = A^op
  REQUIRE(hom_dim(p1, s1) == 1);
  REQUIRE(hom_dim(p1, s2) == 0);
  REQUIRE(hom_dim(s2, p1) == 1);  // soc(P1) = S2
  REQUIRE(hom_dim(s1, p1) == 0);
  REQUIRE(hom_dim(s1, s2) == 0);

  auto a3 = fixtures::dual_numbers(3);
  Module reg_3 = fixtures::regular(a3);
  Module k3 = fixtures::simple_k(a3);
  for (const Module* m : {&reg_3, &k3})
    for (const Module* n : {&reg_3, &k3}) check_hom_against_oracle(*m, *n);
}

TEST_CASE("direct sums come with split injections and projections") {
  auto a2 = fixtures::dual_numbers();
  Module reg = fixtures::regular(a2);
  Module k = fixtures::simple_k(a2);
  DirectSum ds = direct_sum({reg, k});
  REQUIRE(ds.sum.dim() == 3);
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) {
      ModuleMorphism comp = ds.projections[i].compose(ds.injections[j]);
      if (i == j)
        REQUIRE(comp.is_iso());
      else
        REQUIRE(comp.is_zero());
    }
  ModuleMorphism sum_id =
      ds.injections[0].compose(ds.projections[0]) + ds.injections[1].compose(ds.projections[1]);
  REQUIRE(sum_id == ModuleMorphism::identity(ds.sum));
  REQUIRE(hom_dim(ds.sum, k) == hom_dim(reg, k) + hom_dim(k, k));

  DirectSum empty = direct_sum({}, a2);
  REQUIRE(empty.sum.is_zero());
  auto q = fixtures::arrow_algebra();
  REQUIRE_THROWS_AS(direct_sum({reg, fixtures::regular(q)}), MismatchError);
}

TEST_CASE("kernels and cokernels satisfy their universal properties") {
  auto a2 = fixtures::dual_numbers();
  Field f = a2->field();
  Module reg = fixtures::regular(a2);
  Module k = fixtures::simple_k(a2);

  QuotientResult t = top(reg);
  REQUIRE(t.quotient == k);
  REQUIRE(t.projection.mat() == Mat(f, {{1, 0}}));
  KernelResult ker = kernel(t.projection);
  REQUIRE(ker.kernel == k);  // soc = rad for the dual numbers
  REQUIRE(ker.inclusion.mat() == Mat(f, {{0}, {1}}));
  REQUIRE(t.projection.compose(ker.inclusion).is_zero());

  // Any map killed by the projection factors through the kernel inclusion.
  ModuleMorphism socle_map = ModuleMorphism::create(k, reg, Mat(f, {{0}, {1}}));
  ModuleMorphism through = factor_through_injection(ker.inclusion, socle_map);
  REQUIRE(through.is_iso());
  REQUIRE(ker.inclusion.compose(through) == socle_map);
  REQUIRE_THROWS_AS(factor_through_injection(ker.inclusion, ModuleMorphism::identity(reg)),
                    NoLiftError);

  CokernelResult cok = cokernel(socle_map);
  REQUIRE(cok.cokernel == k);
  REQUIRE(cok.projection.mat() == Mat(f, {{1, 0}}));
  REQUIRE(cok.projection.compose(socle_map).is_zero());
  ModuleMorphism back = factor_through_surjection(cok.projection, t.projection);
  REQUIRE(back.is_iso());
  REQUIRE(back.compose(cok.projection) == t.projection);
  REQUIRE_THROWS_AS(factor_through_surjection(cok.projection, ModuleMorphism::identity(reg)),
                    NoLiftError);

  // Rank-nullity wiring across a whole hom space.
  auto q = fixtures::arrow_algebra();
  Module reg3 = fixtures::regular(q);
  for (const auto& g : hom_basis(reg3, reg3)) {
    REQUIRE(kernel(g).kernel.dim() + rank(g.mat()) == reg3.dim());
    REQUIRE(cokernel(g).cokernel.dim() == reg3.dim() - rank(g.mat()));
  }

  // Arrow algebra: 0 -> S2 -> P1 -> S1 -> 0.
  Module p1 = submodule(reg3, image_basis(q->right_mult_matrix(q->idempotents()[0]))).sub;
  QuotientResult top_p1 = top(p1);
  REQUIRE(top_p1.quotient == fixtures::arrow_simple(q, 1));
  REQUIRE(kernel(top_p1.projection).kernel == fixtures::arrow_simple(q, 2));
}

TEST_CASE("submodule rejects non-invariant rows") {
  auto a2 = fixtures::dual_numbers();
  Module reg = fixtures::regular(a2);
  REQUIRE_THROWS_AS(submodule(reg, Mat(a2->field(), {{1, 0}})), ValueError);
  REQUIRE_NOTHROW(submodule(reg, Mat(a2->field(), {{0, 1}})));
}

TEST_CASE("radical, socle, and top subspaces") {
  auto a2 = fixtures::dual_numbers();
  Module reg = fixtures::regular(a2);
  Field f = a2->field();
  REQUIRE(radical_subspace(reg) == Mat(f, {{0, 1}}));
  REQUIRE(socle_subspace(reg) == Mat(f, {{0, 1}}));
  REQUIRE(top(reg).quotient == fixtures::simple_k(a2));

  auto pf = fixtures::product_field();
  Module regp = fixtures::regular(pf);
  REQUIRE(radical_subspace(regp).rows() == 0);
  REQUIRE(socle_subspace(regp) == Mat::identity(pf->field(), 2));

  auto q = fixtures::arrow_algebra();
  Module reg3 = fixtures::regular(q);
  REQUIRE(radical_subspace(reg3) == Mat(q->field(), {{0, 0, 1}}));
  REQUIRE(socle_subspace(reg3) == Mat(q->field(), {{0, 1, 0}, {0, 0, 1}}));
}

TEST_CASE("duality is involutive and contravariant") {
  auto q = fixtures::arrow_algebra();
  auto qop = q->opposite();
  Module reg = fixtures::regular(q);
  Module p1 = submodule(reg, image_basis(q->right_mult_matrix(q->idempotents()[0]))).sub;
  Module s1 = fixtures::arrow_simple(q, 1);

  for (const Module* m : {&reg, &p1, &s1}) {
    Module d = dualize(*m, qop);
    REQUIRE(d.dim() == m->dim());
    REQUIRE(dualize(d, q) == *m);
  }
  for (const auto& g : hom_basis(p1, reg)) {
    ModuleMorphism dg = dualize(g, qop);
    REQUIRE(dg.source() == dualize(reg, qop));
    REQUIRE(dg.target() == dualize(p1, qop));
    REQUIRE(dualize(dg, q) == g);
  }
  for (const Module* m : {&reg, &p1, &s1})
    for (const Module* n : {&reg, &p1, &s1})
      REQUIRE(hom_dim(*m, *n) == hom_dim(dualize(*n, qop), dualize(*m, qop)));
  check_hom_against_oracle(dualize(p1, qop), dualize(reg, qop));
}
