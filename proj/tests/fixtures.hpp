#pragma once

// Shared fixtures: the smallest algebras whose module categories exercise
// every code path (a local non-semisimple algebra, a directed quiver path
// algebra, and a semisimple product).

#include "homx/module.hpp"

namespace fixtures {

// F_p[x]/(x^2), basis {1, x}. Local: J = (x), one idempotent.
inline homx::AlgebraPtr dual_numbers(uint32_t p = 2) {
  using namespace homx;
  return Algebra::create(Field(p), 2,
                         {{{1, 0}, {0, 1}}, {{0, 1}, {0, 0}}},  // 1*1, 1*x, x*1, x*x
                         {1, 0}, {{0, 1}}, {{1, 0}}, {"1", "x"});
}

// Unique simple over F_p[x]/(x^2): x acts by zero.
inline homx::Module simple_k(const homx::AlgebraPtr& a2) {
  homx::Field f = a2->field();
  return homx::Module::create(a2, {homx::Mat::identity(f, 1), homx::Mat(f, 1, 1)});
}

// Path algebra of 1 --a--> 2 over F_p, basis {e1, e2, a}: a*e1 = a = e2*a.
inline homx::AlgebraPtr arrow_algebra(uint32_t p = 2) {
  using namespace homx;
  std::vector<std::vector<std::vector<long long>>> c(3,
      std::vector<std::vector<long long>>(3, std::vector<long long>(3, 0)));
  c[0][0] = {1, 0, 0};  // e1*e1
  c[1][1] = {0, 1, 0};  // e2*e2
  c[1][2] = {0, 0, 1};  // e2*a
  c[2][0] = {0, 0, 1};  // a*e1
  return Algebra::create(Field(p), 3, c, {1, 1, 0}, {{0, 0, 1}}, {{1, 0, 0}, {0, 1, 0}},
                         {"e1", "e2", "a"});
}

// Simple at vertex v (1-based) of the arrow algebra.
inline homx::Module arrow_simple(const homx::AlgebraPtr& q, int v) {
  homx::Field f = q->field();
  homx::Mat one = homx::Mat::identity(f, 1), zero(f, 1, 1);
  return homx::Module::create(q, {v == 1 ? one : zero, v == 2 ? one : zero, zero});
}

// F_p x F_p, semisimple, two idempotents.
inline homx::AlgebraPtr product_field(uint32_t p = 2) {
  using namespace homx;
  return Algebra::create(Field(p), 2, {{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}}, {1, 1}, {},
                         {{1, 0}, {0, 1}}, {"e1", "e2"});
}

// The algebra as a left module over itself.
inline homx::Module regular(const homx::AlgebraPtr& a) {
  std::vector<homx::Mat> action;
  for (int i = 0; i < a->dim(); ++i) {
    homx::Mat e(a->field(), a->dim(), 1);
    e.at(i, 0) = 1;
    action.push_back(a->left_mult_matrix(e));
  }
  return homx::Module::create(a, std::move(action));
}

}  // namespace fixtures
