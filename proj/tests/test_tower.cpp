#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "homx/tower.hpp"

using namespace homx;

/******** Colimit towers ********/

TEST_CASE("colimit tower stabilizes onto the direct bounded precover") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  ApproxClass proj = ApproxClass::projectives(a2);

  Complex x = disk(k, 1);
  BoundedAbovePrecover ba = bounded_above_precover(x, proj, 3, 3);
  REQUIRE(ba.stabilization_stage == 1);
  REQUIRE(ba.tower.size() == 4);
  REQUIRE(ba.into_next.size() == 3);

  // Stage 0 approximates the top truncation, later stages the whole complex.
  REQUIRE(ba.tower[0].x == truncate_above(x, 0));
  for (int m = 0; m <= 3; ++m) REQUIRE(ba.tower[0].d().term(m).dim() == 2);

  BoundedPrecover direct = bounded_precover(x, proj, 3);
  REQUIRE(ba.d() == direct.d());
  REQUIRE(ba.phi() == direct.phi());
  for (size_t n = 1; n < ba.tower.size(); ++n) {
    REQUIRE(ba.tower[n].d() == direct.d());
    REQUIRE(ba.tower[n].phi() == direct.phi());
  }

  // The colimit injection is the cone inclusion on the stable window and
  // commutes with both approximations.
  Field f = a2->field();
  REQUIRE(ba.into_next[0].component(1) == Mat(f, {{1, 0}, {0, 1}, {0, 0}, {0, 0}}));
  REQUIRE(ba.into_next[1] == ChainMap::identity(direct.d()));
  ChainMap xinc = ChainMap::create(ba.tower[0].x, x, {{0, Mat::identity(f, 1)}});
  REQUIRE(ba.tower[1].phi().compose(ba.into_next[0]) == xinc.compose(ba.tower[0].phi()));

  // The assembled colimit still factors test maps by the corrective recipe.
  ChainMap self = lift_through_bounded_precover(ba.colimit(), ba.phi());
  REQUIRE(ba.phi().compose(self) == ba.phi());
}

TEST_CASE("colimit tower input validation") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  ApproxClass proj = ApproxClass::projectives(a2);

  // One stage past stabilization is needed to witness it.
  REQUIRE_THROWS_AS(bounded_above_precover(disk(k, 1), proj, 3, 1), NonStabilizedError);
  REQUIRE_THROWS_AS(bounded_above_precover(disk(k, 1), proj, 0, 2), WindowError);
  REQUIRE_THROWS_AS(bounded_above_precover(disk(k, 1), proj, 3, -1), ValueError);

  BoundedAbovePrecover z = bounded_above_precover(Complex::zero_complex(a2), proj, 2, 1);
  REQUIRE(z.d().is_zero());
  REQUIRE(z.stabilization_stage == 0);
}

/******** Cover towers ********/

TEST_CASE("cover tower of a stalk: kernels and Hom surjectivity") {
  auto a2 = fixtures::dual_numbers();
  Field f = a2->field();
  Module k = fixtures::simple_k(a2);
  ApproxClass proj = ApproxClass::projectives(a2);

  TowerCoverCandidate tc = tower_cover_candidate(stalk(k, 0), proj, 3, 2);
  REQUIRE(tc.stabilization_stage == 0);
  REQUIRE(tc.stages.size() == 3);
  REQUIRE(tc.d().lo() == 0);
  REQUIRE(tc.d().hi() == 3);

  // T = Ker phi: the socle at the augmentation degree, full terms above.
  const Complex& t0 = tc.stages[0].t;
  REQUIRE(t0.term(0).dim() == 1);
  for (int m = 1; m <= 3; ++m) REQUIRE(t0.term(m).dim() == 2);

  // All stages coincide, so the tower maps fix the approximation.
  REQUIRE(tc.pi[0].component(0) == Mat::identity(f, 2));
  REQUIRE(tc.wakamatsu.extension_closed_certified);
  REQUIRE(tc.wakamatsu.warning.empty());
  REQUIRE(tc.wakamatsu.entries.size() == 10);
  REQUIRE(tc.wakamatsu.all_epic());
  for (const WakamatsuEntry& e : tc.wakamatsu.entries) REQUIRE(e.image_rank == e.hom_cur);
}

TEST_CASE("cover tower of a disk: stage shapes and induced kernel maps") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  ApproxClass proj = ApproxClass::projectives(a2);

  TowerCoverCandidate tc = tower_cover_candidate(disk(k, 1), proj, 2, 2);
  REQUIRE(tc.stabilization_stage == 1);

  // Stage 0 covers the top truncation, stage 1 the whole disk; both share
  // the uniform top degree hi + depth.
  REQUIRE(tc.stages[0].y == stalk(k, 1));
  REQUIRE(tc.stages[0].pc.d().lo() == 1);
  REQUIRE(tc.stages[0].pc.d().hi() == 3);
  const Complex& d1 = tc.stages[1].pc.d();
  REQUIRE(d1.lo() == 0);
  REQUIRE(d1.hi() == 3);
  REQUIRE(d1.term(0).dim() == 2);
  for (int m = 1; m <= 3; ++m) REQUIRE(d1.term(m).dim() == 4);

  const Complex& t0 = tc.stages[0].t;
  const Complex& t1 = tc.stages[1].t;
  REQUIRE(t0.term(1).dim() == 1);
  REQUIRE(t0.term(2).dim() == 2);
  REQUIRE(t1.term(0).dim() == 1);
  REQUIRE(t1.term(1).dim() == 3);
  REQUIRE(t1.term(2).dim() == 4);

  // The induced kernel map sits under the tower map.
  REQUIRE(tc.stages[0].t_inclusion.compose(tc.tau[0]) ==
          tc.pi[0].compose(tc.stages[1].t_inclusion));

  REQUIRE(tc.wakamatsu.entries.size() == 8);
  REQUIRE(tc.wakamatsu.all_epic());
  REQUIRE(is_class_complex(proj, tc.d()).ok);
}

TEST_CASE("cover tower over a semisimple algebra returns the complex itself") {
  auto pf = fixtures::product_field();
  ApproxClass proj = ApproxClass::projectives(pf);
  Module s0 = indecomposable_projectives(pf)[0];

  Complex x = disk(s0, 1);
  TowerCoverCandidate tc = tower_cover_candidate(x, proj, 2, 2);
  REQUIRE(tc.d().lo() == x.lo());
  REQUIRE(tc.d().hi() == x.hi());
  for (int m = x.lo(); m <= x.hi(); ++m) REQUIRE(tc.d().term(m).dim() == x.term(m).dim());
  REQUIRE(tc.phi().is_degreewise_iso());
  for (const CoverTowerStage& st : tc.stages) REQUIRE(st.t.is_zero());
  REQUIRE(tc.wakamatsu.entries.empty());
  REQUIRE(tc.wakamatsu.all_epic());
}

TEST_CASE("additive-closure classes carry the extension-closure caveat") {
  auto a2 = fixtures::dual_numbers();
  Module reg = fixtures::regular(a2);
  Module k = fixtures::simple_k(a2);
  ApproxClass addr = ApproxClass::add_closure({reg});

  TowerCoverCandidate tc = tower_cover_candidate(stalk(k, 0), addr, 2, 1);
  REQUIRE_FALSE(tc.wakamatsu.extension_closed_certified);
  REQUIRE_FALSE(tc.wakamatsu.warning.empty());
}

TEST_CASE("cover tower validation and degenerate inputs") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  ApproxClass proj = ApproxClass::projectives(a2);

  REQUIRE_THROWS_AS(tower_cover_candidate(disk(k, 1), proj, 2, 1), NonStabilizedError);
  REQUIRE_THROWS_AS(tower_cover_candidate(stalk(k, 0), proj, -1, 1), ValueError);

  TowerCoverCandidate z = tower_cover_candidate(Complex::zero_complex(a2), proj, 2, 1);
  REQUIRE(z.d().is_zero());
  REQUIRE(z.wakamatsu.entries.empty());
}

/******** Envelope towers and duality ********/

TEST_CASE("envelope tower of a stalk mirrors the cover tower") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  ApproxClass inj = ApproxClass::injectives(a2);

  TowerEnvelopeCandidate te = tower_envelope_candidate(stalk(k, 0), inj, 3, 2);
  REQUIRE(te.stabilization_stage == 0);
  REQUIRE(te.d().lo() == -3);
  REQUIRE(te.d().hi() == 0);

  // T = Coker phi: one dimension at the coaugmentation degree, full below.
  const Complex& t0 = te.stages[0].t;
  REQUIRE(t0.term(0).dim() == 1);
  for (int m = -3; m <= -1; ++m) REQUIRE(t0.term(m).dim() == 2);

  REQUIRE(te.wakamatsu.entries.size() == 10);
  REQUIRE(te.wakamatsu.all_epic());

  // The induced cokernel map sits over the tower map.
  REQUIRE(te.tau[0].compose(te.stages[0].t_projection) ==
          te.stages[1].t_projection.compose(te.rho[0]));
}

TEST_CASE("cover and envelope towers are exchanged by duality") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  ApproxClass proj = ApproxClass::projectives(a2);
  ApproxClass inj = ApproxClass::injectives(a2);

  for (const Complex& x : {stalk(k, 0), disk(k, 1)}) {
    int len = x.hi() - x.lo() + 1;
    TowerCoverCandidate tc = tower_cover_candidate(x, proj, 2, len);
    TowerEnvelopeCandidate te = tower_envelope_candidate(dualize(x, a2), inj, 2, len);
    REQUIRE(tc.stabilization_stage == te.stabilization_stage);

    Complex dd = dualize(tc.d(), a2);
    REQUIRE(dd.lo() == te.d().lo());
    REQUIRE(dd.hi() == te.d().hi());
    for (int m = dd.lo(); m <= dd.hi(); ++m)
      REQUIRE(dd.term(m).dim() == te.d().term(m).dim());

    // Each side's approximation factors through the other.
    ChainMap dphi = dualize(tc.phi(), a2);
    REQUIRE(extend_chain_map_along(te.phi(), dphi).has_value());
    REQUIRE(extend_chain_map_along(dphi, te.phi()).has_value());

    REQUIRE(tc.wakamatsu.entries.size() == te.wakamatsu.entries.size());
    REQUIRE(tc.wakamatsu.all_epic() == te.wakamatsu.all_epic());
  }
}

TEST_CASE("envelope tower over a semisimple algebra returns the complex itself") {
  auto pf = fixtures::product_field();
  ApproxClass inj = ApproxClass::injectives(pf);
  Module s0 = indecomposable_projectives(pf)[0];

  Complex x = disk(s0, 1);
  TowerEnvelopeCandidate te = tower_envelope_candidate(x, inj, 2, 2);
  for (int m = x.lo(); m <= x.hi(); ++m) REQUIRE(te.d().term(m).dim() == x.term(m).dim());
  REQUIRE(te.phi().is_degreewise_iso());
  for (const EnvelopeTowerStage& st : te.stages) REQUIRE(st.t.is_zero());

  TowerEnvelopeCandidate z = tower_envelope_candidate(Complex::zero_complex(pf), inj, 2, 1);
  REQUIRE(z.d().is_zero());
}

TEST_CASE("tower constructions are deterministic") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  ApproxClass proj = ApproxClass::projectives(a2);

  TowerCoverCandidate a = tower_cover_candidate(disk(k, 1), proj, 2, 2);
  TowerCoverCandidate b = tower_cover_candidate(disk(k, 1), proj, 2, 2);
  REQUIRE(a.trace.finalized());
  REQUIRE(a.trace.to_text() == b.trace.to_text());
  REQUIRE(a.trace.to_text().find("pi") != std::string::npos);

  BoundedAbovePrecover c = bounded_above_precover(disk(k, 1), proj, 3, 2);
  BoundedAbovePrecover d = bounded_above_precover(disk(k, 1), proj, 3, 2);
  REQUIRE(c.trace.to_text() == d.trace.to_text());
}
