#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "homx/dot.hpp"
#include "homx/json_io.hpp"

using namespace homx;

namespace {

std::string fixture_path(const std::string& name) {
  return std::string(HOMX_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int exit_code;
  std::string output;
};

// Runs the installed binary with stdout+stderr captured; args are trusted
// literals from the tests below.
CliRun run_cli(const std::string& args) {
  namespace fs = std::filesystem;
  static int counter = 0;
  fs::path tmp = fs::temp_directory_path() /
                 ("homx_cli_" + std::to_string(::getpid()) + "_" + std::to_string(++counter));
  std::string cmd =
      "\"" HOMX_CLI_PATH "\" " + args + " > \"" + tmp.string() + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  CliRun r{WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(tmp.string())};
  fs::remove(tmp);
  return r;
}

std::filesystem::path temp_dot() {
  static int counter = 0;
  return std::filesystem::temp_directory_path() /
         ("homx_dot_" + std::to_string(::getpid()) + "_" + std::to_string(++counter) + ".dot");
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

/******** Problem documents ********/

TEST_CASE("problem documents load into validated objects") {
  LoadedProblem lp = load_problem(slurp(fixture_path("a2_proj_stalk.json")));
  CHECK(lp.algebra->field().p == 2);
  CHECK(lp.algebra->dim() == 2);
  CHECK(lp.algebra->basis_names()[1] == "x");
  CHECK(lp.modules.at("reg").dim() == 2);
  CHECK(lp.modules.at("k").dim() == 1);
  REQUIRE(lp.cls.has_value());
  CHECK(lp.cls->generators().size() == 1);
  const Complex& x = lp.complexes.at("X");
  CHECK(x.lo() == 0);
  CHECK(x.hi() == 0);
  CHECK(x.term(0).dim() == 1);
  CHECK(lp.doc.params.depth == 4);
  CHECK(lp.doc.params.seed == 42);
  CHECK(lp.doc.targets.complex == "X");
}

TEST_CASE("fixture documents are serialization fixpoints") {
  for (const char* name : {"a2_proj_stalk.json", "fold_map.json", "socle_envelope.json",
                           "diag_envelope.json", "bad_algebra.json", "disk_tower.json"}) {
    std::string text = slurp(fixture_path(name));
    INFO(name);
    CHECK(serialize_problem(parse_problem(text)) == text);
  }
}

TEST_CASE("serialization normalizes entries and fills in params") {
  // Entries arrive unreduced and params are missing entirely.
  std::string text = R"({
    "algebra": {"p": 2, "dim": 1, "table": [[[3]]], "unit": [1],
                "radical": [], "idempotents": [[-1]]},
    "modules": {"m": {"action": [[[5]]]}},
    "complexes": {"X": {"lo": 0, "terms": ["m"], "diffs": []}}
  })";
  std::string canon = serialize_problem(parse_problem(text));
  CHECK(contains(canon, "\"table\": [\n      [\n        [1]\n      ]\n    ]"));
  CHECK(contains(canon, "\"idempotents\": [\n      [1]\n    ]"));
  CHECK(contains(canon, "\"action\": [\n        [\n          [1]\n        ]\n      ]"));
  CHECK(contains(canon, "\"budget\": 65536"));
  CHECK(contains(canon, "\"depth\": 4"));
  CHECK(contains(canon, "\"seed\": 42"));
  CHECK(contains(canon, "\"tests\": 9"));
  CHECK(contains(canon, "\"tower_len\": 3"));
  // The reduced document still loads and stays a fixpoint.
  LoadedProblem lp = load_problem(canon);
  CHECK(lp.modules.at("m").dim() == 1);
  CHECK(serialize_problem(parse_problem(canon)) == canon);
}

TEST_CASE("parse errors carry line and column positions") {
  CHECK_THROWS_WITH(parse_problem("{\n  \"algebra\": {\n    \"p\": 2,\n"),
                    Catch::Matchers::ContainsSubstring("line 4, column 1"));
  CHECK_THROWS_WITH(parse_problem("not json"),
                    Catch::Matchers::ContainsSubstring("line 1, column 3"));
}

TEST_CASE("document validation reports the offending path") {
  auto doc = [](const std::string& body) {
    return std::string(R"({"algebra": {"p": 2, "dim": 1, "table": [[[1]]], "unit": [1],
                           "radical": [], "idempotents": [[1]]})") +
           (body.empty() ? "" : ", " + body) + "}";
  };
  CHECK_THROWS_WITH(parse_problem("{}"),
                    Catch::Matchers::ContainsSubstring("document: missing required key 'algebra'"));
  CHECK_THROWS_WITH(parse_problem(R"({"algebra": {"dim": 1}})"),
                    Catch::Matchers::ContainsSubstring("algebra: missing required key 'p'"));
  CHECK_THROWS_WITH(parse_problem(doc(R"("modules": {"m": {"action": [[[1],[2,3]]]}})")),
                    Catch::Matchers::ContainsSubstring("modules.m.action[0]: ragged matrix rows"));
  CHECK_THROWS_WITH(parse_problem(doc(R"("maps": {"f": {"source": "X", "target": "X",
                                       "components": {"zero": [[1]]}}})")),
                    Catch::Matchers::ContainsSubstring(
                        "maps.f.components: key 'zero' is not a degree"));
  CHECK_THROWS_WITH(load_problem(doc(R"("class": {"kind": "flats"})")),
                    Catch::Matchers::ContainsSubstring(
                        "class.kind: expected projectives, injectives, or add, got 'flats'"));
  CHECK_THROWS_WITH(load_problem(doc(R"("complexes": {"X": {"lo": 0, "terms": ["nope"],
                                       "diffs": []}})")),
                    Catch::Matchers::ContainsSubstring("complexes.X.terms[0]: unknown module 'nope'"));
  CHECK_THROWS_WITH(load_problem(doc(R"("modules": {"m": {"action": [[[1]]]}},
                                       "complexes": {"X": {"lo": 0, "terms": ["m"], "diffs": []}},
                                       "maps": {"f": {"source": "X", "target": "Y",
                                                      "components": {}}})")),
                    Catch::Matchers::ContainsSubstring("maps.f.target: unknown complex 'Y'"));
  CHECK_THROWS_WITH(load_problem(doc(R"("targets": {"module": "ghost"})")),
                    Catch::Matchers::ContainsSubstring("targets.module: unknown module 'ghost'"));
  // Module square shape comes from the first action matrix, so only columns
  // can disagree there; row counts are cross-checked against complex terms.
  CHECK_THROWS_WITH(load_problem(doc(R"("modules": {"m": {"action": [[[1],[1]]]}})")),
                    Catch::Matchers::ContainsSubstring(
                        "modules.m.action[0]: expected 2 columns in row 0"));
  CHECK_THROWS_WITH(load_problem(doc(R"("modules": {"m": {"action": [[[1]]]}},
                                       "complexes": {"X": {"lo": 0, "terms": ["m","m"],
                                                           "diffs": [[[1],[1]]]}})")),
                    Catch::Matchers::ContainsSubstring(
                        "complexes.X.diffs[0]: expected 1 rows, got 2"));
}

TEST_CASE("a non-associative table is rejected with the failing triple") {
  CHECK_THROWS_WITH(load_problem(slurp(fixture_path("bad_algebra.json"))),
                    Catch::Matchers::ContainsSubstring(
                        "mult tensor not associative at basis triple (e1,a,a)"));
}

TEST_CASE("an add class builds from named generator modules") {
  std::string text = R"({
    "algebra": {"p": 2, "dim": 2, "table": [[[1,0],[0,1]],[[0,1],[0,0]]],
                "unit": [1,0], "radical": [[0,1]], "idempotents": [[1,0]]},
    "modules": {"reg": {"action": [[[1,0],[0,1]],[[0,0],[1,0]]]}},
    "class": {"kind": "add", "generators": ["reg"]}
  })";
  LoadedProblem lp = load_problem(text);
  REQUIRE(lp.cls.has_value());
  CHECK(lp.cls->generators().size() == 1);
  CHECK(lp.cls->generators()[0].dim() == 2);
  CHECK(member(*lp.cls, lp.modules.at("reg")).member);
}

/******** DOT ladders ********/

TEST_CASE("a single chain map renders as a two row ladder") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  std::map<int, Mat> comps;
  comps.emplace(0, Mat::identity(a2->field(), 1));
  ChainMap f = ChainMap::create(stalk(k, 0), stalk(k, 0), std::move(comps));
  CHECK(map_dot("A", "B", f, "phi") ==
        "digraph ladder {\n"
        "  rankdir=LR;\n"
        "  node [shape=box, fontname=\"monospace\"];\n"
        "  edge [fontname=\"monospace\"];\n"
        "  subgraph row_0 {\n"
        "    r0_0 [label=\"A_0 (1)\"];\n"
        "  }\n"
        "  subgraph row_1 {\n"
        "    r1_0 [label=\"B_0 (1)\"];\n"
        "  }\n"
        "  { rank=same; r0_0; r1_0; }\n"
        "  r0_0 -> r1_0 [label=\"phi_0\", constraint=false];\n"
        "}\n");
}

TEST_CASE("ladders align columns and mark lift and zero rungs") {
  auto a2 = fixtures::dual_numbers();
  Module k = fixtures::simple_k(a2);
  Complex d = disk(k, 0);  // degrees [-1, 0]
  ChainMap id = ChainMap::identity(d);
  std::string dot = ladder_dot({{"D", d}, {"E", d}}, {{0, 1, id, "theta", true}});
  CHECK(contains(dot, "r0_m1 [label=\"D_-1 (1)\"]"));
  CHECK(contains(dot, "{ rank=same; r0_0; r1_0; }"));
  CHECK(contains(dot, "{ rank=same; r0_m1; r1_m1; }"));
  CHECK(contains(dot, "r0_0 -> r0_m1 [label=\"d\"]"));
  CHECK(contains(dot, "r0_0 -> r1_0 [label=\"theta_0\", constraint=false, style=dashed]"));

  ChainMap zero = ChainMap::zero(d, d);
  std::string gray = ladder_dot({{"D", d}, {"E", d}}, {{0, 1, zero, "z", false}});
  CHECK(contains(gray, "r0_0 -> r1_0 [label=\"z_0\", constraint=false, color=gray]"));

  // Stalks have no differential edge; zero differentials are skipped too.
  std::string stalk_dot = ladder_dot({{"S", stalk(k, 2)}}, {});
  CHECK(contains(stalk_dot, "r0_2 [label=\"S_2 (1)\"]"));
  CHECK_FALSE(contains(stalk_dot, "label=\"d\""));
  CHECK_FALSE(contains(stalk_dot, "rank=same"));

  CHECK_THROWS_AS(ladder_dot({}, {}), ValueError);
  CHECK_THROWS_AS(ladder_dot({{"D", d}}, {{0, 3, id, "f", false}}), ValueError);
}

/******** End-to-end drives ********/

TEST_CASE("the stalk precover pipeline passes end to end") {
  CliRun r = run_cli("precover \"" + fixture_path("a2_proj_stalk.json") + "\"");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "== construction =="));
  CHECK(contains(r.output, "== verification =="));
  CHECK(contains(r.output, "subject: [0..4:2,2,2,2,2] -> [0..0:1] over F2"));
  CHECK(contains(r.output, "family: 9 test complexes in projectives"));
  CHECK(contains(r.output, "mode: exhaustive"));
  CHECK(contains(r.output, "verdict: pass"));

  // Replays are byte-identical.
  CliRun again = run_cli("precover \"" + fixture_path("a2_proj_stalk.json") + "\"");
  CHECK(again.exit_code == 0);
  CHECK(again.output == r.output);
}

TEST_CASE("the fold map fails the cover check with a recorded counterexample") {
  std::string doc = fixture_path("fold_map.json");
  CliRun r = run_cli("verify-cover \"" + doc + "\"");
  CHECK(r.exit_code == 1);
  CHECK(contains(r.output, "property: cover"));
  CHECK(contains(r.output, "dim 4"));
  CHECK(contains(r.output, "(counterexample recorded)"));
  CHECK(contains(r.output, "verdict: FAIL"));

  // A tight budget flips the same check into sampling; same verdict.
  CliRun s = run_cli("verify-cover \"" + doc + "\" --budget 8");
  CHECK(s.exit_code == 1);
  CHECK(contains(s.output, "mode: sampled (1000 points, seed 42)"));

  // The same map still is a precover.
  CliRun p = run_cli("verify-precover \"" + doc + "\"");
  CHECK(p.exit_code == 0);
  CHECK(contains(p.output, "verdict: pass"));
}

TEST_CASE("envelope checks separate the socle inclusion from the diagonal") {
  CliRun good = run_cli("verify-envelope \"" + fixture_path("socle_envelope.json") + "\"");
  CHECK(good.exit_code == 0);
  CHECK(contains(good.output, "property: envelope"));
  CHECK(contains(good.output, "dim 1  reached 2"));
  CHECK(contains(good.output, "verdict: pass"));

  CliRun bad = run_cli("verify-envelope \"" + fixture_path("diag_envelope.json") + "\"");
  CHECK(bad.exit_code == 1);
  CHECK(contains(bad.output, "dim 6"));
  CHECK(contains(bad.output, "(counterexample recorded)"));

  CliRun pre = run_cli("verify-preenvelope \"" + fixture_path("socle_envelope.json") + "\"");
  CHECK(pre.exit_code == 0);
}

TEST_CASE("tower candidates report stabilization and epic towers") {
  CliRun c = run_cli("cover-candidate \"" + fixture_path("disk_tower.json") + "\"");
  CHECK(c.exit_code == 0);
  CHECK(contains(c.output, "stabilization stage: 1"));
  CHECK(contains(c.output, "induced maps, all epic"));
  CHECK(contains(c.output, "verdict: pass"));

  CliRun e = run_cli("envelope-candidate \"" + fixture_path("socle_envelope.json") + "\"");
  CHECK(e.exit_code == 0);
  CHECK(contains(e.output, "stabilization stage: 0"));
  CHECK(contains(e.output, "verdict: pass"));
}

TEST_CASE("construction commands run the remaining fixture targets") {
  CliRun res = run_cli("resolve \"" + fixture_path("a2_proj_stalk.json") + "\"");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "resolvent of module 'k' in projectives, depth 4"));
  CHECK(contains(res.output, "Hom(G,-)-exactness: certified for 1 generators"));

  CliRun pe = run_cli("preenvelope \"" + fixture_path("socle_envelope.json") + "\"");
  CHECK(pe.exit_code == 0);
  CHECK(contains(pe.output, "subject: [0..0:1] -> [-3..0:2,2,2,2] over F2"));
  CHECK(contains(pe.output, "verdict: pass"));

  CliRun cone = run_cli("cone \"" + fixture_path("fold_map.json") + "\"");
  CHECK(cone.exit_code == 0);
  CHECK(contains(cone.output, "cone of 'fold': degrees [0, 1], dims 2 4"));
}

TEST_CASE("usage and input errors exit with status two") {
  CliRun none = run_cli("");
  CHECK(none.exit_code == 2);
  CHECK(contains(none.output, "usage error:"));

  CliRun missing = run_cli("precover /no/such/file.json");
  CHECK(missing.exit_code == 2);
  CHECK(contains(missing.output, "cannot open document"));

  CliRun bad = run_cli("precover \"" + fixture_path("bad_algebra.json") + "\"");
  CHECK(bad.exit_code == 2);
  CHECK(contains(bad.output, "mult tensor not associative at basis triple (e1,a,a)"));

  CliRun shallow = run_cli("precover \"" + fixture_path("a2_proj_stalk.json") + "\" --depth 1");
  CHECK(shallow.exit_code == 2);
  CHECK(contains(shallow.output, "depth must be at least 2 to build a certified test family"));

  CliRun help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(contains(help.output, "precovers, preenvelopes, covers, and envelopes"));
}

TEST_CASE("dot artifacts draw the ladders with dashed lifts") {
  namespace fs = std::filesystem;

  fs::path wit = temp_dot();
  CliRun r = run_cli("precover \"" + fixture_path("a2_proj_stalk.json") + "\" --dot \"" +
                     wit.string() + "\"");
  CHECK(r.exit_code == 0);
  std::string dot = slurp(wit.string());
  CHECK(contains(dot, "digraph ladder"));
  CHECK(contains(dot, "r1_1 -> r1_0 [label=\"d\"]"));
  CHECK(contains(dot, "theta_0\", constraint=false, style=dashed"));
  CHECK(contains(dot, "phi_0\", constraint=false"));
  fs::remove(wit);

  // A failing automorphism check draws theta as a dashed self loop on D.
  fs::path loop = temp_dot();
  CliRun f = run_cli("verify-cover \"" + fixture_path("fold_map.json") + "\" --dot \"" +
                     loop.string() + "\"");
  CHECK(f.exit_code == 1);
  std::string fdot = slurp(loop.string());
  CHECK(contains(fdot, "r0_0 -> r0_0 [label=\"theta_0\", constraint=false, style=dashed]"));
  fs::remove(loop);

  // Cones render three rows including the shifted source.
  fs::path cone = temp_dot();
  CliRun c = run_cli("cone \"" + fixture_path("fold_map.json") + "\" --dot \"" + cone.string() +
                     "\"");
  CHECK(c.exit_code == 0);
  std::string cdot = slurp(cone.string());
  CHECK(contains(cdot, "r2_1 [label=\"C_1 (4)\"]"));
  CHECK(contains(cdot, "label=\"nu_0\""));
  CHECK(contains(cdot, "label=\"i_0\""));
  fs::remove(cone);

  // diagram without --dot prints to stdout; the sole map is the default target.
  CliRun d = run_cli("diagram \"" + fixture_path("fold_map.json") + "\"");
  CHECK(d.exit_code == 0);
  CHECK(contains(d.output, "r0_0 [label=\"D2_0 (4)\"]"));
  CHECK(contains(d.output, "label=\"phi_0\""));
}
