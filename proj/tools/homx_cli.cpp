// Batch front end: parse a problem document, run a construction or a
// verification, print the trace and report, optionally emit a DOT ladder.
// Exit 0: constructed and every requested verification passed.
// Exit 1: a verification produced a counterexample.
// Exit 2: usage or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "homx/construct.hpp"
#include "homx/dot.hpp"
#include "homx/json_io.hpp"
#include "homx/tower.hpp"
#include "homx/verify.hpp"

namespace {

using namespace homx;

struct Opts {
  std::string doc_path;
  std::string dot_path;
  std::optional<int> depth, tower_len, tests;
  std::optional<uint64_t> seed;
  std::optional<long long> budget;
};

LoadedProblem load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValueError("cannot open document '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_problem(ss.str());
}

ParamsSpec effective_params(const LoadedProblem& lp, const Opts& o) {
  ParamsSpec p = lp.doc.params;
  if (o.depth) p.depth = *o.depth;
  if (o.tower_len) p.tower_len = *o.tower_len;
  if (o.tests) p.tests = *o.tests;
  if (o.seed) p.seed = *o.seed;
  if (o.budget) p.budget = *o.budget;
  if (p.depth < 1) throw ValueError("depth must be positive");
  if (p.tests < 1) throw ValueError("tests must be positive");
  return p;
}

const ApproxClass& pick_class(const LoadedProblem& lp) {
  if (!lp.cls) throw ValueError("this command needs a class section in the document");
  return *lp.cls;
}

template <typename M>
const typename M::mapped_type& pick(const M& m, const std::string& name, const char* what) {
  if (!name.empty()) return m.at(name);
  if (m.size() == 1) return m.begin()->second;
  throw ValueError(std::string("document must set targets.") + what + " (or define exactly one)");
}

// Name actually used by pick: explicit target, else the single entry's key.
template <typename M>
std::string pick_name(const M& m, const std::string& name) {
  if (!name.empty()) return name;
  return m.size() == 1 ? m.begin()->first : std::string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValueError("cannot write '" + path + "'");
  out << text;
}

// Test window for a depth-truncated precover: degrees where factorization is
// certified, shrunk one at the top because cones raise sources one degree.
std::pair<int, int> precover_window(const Complex& x, int safe_hi) {
  int wlo = x.lo();
  int whi = std::min(x.hi() + 1, safe_hi - 1);
  if (whi < wlo)
    throw WindowError("depth must be at least 2 to build a certified test family");
  return {wlo, whi};
}

std::pair<int, int> preenvelope_window(const Complex& x, int safe_lo) {
  int whi = x.hi();
  int wlo = std::min(whi, std::max(x.lo() - 1, safe_lo));
  return {wlo, whi};
}

void emit_verify_dot(const std::string& path, const ChainMap& phi,
                     const VerificationReport& rep, bool post) {
  // Three-row ladder: the decisive test on top, the approximation pair below;
  // the constructed factorization is the dashed rung.
  for (const TestOutcome& o : rep.outcomes) {
    if (o.counterexample) {
      const ChainMap& beta = *o.counterexample;
      std::vector<LadderRow> rows = post
          ? std::vector<LadderRow>{{"A", beta.source()}, {"D", phi.source()}, {"X", phi.target()}}
          : std::vector<LadderRow>{{"A", beta.target()}, {"E", phi.target()}, {"X", phi.source()}};
      std::vector<LadderArrow> arrows = post
          ? std::vector<LadderArrow>{{1, 2, phi, "phi", false}, {0, 2, beta, "beta", false}}
          : std::vector<LadderArrow>{{2, 1, phi, "phi", false}, {2, 0, beta, "beta", false}};
      write_file(path, ladder_dot(rows, arrows));
      return;
    }
    if (o.witness) {
      const ChainMap& theta = *o.witness;
      std::vector<LadderRow> rows = post
          ? std::vector<LadderRow>{{"A", theta.source()}, {"D", phi.source()}, {"X", phi.target()}}
          : std::vector<LadderRow>{{"A", theta.target()}, {"E", phi.target()}, {"X", phi.source()}};
      std::vector<LadderArrow> arrows = post
          ? std::vector<LadderArrow>{{0, 1, theta, "theta", true}, {1, 2, phi, "phi", false}}
          : std::vector<LadderArrow>{{1, 0, theta, "theta", true}, {2, 1, phi, "phi", false}};
      write_file(path, ladder_dot(rows, arrows));
      return;
    }
  }
  write_file(path, map_dot("D", "X", phi, "phi"));
}

std::string wakamatsu_text(const WakamatsuReport& w) {
  std::ostringstream out;
  out << "wakamatsu: " << w.entries.size() << " induced maps, "
      << (w.all_epic() ? "all epic" : "NOT all epic") << "\n";
  for (const WakamatsuEntry& e : w.entries)
    out << "  stage " << e.stage << "  " << e.test << "  hom " << e.hom_next << " -> "
        << e.hom_cur << "  rank " << e.image_rank << "  " << (e.epic ? "epic" : "NOT epic")
        << "\n";
  if (!w.warning.empty()) out << "warning: " << w.warning << "\n";
  return out.str();
}

int run(const std::string& cmd, const Opts& o) {
  LoadedProblem lp = load(o.doc_path);
  ParamsSpec p = effective_params(lp, o);

  if (cmd == "resolve") {
    const ApproxClass& cls = pick_class(lp);
    const Module& m = pick(lp.modules, lp.doc.targets.module, "module");
    Resolvent r = resolvent(cls, m, p.depth);
    check_resolvent_hom_exact(r);
    std::cout << "resolvent of module '" << pick_name(lp.modules, lp.doc.targets.module)
              << "' in " << cls.name() << ", depth " << p.depth << "\n";
    std::cout << "terms:";
    for (size_t k = 0; k < r.terms.size(); ++k) std::cout << " E" << k << "(dim " << r.terms[k].dim() << ")";
    std::cout << "\nHom(G,-)-exactness: certified for " << cls.generators().size()
              << " generators\n";
    return 0;
  }

  if (cmd == "precover" || cmd == "preenvelope") {
    const ApproxClass& cls = pick_class(lp);
    const Complex& x = pick(lp.complexes, lp.doc.targets.complex, "complex");
    if (cmd == "precover") {
      BoundedPrecover pc = bounded_precover(x, cls, p.depth);
      auto [wlo, whi] = precover_window(x, pc.safe_hi);
      auto tests = generate_tests(cls, wlo, whi, p.tests, p.seed);
      VerificationReport rep = is_precover(pc.phi(), tests, cls);
      std::cout << "== construction ==\n" << pc.trace.to_text();
      std::cout << "== verification ==\n" << rep.to_text();
      if (!o.dot_path.empty()) emit_verify_dot(o.dot_path, pc.phi(), rep, true);
      return rep.pass() ? 0 : 1;
    }
    BoundedPreenvelope pe = bounded_preenvelope(x, cls, p.depth);
    auto [wlo, whi] = preenvelope_window(x, pe.safe_lo);
    auto tests = generate_tests(cls, wlo, whi, p.tests, p.seed);
    VerificationReport rep = is_preenvelope(pe.phi(), tests, cls);
    std::cout << "== construction ==\n" << pe.trace.to_text();
    std::cout << "== verification ==\n" << rep.to_text();
    if (!o.dot_path.empty()) emit_verify_dot(o.dot_path, pe.phi(), rep, false);
    return rep.pass() ? 0 : 1;
  }

  if (cmd == "cover-candidate" || cmd == "envelope-candidate") {
    const ApproxClass& cls = pick_class(lp);
    const Complex& x = pick(lp.complexes, lp.doc.targets.complex, "complex");
    if (cmd == "cover-candidate") {
      TowerCoverCandidate cand = tower_cover_candidate(x, cls, p.depth, p.tower_len);
      auto [wlo, whi] = precover_window(x, cand.stages.back().pc.safe_hi);
      auto tests = generate_tests(cls, wlo, whi, p.tests, p.seed);
      VerificationReport rep = is_precover(cand.phi(), tests, cls);
      std::cout << "stabilization stage: " << cand.stabilization_stage << "\n";
      std::cout << wakamatsu_text(cand.wakamatsu);
      std::cout << "== verification ==\n" << rep.to_text();
      if (!o.dot_path.empty()) emit_verify_dot(o.dot_path, cand.phi(), rep, true);
      return cand.wakamatsu.all_epic() && rep.pass() ? 0 : 1;
    }
    TowerEnvelopeCandidate cand = tower_envelope_candidate(x, cls, p.depth, p.tower_len);
    auto [wlo, whi] = preenvelope_window(x, cand.stages.back().pe.safe_lo);
    auto tests = generate_tests(cls, wlo, whi, p.tests, p.seed);
    VerificationReport rep = is_preenvelope(cand.phi(), tests, cls);
    std::cout << "stabilization stage: " << cand.stabilization_stage << "\n";
    std::cout << wakamatsu_text(cand.wakamatsu);
    std::cout << "== verification ==\n" << rep.to_text();
    if (!o.dot_path.empty()) emit_verify_dot(o.dot_path, cand.phi(), rep, false);
    return cand.wakamatsu.all_epic() && rep.pass() ? 0 : 1;
  }

  if (cmd == "verify-precover" || cmd == "verify-preenvelope") {
    const ApproxClass& cls = pick_class(lp);
    const ChainMap& phi = pick(lp.maps, lp.doc.targets.map, "map");
    bool post = cmd == "verify-precover";
    const Complex& probe = post ? phi.target() : phi.source();
    auto tests = generate_tests(cls, probe.lo(), probe.hi(), p.tests, p.seed);
    VerificationReport rep = post ? is_precover(phi, tests, cls) : is_preenvelope(phi, tests, cls);
    std::cout << rep.to_text();
    if (!o.dot_path.empty()) emit_verify_dot(o.dot_path, phi, rep, post);
    return rep.pass() ? 0 : 1;
  }

  if (cmd == "verify-cover" || cmd == "verify-envelope") {
    const ChainMap& phi = pick(lp.maps, lp.doc.targets.map, "map");
    VerificationReport rep = cmd == "verify-cover" ? is_cover(phi, p.budget, p.seed)
                                                   : is_envelope(phi, p.budget, p.seed);
    std::cout << rep.to_text();
    if (!o.dot_path.empty()) {
      if (!rep.pass() && rep.outcomes[0].counterexample) {
        const ChainMap& theta = *rep.outcomes[0].counterexample;
        write_file(o.dot_path,
                   ladder_dot({{"D", phi.source()}, {"X", phi.target()}},
                              {{0, 1, phi, "phi", false}, {0, 0, theta, "theta", true}}));
      } else {
        write_file(o.dot_path, map_dot("D", "X", phi, "phi"));
      }
    }
    return rep.pass() ? 0 : 1;
  }

  if (cmd == "cone") {
    const ChainMap& nu = pick(lp.maps, lp.doc.targets.map, "map");
    ConeUp c = cone_source_up(nu);
    std::cout << "cone of '" << pick_name(lp.maps, lp.doc.targets.map) << "': degrees [" << c.cone.lo() << ", "
              << c.cone.hi() << "], dims";
    for (int n = c.cone.lo(); n <= c.cone.hi(); ++n) std::cout << " " << c.cone.term(n).dim();
    std::cout << "\n";
    if (!o.dot_path.empty())
      write_file(o.dot_path,
                 ladder_dot({{"A", nu.source()}, {"B", nu.target()}, {"C", c.cone}},
                            {{0, 1, nu, "nu", false}, {1, 2, c.include_target, "i", false}}));
    return 0;
  }

  if (cmd == "diagram") {
    // Prefer an explicit map target, else an explicit complex, else whichever
    // section has exactly one entry (maps first).
    std::string mname = lp.doc.targets.map;
    if (mname.empty() && lp.doc.targets.complex.empty())
      mname = pick_name(lp.maps, mname);
    std::string dot;
    if (!mname.empty()) {
      dot = map_dot(lp.doc.maps.at(mname).source, lp.doc.maps.at(mname).target,
                    lp.maps.at(mname), "phi");
    } else {
      const Complex& x = pick(lp.complexes, lp.doc.targets.complex, "complex");
      std::string cname = pick_name(lp.complexes, lp.doc.targets.complex);
      dot = ladder_dot({{cname.empty() ? "C" : cname, x}}, {});
    }
    if (!o.dot_path.empty())
      write_file(o.dot_path, dot);
    else
      std::cout << dot;
    return 0;
  }

  throw ValueError("unknown command '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homx: precovers, preenvelopes, covers, and envelopes of chain complexes"};
  app.require_subcommand(1);
  Opts o;
  const char* names[] = {"resolve",          "precover",        "preenvelope",
                         "cover-candidate",  "envelope-candidate", "verify-precover",
                         "verify-cover",     "verify-preenvelope", "verify-envelope",
                         "cone",             "diagram"};
  const char* descs[] = {"build a class resolution of a module and certify Hom-exactness",
                         "construct a depth-truncated precover and verify it",
                         "construct a depth-truncated preenvelope and verify it",
                         "build the truncation tower cover candidate",
                         "build the truncation tower envelope candidate",
                         "check the precover property of a named map",
                         "check the cover automorphism property of a named map",
                         "check the preenvelope property of a named map",
                         "check the envelope automorphism property of a named map",
                         "form the mapping cone of a named map",
                         "emit a DOT ladder for the named map or complex"};
  for (size_t i = 0; i < sizeof(names) / sizeof(names[0]); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("document", o.doc_path, "problem document (JSON)")->required();
    sub->add_option("--depth", o.depth, "resolution truncation depth");
    sub->add_option("--tower-len", o.tower_len, "tower length");
    sub->add_option("--seed", o.seed, "seed for generated tests and sampling");
    sub->add_option("--budget", o.budget, "exhaustive enumeration budget");
    sub->add_option("--tests", o.tests, "generated test family size");
    sub->add_option("--dot", o.dot_path, "write a DOT ladder diagram here");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
