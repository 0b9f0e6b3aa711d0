#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homx/approx.hpp"
#include "homx/complex.hpp"

namespace homx {

/******** Problem documents ********/

// Plain data mirror of the JSON input: matrices as arrays of integer arrays,
// degrees as integers, everything referenced by name. Parsing is syntactic;
// building constructs the algebraic objects and runs their validators.

using MatSpec = std::vector<std::vector<long long>>;

struct AlgebraSpec {
  uint32_t p = 2;
  int dim = 1;
  std::vector<std::vector<std::vector<long long>>> table;
  std::vector<long long> unit;
  std::vector<std::vector<long long>> radical;
  std::vector<std::vector<long long>> idempotents;
  std::vector<std::string> names;
};

struct ClassSpec {
  std::string kind;  // "projectives" | "injectives" | "add"
  std::vector<std::string> generators;
};

struct ComplexSpec {
  int lo = 0;
  std::vector<std::string> terms;
  std::vector<MatSpec> diffs;  // diffs[i]: term lo+1+i -> term lo+i
};

struct MapSpec {
  std::string source, target;  // complex names
  std::map<int, MatSpec> components;
};

struct ParamsSpec {
  int depth = 4;
  int tower_len = 3;
  int tests = 9;
  uint64_t seed = 42;
  long long budget = 1 << 16;
};

struct TargetsSpec {
  std::string complex, module, map;
};

struct ProblemDocument {
  AlgebraSpec algebra;
  std::map<std::string, std::vector<MatSpec>> modules;  // name -> action matrices
  std::optional<ClassSpec> cls;
  std::map<std::string, ComplexSpec> complexes;
  std::map<std::string, MapSpec> maps;
  ParamsSpec params;
  TargetsSpec targets;
};

// The document with its objects constructed and every invariant validated.
struct LoadedProblem {
  ProblemDocument doc;
  AlgebraPtr algebra;
  std::map<std::string, Module> modules;
  std::optional<ApproxClass> cls;
  std::map<std::string, Complex> complexes;
  std::map<std::string, ChainMap> maps;
};

namespace detail {

inline std::string line_of(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline const nlohmann::json& field_at(const nlohmann::json& j, const std::string& key,
                                      const std::string& path) {
  if (!j.is_object()) throw ValueError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValueError(path + ": missing required key '" + key + "'");
  return *it;
}

inline long long int_at(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValueError(path + ": expected an integer");
  return j.get<long long>();
}

inline std::string string_at(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) throw ValueError(path + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<long long> int_row(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) throw ValueError(path + ": expected an array of integers");
  std::vector<long long> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(int_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline MatSpec mat_spec(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) throw ValueError(path + ": expected a matrix (array of integer arrays)");
  MatSpec m;
  for (size_t i = 0; i < j.size(); ++i)
    m.push_back(int_row(j[i], path + "[" + std::to_string(i) + "]"));
  for (size_t i = 1; i < m.size(); ++i)
    if (m[i].size() != m[0].size()) throw ValueError(path + ": ragged matrix rows");
  return m;
}

// Shape comes from context; degenerate expected shapes accept [] rows.
inline Mat build_mat(const MatSpec& s, Field f, int rows, int cols, const std::string& path) {
  if (static_cast<int>(s.size()) != rows)
    throw ValueError(path + ": expected " + std::to_string(rows) + " rows, got " +
                     std::to_string(s.size()));
  Mat m(f, rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(s[static_cast<size_t>(i)].size()) != cols)
      throw ValueError(path + ": expected " + std::to_string(cols) + " columns in row " +
                       std::to_string(i));
    for (int j = 0; j < cols; ++j)
      m.at(i, j) = f.reduce(s[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  }
  return m;
}

inline MatSpec mat_to_spec(const Mat& m) {
  MatSpec s;
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<long long> row;
    for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j));
    s.push_back(std::move(row));
  }
  return s;
}

inline nlohmann::json spec_to_json(const MatSpec& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& row : s) j.push_back(row);
  return j;
}

// Canonical printer: arrays of scalars stay on one line so matrices read as
// rows; object keys come out sorted (nlohmann objects are ordered maps).
inline bool scalar_array(const nlohmann::json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (!e.is_primitive()) return false;
  return true;
}

inline void dump_node(const nlohmann::json& j, std::string& out, int indent) {
  std::string pad(static_cast<size_t>(indent), ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad + "  " + nlohmann::json(it.key()).dump() + ": ";
      dump_node(*it, out, indent + 2);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array() && !j.empty() && !scalar_array(j)) {
    out += "[\n";
    for (size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad + "  ";
      dump_node(j[i], out, indent + 2);
    }
    out += "\n" + pad + "]";
  } else {
    out += j.dump();
  }
}

}  // namespace detail

/******** Parse (syntax) ********/

inline ProblemDocument parse_problem(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() repeats the position; keep one copy computed from the byte offset.
    std::string what = e.what();
    size_t cut = what.find(": ");
    if (cut != std::string::npos) what = what.substr(cut + 2);
    throw ValueError("JSON parse error at " + detail::line_of(text, e.byte) + ": " + what);
  }
  using detail::field_at;
  using detail::int_at;
  using detail::int_row;
  using detail::mat_spec;
  using detail::string_at;
  if (!j.is_object()) throw ValueError("document: expected a JSON object");
  ProblemDocument doc;

  const nlohmann::json& alg = field_at(j, "algebra", "document");
  doc.algebra.p = static_cast<uint32_t>(int_at(field_at(alg, "p", "algebra"), "algebra.p"));
  doc.algebra.dim = static_cast<int>(int_at(field_at(alg, "dim", "algebra"), "algebra.dim"));
  const nlohmann::json& table = field_at(alg, "table", "algebra");
  if (!table.is_array()) throw ValueError("algebra.table: expected an array");
  for (size_t i = 0; i < table.size(); ++i) {
    std::string pi = "algebra.table[" + std::to_string(i) + "]";
    if (!table[i].is_array()) throw ValueError(pi + ": expected an array");
    std::vector<std::vector<long long>> row;
    for (size_t k = 0; k < table[i].size(); ++k)
      row.push_back(int_row(table[i][k], pi + "[" + std::to_string(k) + "]"));
    doc.algebra.table.push_back(std::move(row));
  }
  doc.algebra.unit = int_row(field_at(alg, "unit", "algebra"), "algebra.unit");
  for (const char* key : {"radical", "idempotents"}) {
    const nlohmann::json& rows = field_at(alg, key, "algebra");
    std::string pk = std::string("algebra.") + key;
    if (!rows.is_array()) throw ValueError(pk + ": expected an array");
    auto& dst = std::string(key) == "radical" ? doc.algebra.radical : doc.algebra.idempotents;
    for (size_t i = 0; i < rows.size(); ++i)
      dst.push_back(int_row(rows[i], pk + "[" + std::to_string(i) + "]"));
  }
  if (alg.contains("names"))
    for (size_t i = 0; i < alg["names"].size(); ++i)
      doc.algebra.names.push_back(
          string_at(alg["names"][i], "algebra.names[" + std::to_string(i) + "]"));

  if (j.contains("modules")) {
    const nlohmann::json& mods = j["modules"];
    if (!mods.is_object()) throw ValueError("modules: expected an object");
    for (auto it = mods.begin(); it != mods.end(); ++it) {
      std::string path = "modules." + it.key();
      const nlohmann::json& action = field_at(*it, "action", path);
      if (!action.is_array()) throw ValueError(path + ".action: expected an array");
      std::vector<MatSpec> mats;
      for (size_t i = 0; i < action.size(); ++i)
        mats.push_back(mat_spec(action[i], path + ".action[" + std::to_string(i) + "]"));
      doc.modules.emplace(it.key(), std::move(mats));
    }
  }

  if (j.contains("class")) {
    const nlohmann::json& c = j["class"];
    ClassSpec cs;
    cs.kind = string_at(field_at(c, "kind", "class"), "class.kind");
    if (c.contains("generators"))
      for (size_t i = 0; i < c["generators"].size(); ++i)
        cs.generators.push_back(
            string_at(c["generators"][i], "class.generators[" + std::to_string(i) + "]"));
    doc.cls = std::move(cs);
  }

  if (j.contains("complexes")) {
    const nlohmann::json& cxs = j["complexes"];
    if (!cxs.is_object()) throw ValueError("complexes: expected an object");
    for (auto it = cxs.begin(); it != cxs.end(); ++it) {
      std::string path = "complexes." + it.key();
      ComplexSpec cs;
      cs.lo = static_cast<int>(int_at(field_at(*it, "lo", path), path + ".lo"));
      const nlohmann::json& terms = field_at(*it, "terms", path);
      if (!terms.is_array()) throw ValueError(path + ".terms: expected an array");
      for (size_t i = 0; i < terms.size(); ++i)
        cs.terms.push_back(string_at(terms[i], path + ".terms[" + std::to_string(i) + "]"));
      const nlohmann::json& diffs = field_at(*it, "diffs", path);
      if (!diffs.is_array()) throw ValueError(path + ".diffs: expected an array");
      for (size_t i = 0; i < diffs.size(); ++i)
        cs.diffs.push_back(mat_spec(diffs[i], path + ".diffs[" + std::to_string(i) + "]"));
      doc.complexes.emplace(it.key(), std::move(cs));
    }
  }

  if (j.contains("maps")) {
    const nlohmann::json& ms = j["maps"];
    if (!ms.is_object()) throw ValueError("maps: expected an object");
    for (auto it = ms.begin(); it != ms.end(); ++it) {
      std::string path = "maps." + it.key();
      MapSpec sp;
      sp.source = string_at(field_at(*it, "source", path), path + ".source");
      sp.target = string_at(field_at(*it, "target", path), path + ".target");
      if (it->contains("components")) {
        const nlohmann::json& comps = (*it)["components"];
        if (!comps.is_object()) throw ValueError(path + ".components: expected an object");
        for (auto ct = comps.begin(); ct != comps.end(); ++ct) {
          int deg = 0;
          try {
            size_t used = 0;
            deg = std::stoi(ct.key(), &used);
            if (used != ct.key().size()) throw std::invalid_argument("");
          } catch (const std::exception&) {
            throw ValueError(path + ".components: key '" + ct.key() + "' is not a degree");
          }
          sp.components.emplace(deg, mat_spec(*ct, path + ".components." + ct.key()));
        }
      }
      doc.maps.emplace(it.key(), std::move(sp));
    }
  }

  if (j.contains("params")) {
    const nlohmann::json& p = j["params"];
    if (!p.is_object()) throw ValueError("params: expected an object");
    if (p.contains("depth")) doc.params.depth = static_cast<int>(int_at(p["depth"], "params.depth"));
    if (p.contains("tower_len"))
      doc.params.tower_len = static_cast<int>(int_at(p["tower_len"], "params.tower_len"));
    if (p.contains("tests")) doc.params.tests = static_cast<int>(int_at(p["tests"], "params.tests"));
    if (p.contains("seed"))
      doc.params.seed = static_cast<uint64_t>(int_at(p["seed"], "params.seed"));
    if (p.contains("budget")) doc.params.budget = int_at(p["budget"], "params.budget");
  }

  if (j.contains("targets")) {
    const nlohmann::json& t = j["targets"];
    if (!t.is_object()) throw ValueError("targets: expected an object");
    if (t.contains("complex")) doc.targets.complex = string_at(t["complex"], "targets.complex");
    if (t.contains("module")) doc.targets.module = string_at(t["module"], "targets.module");
    if (t.contains("map")) doc.targets.map = string_at(t["map"], "targets.map");
  }
  return doc;
}

/******** Build (semantics) ********/

inline LoadedProblem build_problem(ProblemDocument doc) {
  LoadedProblem lp;
  lp.algebra = Algebra::create(Field(doc.algebra.p), doc.algebra.dim, doc.algebra.table,
                               doc.algebra.unit, doc.algebra.radical, doc.algebra.idempotents,
                               doc.algebra.names);
  Field f = lp.algebra->field();
  for (const auto& [name, action] : doc.modules) {
    std::string path = "modules." + name;
    if (static_cast<int>(action.size()) != lp.algebra->dim())
      throw ValueError(path + ": need one action matrix per algebra basis element");
    int d = action.empty() ? 0 : static_cast<int>(action[0].size());
    std::vector<Mat> mats;
    for (size_t i = 0; i < action.size(); ++i)
      mats.push_back(detail::build_mat(action[i], f, d, d,
                                       path + ".action[" + std::to_string(i) + "]"));
    lp.modules.emplace(name, Module::create(lp.algebra, std::move(mats)));
  }
  auto module_at = [&](const std::string& name, const std::string& path) -> const Module& {
    auto it = lp.modules.find(name);
    if (it == lp.modules.end()) throw ValueError(path + ": unknown module '" + name + "'");
    return it->second;
  };
  if (doc.cls) {
    if (doc.cls->kind == "projectives") {
      lp.cls = ApproxClass::projectives(lp.algebra);
    } else if (doc.cls->kind == "injectives") {
      lp.cls = ApproxClass::injectives(lp.algebra);
    } else if (doc.cls->kind == "add") {
      std::vector<Module> gens;
      for (size_t i = 0; i < doc.cls->generators.size(); ++i)
        gens.push_back(module_at(doc.cls->generators[i],
                                 "class.generators[" + std::to_string(i) + "]"));
      lp.cls = ApproxClass::add_closure(std::move(gens), lp.algebra);
    } else {
      throw ValueError("class.kind: expected projectives, injectives, or add, got '" +
                       doc.cls->kind + "'");
    }
  }
  for (const auto& [name, spec] : doc.complexes) {
    std::string path = "complexes." + name;
    if (spec.terms.empty()) {
      lp.complexes.emplace(name, Complex::zero_complex(lp.algebra));
      continue;
    }
    if (spec.diffs.size() + 1 != spec.terms.size())
      throw ValueError(path + ": need exactly one diff per adjacent term pair");
    std::vector<Module> terms;
    for (size_t i = 0; i < spec.terms.size(); ++i)
      terms.push_back(module_at(spec.terms[i], path + ".terms[" + std::to_string(i) + "]"));
    std::vector<ModuleMorphism> diffs;
    for (size_t i = 0; i < spec.diffs.size(); ++i)
      diffs.push_back(ModuleMorphism::create(
          terms[i + 1], terms[i],
          detail::build_mat(spec.diffs[i], f, terms[i].dim(), terms[i + 1].dim(),
                            path + ".diffs[" + std::to_string(i) + "]")));
    lp.complexes.emplace(name, Complex::create(lp.algebra, spec.lo, std::move(terms),
                                               std::move(diffs)));
  }
  for (const auto& [name, spec] : doc.maps) {
    std::string path = "maps." + name;
    auto src = lp.complexes.find(spec.source);
    if (src == lp.complexes.end())
      throw ValueError(path + ".source: unknown complex '" + spec.source + "'");
    auto tgt = lp.complexes.find(spec.target);
    if (tgt == lp.complexes.end())
      throw ValueError(path + ".target: unknown complex '" + spec.target + "'");
    std::map<int, Mat> comps;
    for (const auto& [deg, ms] : spec.components)
      comps.emplace(deg, detail::build_mat(ms, f, tgt->second.term(deg).dim(),
                                           src->second.term(deg).dim(),
                                           path + ".components." + std::to_string(deg)));
    lp.maps.emplace(name, ChainMap::create(src->second, tgt->second, std::move(comps)));
  }
  for (const auto& [what, name] :
       std::vector<std::pair<std::string, std::string>>{{"complex", doc.targets.complex},
                                                        {"module", doc.targets.module},
                                                        {"map", doc.targets.map}}) {
    if (name.empty()) continue;
    bool ok = what == "complex" ? lp.complexes.count(name) > 0
              : what == "module" ? lp.modules.count(name) > 0
                                 : lp.maps.count(name) > 0;
    if (!ok) throw ValueError("targets." + what + ": unknown " + what + " '" + name + "'");
  }
  lp.doc = std::move(doc);
  return lp;
}

inline LoadedProblem load_problem(const std::string& text) {
  return build_problem(parse_problem(text));
}

/******** Serialize (canonical form) ********/

// Canonical: object keys sorted, matrix entries reduced to [0, p), params
// always explicit, empty sections omitted. serialize . parse is idempotent.
inline std::string serialize_problem(const ProblemDocument& doc) {
  Field f(doc.algebra.p);
  nlohmann::json j;
  nlohmann::json alg;
  alg["p"] = doc.algebra.p;
  alg["dim"] = doc.algebra.dim;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : doc.algebra.table) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& cell : row) {
      std::vector<long long> c;
      for (long long v : cell) c.push_back(f.reduce(v));
      r.push_back(c);
    }
    table.push_back(std::move(r));
  }
  alg["table"] = std::move(table);
  auto reduce_row = [&](const std::vector<long long>& row) {
    std::vector<long long> out;
    for (long long v : row) out.push_back(f.reduce(v));
    return out;
  };
  alg["unit"] = reduce_row(doc.algebra.unit);
  nlohmann::json rad = nlohmann::json::array(), idem = nlohmann::json::array();
  for (const auto& r : doc.algebra.radical) rad.push_back(reduce_row(r));
  for (const auto& e : doc.algebra.idempotents) idem.push_back(reduce_row(e));
  alg["radical"] = std::move(rad);
  alg["idempotents"] = std::move(idem);
  if (!doc.algebra.names.empty()) alg["names"] = doc.algebra.names;
  j["algebra"] = std::move(alg);

  if (!doc.modules.empty()) {
    nlohmann::json mods;
    for (const auto& [name, action] : doc.modules) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& m : action) {
        MatSpec red;
        for (const auto& row : m) red.push_back(reduce_row(row));
        a.push_back(detail::spec_to_json(red));
      }
      mods[name] = {{"action", std::move(a)}};
    }
    j["modules"] = std::move(mods);
  }
  if (doc.cls) {
    nlohmann::json c;
    c["kind"] = doc.cls->kind;
    if (!doc.cls->generators.empty()) c["generators"] = doc.cls->generators;
    j["class"] = std::move(c);
  }
  if (!doc.complexes.empty()) {
    nlohmann::json cxs;
    for (const auto& [name, spec] : doc.complexes) {
      nlohmann::json c;
      c["lo"] = spec.lo;
      c["terms"] = spec.terms;
      nlohmann::json diffs = nlohmann::json::array();
      for (const auto& m : spec.diffs) {
        MatSpec red;
        for (const auto& row : m) red.push_back(reduce_row(row));
        diffs.push_back(detail::spec_to_json(red));
      }
      c["diffs"] = std::move(diffs);
      cxs[name] = std::move(c);
    }
    j["complexes"] = std::move(cxs);
  }
  if (!doc.maps.empty()) {
    nlohmann::json ms;
    for (const auto& [name, spec] : doc.maps) {
      nlohmann::json m;
      m["source"] = spec.source;
      m["target"] = spec.target;
      nlohmann::json comps;
      for (const auto& [deg, mat] : spec.components) {
        MatSpec red;
        for (const auto& row : mat) red.push_back(reduce_row(row));
        comps[std::to_string(deg)] = detail::spec_to_json(red);
      }
      m["components"] = comps.is_null() ? nlohmann::json::object() : std::move(comps);
      ms[name] = std::move(m);
    }
    j["maps"] = std::move(ms);
  }
  j["params"] = {{"budget", doc.params.budget},
                 {"depth", doc.params.depth},
                 {"seed", doc.params.seed},
                 {"tests", doc.params.tests},
                 {"tower_len", doc.params.tower_len}};
  nlohmann::json t;
  if (!doc.targets.complex.empty()) t["complex"] = doc.targets.complex;
  if (!doc.targets.module.empty()) t["module"] = doc.targets.module;
  if (!doc.targets.map.empty()) t["map"] = doc.targets.map;
  if (!t.is_null()) j["targets"] = std::move(t);
  std::string out;
  detail::dump_node(j, out, 0);
  return out + "\n";
}

}  // namespace homx
