#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "homx/complex.hpp"

namespace homx {

/******** Ladder diagrams ********/

// Commutative ladders rendered as DOT: one row per complex, one column per
// degree (descending left to right, following the differentials), solid
// edges for given maps and dashed edges for constructed lifts.

struct LadderRow {
  std::string name;
  Complex c;
};

struct LadderArrow {
  size_t from_row = 0, to_row = 0;
  ChainMap map;
  std::string symbol;
  bool dashed = false;
};

namespace detail {

inline std::string dot_node_id(size_t row, int degree) {
  std::string d = degree < 0 ? "m" + std::to_string(-degree) : std::to_string(degree);
  return "r" + std::to_string(row) + "_" + d;
}

}  // namespace detail

inline std::string ladder_dot(const std::vector<LadderRow>& rows,
                              const std::vector<LadderArrow>& arrows) {
  if (rows.empty()) throw ValueError("ladder needs at least one row");
  int lo = 0, hi = -1;
  bool any = false;
  for (const LadderRow& r : rows) {
    if (r.c.is_zero()) continue;
    lo = any ? std::min(lo, r.c.lo()) : r.c.lo();
    hi = any ? std::max(hi, r.c.hi()) : r.c.hi();
    any = true;
  }
  std::ostringstream out;
  out << "digraph ladder {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box, fontname=\"monospace\"];\n";
  out << "  edge [fontname=\"monospace\"];\n";
  auto present = [&](size_t ri, int n) {
    const Complex& c = rows[ri].c;
    return !c.is_zero() && n >= c.lo() && n <= c.hi() && c.term(n).dim() > 0;
  };
  for (size_t ri = 0; ri < rows.size(); ++ri) {
    out << "  subgraph row_" << ri << " {\n";
    for (int n = hi; any && n >= lo; --n) {
      if (!present(ri, n)) continue;
      out << "    " << detail::dot_node_id(ri, n) << " [label=\"" << rows[ri].name << "_" << n
          << " (" << rows[ri].c.term(n).dim() << ")\"];\n";
    }
    out << "  }\n";
  }
  // Columns: same rank per degree so the ladder stays a grid.
  for (int n = hi; any && n >= lo; --n) {
    std::vector<std::string> ids;
    for (size_t ri = 0; ri < rows.size(); ++ri)
      if (present(ri, n)) ids.push_back(detail::dot_node_id(ri, n));
    if (ids.size() < 2) continue;
    out << "  { rank=same;";
    for (const std::string& id : ids) out << " " << id << ";";
    out << " }\n";
  }
  // Differentials along each row.
  for (size_t ri = 0; ri < rows.size(); ++ri)
    for (int n = hi; any && n > lo; --n) {
      if (!present(ri, n) || !present(ri, n - 1)) continue;
      if (rows[ri].c.diff(n).mat().is_zero()) continue;
      out << "  " << detail::dot_node_id(ri, n) << " -> " << detail::dot_node_id(ri, n - 1)
          << " [label=\"d\"];\n";
    }
  // Rungs: one component edge per degree where both endpoints exist.
  for (const LadderArrow& a : arrows) {
    if (a.from_row >= rows.size() || a.to_row >= rows.size())
      throw ValueError("ladder arrow references a missing row");
    for (int n = hi; any && n >= lo; --n) {
      if (!present(a.from_row, n) || !present(a.to_row, n)) continue;
      out << "  " << detail::dot_node_id(a.from_row, n) << " -> "
          << detail::dot_node_id(a.to_row, n) << " [label=\"" << a.symbol << "_" << n
          << "\", constraint=false";
      if (a.dashed) out << ", style=dashed";
      if (a.map.component(n).is_zero()) out << ", color=gray";
      out << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

// The common two-row ladder of a single chain map.
inline std::string map_dot(const std::string& source_name, const std::string& target_name,
                           const ChainMap& phi, const std::string& symbol,
                           bool dashed = false) {
  return ladder_dot({{source_name, phi.source()}, {target_name, phi.target()}},
                    {{0, 1, phi, symbol, dashed}});
}

}  // namespace homx
