#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "homx/errors.hpp"
#include "homx/matrix.hpp"

namespace homx {

// Ordered audit log of a construction: every intermediate matrix is recorded
// under its symbol (nu, theta, r, s, t, lambda, ...) together with the
// commutative squares the construction relies on. Squares are checked when
// recorded and can be re-checked wholesale, so a finished trace is a
// certificate, not just a log.

struct TraceStep {
  std::string symbol;
  int stage;
  int degree;
  Mat payload;
  std::string note;
};

struct TraceSquare {
  std::string what;
  Mat lhs, rhs;
};

class Trace {
 public:
  void step(std::string symbol, int stage, int degree, Mat payload, std::string note = "") {
    steps_.push_back({std::move(symbol), stage, degree, std::move(payload), std::move(note)});
  }

  // Records an asserted equality and fails fast if it does not hold.
  void square(const std::string& what, const Mat& lhs, const Mat& rhs) {
    if (lhs != rhs) throw CheckError("asserted square does not commute: " + what);
    squares_.push_back({what, lhs, rhs});
  }

  // Re-checks every recorded square; a finished construction calls this once.
  void finalize() {
    for (const TraceSquare& s : squares_)
      if (s.lhs != s.rhs) throw CheckError("recorded square no longer commutes: " + s.what);
    finalized_ = true;
  }

  bool finalized() const { return finalized_; }
  const std::vector<TraceStep>& steps() const { return steps_; }
  const std::vector<TraceSquare>& squares() const { return squares_; }

  void absorb(Trace other) {
    for (auto& s : other.steps_) steps_.push_back(std::move(s));
    for (auto& q : other.squares_) squares_.push_back(std::move(q));
  }

  // Deterministic text form; byte-identical replays are part of the contract.
  std::string to_text() const {
    std::ostringstream out;
    for (const TraceStep& s : steps_) {
      out << s.symbol << " stage=" << s.stage << " degree=" << s.degree << " "
          << s.payload.rows() << "x" << s.payload.cols() << " [";
      for (int i = 0; i < s.payload.rows(); ++i)
        for (int j = 0; j < s.payload.cols(); ++j) {
          if (i || j) out << ",";
          out << s.payload.at(i, j);
        }
      out << "]";
      if (!s.note.empty()) out << " ; " << s.note;
      out << "\n";
    }
    out << "squares=" << squares_.size() << " finalized=" << (finalized_ ? 1 : 0) << "\n";
    return out.str();
  }

 private:
  std::vector<TraceStep> steps_;
  std::vector<TraceSquare> squares_;
  bool finalized_ = false;
};

}  // namespace homx
