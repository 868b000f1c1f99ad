#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mua/rational.hpp"

namespace mua {

enum class Sense { less_equal, equal, greater_equal };

struct LpTerm {
  std::size_t var;
  Rational coef;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational objective;
  std::vector<Rational> x;
};

// Exact linear program over non-negative variables:
//   maximize c.x  subject to  a_r.x (<=|=|>=) b_r,  x >= 0.
// Two-phase dense tableau simplex with Bland's rule, in rational
// arithmetic throughout. solve_approx() runs the same algorithm in double
// precision and is only meant for cheap screening.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t variables) : vars_(variables) {}

  std::size_t variables() const { return vars_; }
  std::size_t constraints() const { return rows_.size(); }

  void add(std::vector<LpTerm> terms, Sense sense, Rational rhs);
  void maximize(std::vector<LpTerm> objective) {
    objective_ = std::move(objective);
    minimizing_ = false;
  }
  void minimize(std::vector<LpTerm> objective);
  void clear_objective() {
    objective_.clear();
    minimizing_ = false;
  }

  LpResult solve() const;
  // Status only; objective/x are double-rounded into Rationals.
  LpStatus solve_approx() const;

  // Exact check that `y` (one multiplier per constraint, rounded to nearby
  // rationals) is a Farkas certificate of infeasibility.
  bool certifies_infeasible(const std::vector<double>& y) const;

 private:
  struct Row {
    std::vector<LpTerm> terms;
    Sense sense;
    Rational rhs;
  };
  template <typename T>
  friend class Simplex;

  std::size_t vars_;
  std::vector<Row> rows_;
  std::vector<LpTerm> objective_;
  bool minimizing_ = false;
};

}  // namespace mua
