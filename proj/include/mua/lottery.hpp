#pragma once

#include <cstdint>
#include <vector>

#include "mua/io.hpp"

namespace mua {

struct LotteryComponent {
  Rational weight;
  AssignmentMatrix matrix;  // binary, feasible, IR
};

// Convex combination of binary RAMs. Weights are positive and sum to 1.
struct Lottery {
  std::vector<LotteryComponent> components;
};

// Writes a feasible, IR RAM as a lottery over binary feasible RAMs.
//
// Peels one extreme point per step: cells already 0 or 1 keep their value,
// and in each column the ceil(s_k) largest fractional cells (s_k = that
// column's fractional mass) are set to 1. The step length is the largest
// that keeps the remainder in [0,1]; it turns at least one fractional cell
// integral, so there are at most (fractional cells + 1) components.
// Individual components need not be efficient. Throws InputError for an
// infeasible or non-IR ram.
Lottery decompose(const Instance& inst, const AssignmentMatrix& ram);

// Sum of weight * matrix.
AssignmentMatrix reconstruct(const Lottery& lottery);

// Draws one component with probability equal to its weight; the uniform
// draw is a 64-bit mt19937_64 output compared exactly against cumulative
// weights.
const AssignmentMatrix& sample(const Lottery& lottery, std::uint64_t seed);

// [{"weight": "1/5", "assignment": {"a": ["alpha"], ...}}, ...]
Json lottery_to_json(const Instance& inst, const Lottery& lottery);
Json binary_assignment_to_json(const Instance& inst, const AssignmentMatrix& z);

}  // namespace mua
