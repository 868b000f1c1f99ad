#pragma once

#include <cstdint>
#include <string>

#include "mua/instance.hpp"

namespace mua {

// Outcome of the max-flow membership test for a utility vector.
struct FeasibilityCertificate {
  bool feasible = false;
  // Realizing RAM (row sums equal the queried vector); only when feasible.
  AssignmentMatrix witness;
  // Feasible: the maximal tight set (agents whose utility cannot grow).
  // Infeasible: the maximal source side of a minimum cut, a coalition S
  // with sum_{i in S} U_i > mu(S).
  AgentSet tight_set;
};

// mu(S) = sum_k min(|R_Sk|, q_k): the most units S can hold jointly.
long coalition_value(const Instance& inst, const AgentSet& coalition);
// Same, with the coalition as a bitmask (requires n <= 64).
long coalition_value(const Instance& inst, std::uint64_t coalition);

// Decides whether some feasible, individually rational RAM has row sums
// exactly `u`. A u_i above |R_iM| is simply infeasible (the tight set then
// contains i); a negative u_i throws std::invalid_argument.
FeasibilityCertificate feasible_utilities(const Instance& inst, const UtilityProfile& u);

struct CoreCheck {
  bool in_core = false;
  // Empty when the failure is sum(U) != nu. Otherwise the coalition with
  // the largest excess U(S) - mu(S) (lexicographically smallest on ties).
  AgentSet violating;
  Rational excess;
  std::string reason;
};

// Membership in {x : sum x = nu, x(S) <= mu(S) for all S}. Enumerates all
// 2^n coalitions; refuses with CapExceeded when n > max_agents.
CoreCheck core_from_above_check(const Instance& inst, const UtilityProfile& u,
                                std::size_t max_agents = 20);

}  // namespace mua
