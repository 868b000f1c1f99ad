#pragma once

#include <vector>

#include "mua/instance.hpp"

namespace mua {

// One water-filling round: every agent in `frozen` was fixed at `level`.
struct LeximinPhase {
  Rational level;
  AgentSet frozen;
};

struct LeximinResult {
  UtilityProfile utilities;
  std::vector<LeximinPhase> phases;
  // Realizing RAM from the deterministic flow (document order).
  AssignmentMatrix ram;
};

// Egalitarian solution: the leximin-maximal efficient utility profile.
//
// Water-filling over the polymatroid of efficient profiles. All unfrozen
// agents share a level; the largest feasible level is located by Newton
// (Dinkelbach) steps on violated min-cuts of the feasibility network, and
// the maximal tight set at that level is frozen. Each round freezes at
// least one agent.
LeximinResult es(const Instance& inst);

// Refined egalitarian solution: perfect objects go in full to their
// acceptors; ES runs on the over-demanded objects alone. The partition is
// taken once on the given instance.
UtilityProfile es_star(const Instance& inst);

// Each object split equally among its acceptors.
UtilityProfile epo(const Instance& inst);

// Serial dictatorship: in `order`, each agent takes one unit of every
// acceptable object that still has (effective) capacity.
AssignmentMatrix priority(const Instance& inst, const std::vector<std::size_t>& order);

// Exact average of priority utilities over all n! orders. Refuses with
// CapExceeded above max_agents.
UtilityProfile random_priority_profile(const Instance& inst, std::size_t max_agents = 8);

// gamma(U): the profile sorted ascending.
UtilityProfile sorted_ascending(UtilityProfile u);

// Leximin comparison: <0, 0, >0 as gamma(a) is lexicographically below,
// equal to, or above gamma(b).
int leximin_compare(const UtilityProfile& a, const UtilityProfile& b);

}  // namespace mua
