#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mua/instance.hpp"

namespace mua {

using PriceVector = std::vector<Rational>;

// Utility-maximizing purchase of one agent with a unit budget.
struct DemandSummary {
  bool satiated = false;
  // Bought in full (free objects first, then whole cheaper price classes).
  std::vector<std::size_t> full;
  // The equal-priced class the budget runs out in; how the quantity is
  // spread inside the class is left to market clearing.
  std::vector<std::size_t> marginal_class;
  Rational marginal_price;
  Rational marginal_quantity;
  Rational spend;

  Rational utility() const { return Rational(full.size()) + marginal_quantity; }
};

DemandSummary demand(const Instance& inst, std::size_t agent, const PriceVector& prices);

struct Equilibrium {
  AssignmentMatrix ram;
  PriceVector prices;
  // Names of the conditions that were checked and passed.
  std::vector<std::string> certificate;

  UtilityProfile utilities() const { return ram.utilities(); }
};

// First failed equilibrium condition, with every witness for that clause.
struct Violation {
  std::string clause;
  std::vector<std::size_t> agents;
  std::vector<std::size_t> objects;
  std::string message;
};

using Verification = std::variant<Equilibrium, Violation>;

// Clause names, in checking order.
namespace clause {
inline constexpr const char* kFeasibility = "feasibility";
inline constexpr const char* kAffordability = "affordability";
inline constexpr const char* kOptimality = "optimality";
inline constexpr const char* kPositivePrices = "over-demanded-price-positive";
inline constexpr const char* kEqualMarginalPrices = "equal-prices-on-partial-objects";
inline constexpr const char* kCheaperFirst = "cheaper-objects-bought-first";
inline constexpr const char* kBudgetExhaustion = "unsatiated-budget-exhausted";
inline constexpr const char* kMarketClearing = "market-clearing";
}  // namespace clause

// Exact check of every competitive-equilibrium condition for (ram, prices).
Verification cce_verify(const Instance& inst, const AssignmentMatrix& ram, const PriceVector& prices);

struct PriceSupport {
  bool feasible = false;
  PriceVector prices;
  // Infeasible: why, plus the individual constraints that already clash
  // with the forced price equalities.
  std::string reason;
  std::vector<std::string> conflicts;
};

// Prices (if any) that make `ram` a competitive equilibrium. With the RAM
// fixed every condition is linear in the prices, so this is one exact LP.
PriceSupport supporting_prices(const Instance& inst, const AssignmentMatrix& ram);

struct CceCaps {
  // Objects anyone accepts; the search enumerates their ordered partitions.
  std::size_t max_objects = 7;
  // Candidate patterns handed to the LP before giving up.
  std::size_t max_patterns = 500000;
  // Restrict to equilibria where every perfect object carries one common
  // price. Not part of the equilibrium definition; a diagnostic lens.
  bool tie_perfect_prices = false;
};

// A consumption signature: objects ordered into price classes (ascending,
// equal prices inside a class) and, per preference type, the class in
// which its budget runs out (-1 = satiated).
struct CcePattern {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<int> marginal;
};

Equilibrium cce_find(const Instance& inst, const CceCaps& caps = {});

struct Interval {
  Rational lo;
  Rational hi;
  bool degenerate() const { return lo == hi; }
};

struct CceRange {
  std::vector<Interval> utilities;  // per agent
  std::vector<Interval> prices;     // per object
  // Verified equilibria attaining utilities[i].lo and .hi.
  std::vector<Equilibrium> lower_witness;
  std::vector<Equilibrium> upper_witness;
  std::size_t patterns_enumerated = 0;
  std::size_t patterns_feasible = 0;
};

// Per-agent utility bounds over every equilibrium reachable through an
// enumerated pattern. Complete relative to the enumeration only.
CceRange cce_utility_range(const Instance& inst, const CceCaps& caps = {});

// Same bounds for the listed agents only (indexed by position in
// `members`); prices are not bracketed.
CceRange cce_member_range(const Instance& inst, const AgentSet& members, const CceCaps& caps = {});

// An equilibrium in which every member reaches at least its floor and at
// least one member exceeds it, if one exists.
std::optional<Equilibrium> cce_find_dominating(const Instance& inst, const AgentSet& members,
                                               const UtilityProfile& floors,
                                               const CceCaps& caps = {});

// Perfect objects priced at zero and handed to all their acceptors; the
// over-demanded sub-market is solved by cce_find.
Equilibrium cce_ipo_selection(const Instance& inst, const CceCaps& caps = {});

}  // namespace mua
