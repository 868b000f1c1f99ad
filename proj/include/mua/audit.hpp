#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mua/competitive.hpp"

namespace mua {

enum class LorenzRelation { dominates, dominated, equal, incomparable };

std::string to_string(LorenzRelation r);

struct LorenzVerdict {
  LorenzRelation relation = LorenzRelation::equal;
  // 1-based prefix length: first strict prefix for (strict) dominance; for
  // incomparable, the first prefix contradicting the earlier direction.
  std::size_t witness = 0;
};

// Prefix sums of the ascending sorts, compared exactly.
LorenzVerdict lorenz_compare(const UtilityProfile& u, const UtilityProfile& v);

struct LorenzTestReport {
  std::size_t trials = 0;
  std::size_t counterexamples = 0;
  std::optional<UtilityProfile> first_counterexample;
  std::optional<LorenzVerdict> first_verdict;
  bool passed() const { return counterexamples == 0; }
};

// Samples random efficient profiles (greedy polymatroid vertices in random
// agent orders, rational convex combinations of them, then Pigou-Dalton
// transfers kept inside the feasible set by the flow oracle) and checks that
// `u` weakly Lorenz dominates each one.
LorenzTestReport lorenz_dominance_test(const Instance& inst, const UtilityProfile& u, std::size_t trials,
                                       std::uint64_t seed);

// One random efficient profile, as used by lorenz_dominance_test.
UtilityProfile random_efficient_profile(const Instance& inst, std::mt19937_64& rng);

struct EnvyViolation {
  std::size_t i;
  std::size_t j;
  bool equal_sets;  // R_iM == R_jM but utilities differ
};

struct EnvyReport {
  std::vector<EnvyViolation> violations;
  bool passed() const { return violations.empty(); }
};

// R_iM subset of R_jM must imply U_i <= U_j.
EnvyReport envy_check(const Instance& inst, const UtilityProfile& u);

using SolutionFn = std::function<UtilityProfile(const Instance&)>;

struct IpoRow {
  std::size_t agent;
  Rational before;
  Rational after;
  bool passed() const { return after == before + Rational(1); }
};

struct IpoReport {
  std::vector<IpoRow> rows;
  bool passed() const;
};

// Adds a perfect object accepted exactly by `acceptors` and checks that each
// acceptor's utility rises by exactly one.
IpoReport ipo_check(const Instance& inst, const SolutionFn& solve, const AgentSet& acceptors);

enum class SolverKind { es, es_star, epo, priority, cce };

std::string to_string(SolverKind k);

struct ManipulationOptions {
  std::size_t max_coalition = 3;
  // Distinct misreported instances evaluated before stopping with partial
  // coverage.
  std::size_t max_evaluations = std::size_t{1} << 20;
  // Restrict the search to one coalition (all members must be listed).
  std::optional<AgentSet> coalition;
  std::vector<std::size_t> priority_order;  // for SolverKind::priority
  CceCaps cce_caps;
  unsigned jobs = 1;
};

struct ManipulationWitness {
  AgentSet coalition;
  std::vector<std::vector<std::size_t>> dropped;  // per member, object indices
  Instance misreport;
  UtilityProfile truthful;
  UtilityProfile manipulated;
  // Set-valued case: per-agent ranges on both sides.
  std::vector<Interval> truthful_range;
  std::vector<Interval> manipulated_range;
  std::optional<Equilibrium> equilibrium;  // improving manipulated equilibrium
};

struct ManipulationReport {
  SolverKind solver = SolverKind::es;
  // Single-valued solvers use `found`. For the equilibrium correspondence,
  // `found` is the weak notion (some manipulated equilibrium beats every
  // truthful one) and `found_strong` the strong one (every manipulated
  // equilibrium is weakly better than every truthful one, some strictly).
  std::optional<ManipulationWitness> found;
  std::optional<ManipulationWitness> found_strong;
  std::size_t search_space = 0;  // joint misreports before pruning
  std::size_t examined = 0;      // joint misreports after pruning
  std::size_t evaluations = 0;   // distinct misreported instances solved
  bool complete = true;          // false: a cap cut the search short
  std::string coverage_note;
};

// Exhaustive search for a coalition (size <= max_coalition) and an
// understating misreport under which every member weakly gains and one
// strictly gains. Coalitions are visited by size, then lexicographically;
// misreports by total number of dropped objects, then lexicographically.
// A member whose report cannot keep as many acceptable objects as its
// truthful utility cannot gain and is never asked to drop.
ManipulationReport manipulation_search(const Instance& inst, SolverKind solver,
                                       const ManipulationOptions& opts = {});

struct BossyViolation {
  std::size_t agent;
  std::vector<std::size_t> dropped;
  UtilityProfile before;
  UtilityProfile after;
};

struct PerfectDropRow {
  std::size_t agent;
  std::size_t object;
  Rational before;
  Rational after;
  bool passed() const { return after < before; }
};

struct NonbossyReport {
  std::vector<BossyViolation> violations;
  // Dropping an acceptable perfect object must strictly cost the dropper.
  std::vector<PerfectDropRow> perfect_drops;
  std::size_t examined = 0;
  bool complete = true;
  bool passed() const;
};

// Every individual understatement that leaves the agent's ES utility
// unchanged must leave the whole ES profile unchanged.
NonbossyReport nonbossy_check(const Instance& inst, std::size_t max_evaluations = std::size_t{1} << 20);

// Seeded random instance. Each cell is acceptable when a 64-bit draw
// modulo den(density) falls below num(density); empty columns get one
// random acceptor; capacities are uniform in [1, |R_Nk|].
Instance random_instance(std::size_t n, std::size_t m, const Rational& density, std::uint64_t seed);

// Profile of a single-valued solver on an instance.
SolutionFn solver_function(SolverKind kind, const std::vector<std::size_t>& priority_order = {});

}  // namespace mua
