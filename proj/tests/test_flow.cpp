#include <doctest.h>

#include <random>

#include "mua/audit.hpp"
#include "mua/egalitarian.hpp"
#include "mua/fixtures.hpp"
#include "mua/flow.hpp"
#include "util.hpp"

using namespace mua;
using testutil::R;

namespace {

// Exhaustive polymatroid description: every coalition within its value
// and the total within the matching size.
bool polymatroid_member(const Instance& inst, const UtilityProfile& u) {
  const std::size_t n = inst.agent_count();
  Rational total;
  for (const auto& x : u) total += x;
  if (total > Rational(matching_size(inst))) return false;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
    Rational sum;
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1) sum += u[i];
    if (sum > Rational(coalition_value(inst, s))) return false;
  }
  return true;
}

// Maximum units a coalition can hold, by brute force over binary
// assignments (tiny instances only).
long brute_value(const Instance& inst, const AgentSet& s) {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i : s)
    for (std::size_t k = 0; k < inst.object_count(); ++k)
      if (inst.accepts(i, k)) cells.push_back({i, k});
  long best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells.size()); ++mask) {
    std::vector<long> used(inst.object_count(), 0);
    long count = 0;
    bool ok = true;
    for (std::size_t c = 0; c < cells.size() && ok; ++c) {
      if (!(mask >> c & 1)) continue;
      if (++used[cells[c].second] > inst.capacity(cells[c].second)) ok = false;
      ++count;
    }
    if (ok) best = std::max(best, count);
  }
  return best;
}

}  // namespace

TEST_CASE("coalition_value on the first example") {
  const Instance inst = fixtures::ex1();
  CHECK(coalition_value(inst, AgentSet{5}) == 1);
  CHECK(coalition_value(inst, AgentSet{0, 1, 2, 3, 4, 5}) == 12);
  CHECK(coalition_value(inst, AgentSet{4, 5}) == 3);
  CHECK(brute_value(inst, {4, 5}) == 3);
  CHECK(coalition_value(inst, AgentSet{}) == 0);
  CHECK(coalition_value(inst, std::uint64_t{0b110000}) == 3);
}

TEST_CASE("coalition_value closed form matches brute force") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(3, 3, R(1, 2), seed);
    for (std::uint64_t s = 0; s < 8; ++s) {
      AgentSet set;
      for (std::size_t i = 0; i < 3; ++i)
        if (s >> i & 1) set.push_back(i);
      CHECK(coalition_value(inst, set) == brute_value(inst, set));
    }
  }
}

TEST_CASE("coalition_value is monotone and submodular") {
  std::mt19937_64 rng(99);
  std::size_t pairs = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = random_instance(8, 5, R(1, 2), seed);
    const std::uint64_t full = (std::uint64_t{1} << 8) - 1;
    for (int t = 0; t < 1000; ++t, ++pairs) {
      const std::uint64_t s = rng() & full, u = rng() & full;
      CHECK(coalition_value(inst, s) + coalition_value(inst, u) >=
            coalition_value(inst, s | u) + coalition_value(inst, s & u));
      CHECK(coalition_value(inst, s) <= coalition_value(inst, s | u));
    }
  }
  CHECK(pairs == 10000);
}

TEST_CASE("feasible_utilities on the first example") {
  const Instance inst = fixtures::ex1();
  const UtilityProfile es_profile = {R(9, 4), R(9, 4), R(9, 4), R(9, 4), R(2), R(1)};
  const FeasibilityCertificate ok = feasible_utilities(inst, es_profile);
  REQUIRE(ok.feasible);
  CHECK(ok.witness.utilities() == es_profile);
  CHECK(ram_violation(inst, ok.witness).empty());

  const FeasibilityCertificate over = feasible_utilities(inst, {R(3), R(3), R(3), R(3), R(2), R(1)});
  CHECK_FALSE(over.feasible);
  CHECK(over.tight_set == AgentSet{0, 1, 2, 3, 4, 5});

  const FeasibilityCertificate f = feasible_utilities(inst, {0, 0, 0, 0, 0, R(1)});
  CHECK(f.feasible);
  const FeasibilityCertificate f2 = feasible_utilities(inst, {0, 0, 0, 0, 0, R(2)});
  CHECK_FALSE(f2.feasible);
  CHECK(f2.tight_set == AgentSet{5});
  CHECK_THROWS_AS(feasible_utilities(inst, {0, 0, 0, 0, 0, R(-1)}), std::invalid_argument);
}

TEST_CASE("feasible_utilities: infeasible certificate is a violated coalition") {
  const Instance inst = fixtures::ex1();
  const UtilityProfile u = {R(3), R(3), R(3), R(3), R(1, 2), 0};
  const FeasibilityCertificate c = feasible_utilities(inst, u);
  REQUIRE_FALSE(c.feasible);
  Rational sum;
  for (std::size_t i : c.tight_set) sum += u[i];
  CHECK(sum > Rational(coalition_value(inst, c.tight_set)));
}

TEST_CASE("feasible_utilities agrees with the polymatroid description") {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 9;
    const Instance inst = random_instance(n, 1 + seed % 5, R(1, 2), seed);
    for (int t = 0; t < 20; ++t) {
      UtilityProfile u(n);
      for (std::size_t i = 0; i < n; ++i)
        u[i] = Rational(static_cast<long>(rng() % (4 * static_cast<std::uint64_t>(inst.row_size(i)) + 1)), 4);
      const FeasibilityCertificate c = feasible_utilities(inst, u);
      CHECK(c.feasible == polymatroid_member(inst, u));
      if (c.feasible) {
        CHECK(c.witness.utilities() == u);
        CHECK(ram_violation(inst, c.witness).empty());
        // Monotone: halving stays feasible.
        UtilityProfile half = u;
        for (auto& x : half) x *= R(1, 2);
        CHECK(feasible_utilities(inst, half).feasible);
      }
    }
  }
}

TEST_CASE("core_from_above_check") {
  const Instance ex1 = fixtures::ex1();
  CHECK(core_from_above_check(ex1, es(ex1).utilities).in_core);
  const CoreCheck bad = core_from_above_check(ex1, {R(12), 0, 0, 0, 0, 0});
  CHECK_FALSE(bad.in_core);
  CHECK(bad.violating == AgentSet{0});
  CHECK(bad.excess == R(9));
  CHECK_FALSE(core_from_above_check(ex1, {R(1), 0, 0, 0, 0, 0}).in_core);

  const Instance ex2 = fixtures::ex2();
  CHECK(core_from_above_check(ex2, {R(2), R(2), R(2), R(5, 2), R(5, 2), R(13, 4), R(13, 4), R(13, 4), R(13, 4)}).in_core);
  CHECK_THROWS_AS(core_from_above_check(ex2, es(ex2).utilities, 8), CapExceeded);
}

TEST_CASE("ES profiles lie in the core from above") {
  for (const Instance& inst : {fixtures::ex1(), fixtures::ex2(), fixtures::ex3(), fixtures::ex4()})
    CHECK(core_from_above_check(inst, es(inst).utilities).in_core);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(4 + seed % 9, 2 + seed % 4, R(1, 2), seed);
    CHECK(core_from_above_check(inst, es(inst).utilities).in_core);
  }
}
