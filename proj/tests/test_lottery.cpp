#include <doctest.h>

#include <map>
#include <set>

#include "mua/audit.hpp"
#include "mua/competitive.hpp"
#include "mua/egalitarian.hpp"
#include "mua/fixtures.hpp"
#include "mua/lottery.hpp"
#include "util.hpp"

using namespace mua;
using testutil::R;

namespace {

std::size_t fractional_cells(const AssignmentMatrix& z) {
  std::size_t f = 0;
  for (std::size_t i = 0; i < z.agents(); ++i)
    for (std::size_t k = 0; k < z.objects(); ++k)
      if (!z.at(i, k).is_integer()) ++f;
  return f;
}

void check_lottery(const Instance& inst, const AssignmentMatrix& ram) {
  const Lottery l = decompose(inst, ram);
  CHECK(reconstruct(l) == ram);
  Rational total;
  for (const auto& c : l.components) {
    CHECK(c.weight.sign() > 0);
    CHECK(c.matrix.is_binary());
    CHECK(ram_violation(inst, c.matrix).empty());
    total += c.weight;
  }
  CHECK(total == R(1));
  CHECK(l.components.size() <= fractional_cells(ram) + 1);
}

}  // namespace

TEST_CASE("decompose: one-object market gives five equal components") {
  const Instance inst = fixtures::ex4();
  const Lottery l = decompose(inst, es(inst).ram);
  REQUIRE(l.components.size() == 5);
  std::set<std::size_t> excluded;
  for (const auto& c : l.components) {
    CHECK(c.weight == R(1, 5));
    CHECK(c.matrix.column_sum(0) == R(4));
    for (std::size_t i = 0; i < 5; ++i)
      if (c.matrix.at(i, 0).is_zero()) excluded.insert(i);
  }
  CHECK(excluded.size() == 5);
}

TEST_CASE("decompose reconstructs corpus RAMs") {
  for (const Instance& inst : {fixtures::ex1(), fixtures::ex2(), fixtures::ex3(), fixtures::ex3_misreport(),
                               fixtures::ex4()}) {
    check_lottery(inst, es(inst).ram);
  }
  const Instance ex1 = fixtures::ex1();
  check_lottery(ex1, cce_find(ex1).ram);
  check_lottery(fixtures::ex3(), cce_find(fixtures::ex3()).ram);
}

TEST_CASE("decompose: binary RAM is its own lottery") {
  const Instance inst = fixtures::ex1();
  const AssignmentMatrix z = priority(inst, {0, 1, 2, 3, 4, 5});
  const Lottery l = decompose(inst, z);
  REQUIRE(l.components.size() == 1);
  CHECK(l.components[0].weight == R(1));
  CHECK(l.components[0].matrix == z);
}

TEST_CASE("decompose: random feasible RAMs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = random_instance(2 + seed % 6, 1 + seed % 4, R(1, 2), seed);
    check_lottery(inst, es(inst).ram);
    // A sub-efficient RAM: half of the ES RAM.
    AssignmentMatrix half = es(inst).ram;
    for (std::size_t i = 0; i < half.agents(); ++i)
      for (std::size_t k = 0; k < half.objects(); ++k) half.at(i, k) *= R(1, 2);
    check_lottery(inst, half);
  }
}

TEST_CASE("decompose rejects bad RAMs") {
  const Instance inst = fixtures::ex1();
  AssignmentMatrix z(inst.agent_count(), inst.object_count());
  z.at(5, 2) = R(1, 2);  // f does not accept gamma
  CHECK_THROWS_AS(decompose(inst, z), InputError);
  AssignmentMatrix over(inst.agent_count(), inst.object_count());
  for (std::size_t i = 0; i < 6; ++i) over.at(i, 0) = R(1);
  CHECK_THROWS_AS(decompose(inst, over), InputError);
}

TEST_CASE("sample is deterministic and follows the weights") {
  const Instance inst = fixtures::ex4();
  const Lottery l = decompose(inst, es(inst).ram);
  for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(&sample(l, seed) == &sample(l, seed));
  std::map<const AssignmentMatrix*, int> counts;
  for (std::uint64_t seed = 0; seed < 5000; ++seed) ++counts[&sample(l, seed)];
  CHECK(counts.size() == 5);
  for (const auto& [m, c] : counts) CHECK(std::abs(c - 1000) < 150);
}

TEST_CASE("lottery JSON") {
  const Instance inst = fixtures::ex4();
  const Json doc = lottery_to_json(inst, decompose(inst, es(inst).ram));
  REQUIRE(doc.size() == 5);
  CHECK(doc[0]["weight"] == "1/5");
  std::size_t holders = 0;
  for (const auto& [agent, objects] : doc[0]["assignment"].items()) holders += objects.size();
  CHECK(holders == 4);
}
