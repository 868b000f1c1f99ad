#include <doctest.h>

#include <random>

#include "min_norm.hpp"
#include "mua/audit.hpp"
#include "mua/egalitarian.hpp"
#include "mua/fixtures.hpp"
#include "mua/flow.hpp"
#include "util.hpp"

using namespace mua;
using testutil::R;
using testutil::str;

namespace {

UtilityProfile exactified(const testutil::Vec& x) {
  UtilityProfile u;
  for (double v : x) u.push_back(approximate(v, 1000));
  return u;
}

Rational total(const UtilityProfile& u) {
  Rational s;
  for (const auto& x : u) s += x;
  return s;
}

}  // namespace

TEST_CASE("es on the fixture instances") {
  CHECK(str(es(fixtures::ex1()).utilities) == "9/4 9/4 9/4 9/4 2 1");
  CHECK(str(es(fixtures::ex2()).utilities) == "2 2 2 5/2 5/2 13/4 13/4 13/4 13/4");
  CHECK(str(es(fixtures::ex3()).utilities) == "5/2 5/2 5/2 5/2 5/2 5/2 1");
  CHECK(str(es(fixtures::ex4()).utilities) == "4/5 4/5 4/5 4/5 4/5");
}

TEST_CASE("es result structure") {
  const Instance inst = fixtures::ex1();
  const LeximinResult r = es(inst);
  CHECK(r.ram.utilities() == r.utilities);
  CHECK(ram_violation(inst, r.ram).empty());
  CHECK(total(r.utilities) == Rational(matching_size(inst)));
  REQUIRE(r.phases.size() == 3);
  CHECK(r.phases[0].level == R(1));
  CHECK(r.phases[0].frozen == AgentSet{5});
  CHECK(r.phases[1].level == R(2));
  CHECK(r.phases[2].level == R(9, 4));
  CHECK(es(inst).ram == r.ram);
}

TEST_CASE("es agrees with the min-norm oracle") {
  std::vector<Instance> corpus = {fixtures::ex1(), fixtures::ex3(), fixtures::ex4()};
  for (std::uint64_t seed = 0; seed < 40; ++seed)
    corpus.push_back(random_instance(2 + seed % 5, 1 + seed % 4, R(1, 2), seed));
  for (const Instance& inst : corpus) {
    const UtilityProfile oracle = exactified(testutil::min_norm_point(inst));
    CHECK(str(es(inst).utilities) == str(oracle));
  }
}

TEST_CASE("es is leximin maximal against random efficient profiles") {
  for (const Instance& inst : {fixtures::ex1(), fixtures::ex2(), random_instance(6, 4, R(1, 2), 3)}) {
    const UtilityProfile u = es(inst).utilities;
    std::mt19937_64 rng(17);
    for (int t = 0; t < 300; ++t) {
      const UtilityProfile v = random_efficient_profile(inst, rng);
      CHECK(leximin_compare(u, v) >= 0);
    }
  }
}

TEST_CASE("es treats equals equally and is envy-free") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = random_instance(3 + seed % 6, 2 + seed % 3, R(1, 2), seed);
    CHECK(envy_check(inst, es(inst).utilities).passed());
  }
}

TEST_CASE("es_star") {
  CHECK(es_star(fixtures::ex3()) == es(fixtures::ex3()).utilities);
  CHECK(str(es_star(fixtures::ex3_misreport())) == "18/7 18/7 18/7 18/7 18/7 18/7 4/7");
  const Instance ext = perfect_extension(fixtures::ex4(), {0, 1, 2, 3});
  CHECK(str(es_star(ext)) == "9/5 9/5 9/5 9/5 4/5");
  CHECK(str(es(ext).utilities) == "7/4 7/4 7/4 7/4 1");
  CHECK(str(es_star(fixtures::ex4())) == "4/5 4/5 4/5 4/5 4/5");
}

TEST_CASE("es_star splits into perfect objects plus the over-demanded ES") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = random_instance(3 + seed % 4, 2 + seed % 3, R(2, 3), seed);
    const ObjectPartition part = partition_objects(inst);
    const Instance sub = inst.restricted_to(part.over_demanded);
    const UtilityProfile inner = es(sub).utilities;
    const UtilityProfile star = es_star(inst);
    for (std::size_t i = 0; i < inst.agent_count(); ++i) {
      long perfect = 0;
      for (std::size_t k : part.perfect) perfect += inst.accepts(i, k) ? 1 : 0;
      CHECK(star[i] == inner[i] + Rational(perfect));
    }
    CHECK(lorenz_dominance_test(sub, inner, 50, seed).passed());
  }
}

TEST_CASE("epo") {
  CHECK(str(epo(fixtures::ex1())) == "37/15 37/15 37/15 37/15 22/15 2/3");
  CHECK(str(epo(fixtures::ex4())) == "4/5 4/5 4/5 4/5 4/5");
  const Instance all = make_instance({"a", "b", "c"}, {{"x", 3}}, {{"x"}, {"x"}, {"x"}});
  CHECK(str(epo(all)) == "1 1 1");
  std::vector<std::string> shown;
  for (const auto& x : epo(fixtures::ex1())) shown.push_back(x.decimal(2));
  CHECK(shown == std::vector<std::string>{"2.47", "2.47", "2.47", "2.47", "1.47", "0.67"});
}

TEST_CASE("priority") {
  const Instance inst = fixtures::ex1();
  const AssignmentMatrix z = priority(inst, {0, 1, 2, 3, 4, 5});
  CHECK(z.is_binary());
  CHECK(z.row_sum(5) == R(0));
  CHECK(str(z.utilities()) == "3 3 3 3 0 0");
  const AssignmentMatrix w = priority(inst, {5, 4, 0, 1, 2, 3});
  CHECK(w.row_sum(5) == R(1));
  CHECK(w.row_sum(4) == R(2));
  CHECK(ram_violation(inst, w).empty());
  const Instance roomy = make_instance({"a", "b", "c"}, {{"x", 5}}, {{"x"}, {"x"}, {"x"}});
  CHECK(str(priority(roomy, {2, 0, 1}).utilities()) == "1 1 1");
  CHECK_THROWS(priority(inst, {0, 1, 2}));
  CHECK_THROWS(priority(inst, {0, 0, 1, 2, 3, 4}));
}

TEST_CASE("random priority equals epo") {
  CHECK(random_priority_profile(fixtures::ex1()) == epo(fixtures::ex1()));
  CHECK(str(random_priority_profile(fixtures::ex4())) == "4/5 4/5 4/5 4/5 4/5");
  const Instance lone = make_instance({"a"}, {{"x", 1}, {"y", 2}}, {{"x", "y"}});
  CHECK(str(random_priority_profile(lone)) == "2");
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = random_instance(1 + seed % 6, 1 + seed % 4, R(1, 2), seed);
    CHECK(random_priority_profile(inst) == epo(inst));
  }
  CHECK_THROWS_AS(random_priority_profile(fixtures::ex2()), CapExceeded);
}

TEST_CASE("leximin helpers") {
  CHECK(sorted_ascending({R(3), R(1), R(2)}) == UtilityProfile{R(1), R(2), R(3)});
  CHECK(leximin_compare({R(2), R(2)}, {R(1), R(3)}) > 0);
  CHECK(leximin_compare({R(3), R(1)}, {R(1), R(3)}) == 0);
}
