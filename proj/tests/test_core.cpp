#include <doctest.h>

#include <numeric>
#include <random>

#include "mua/audit.hpp"
#include "mua/fixtures.hpp"
#include "mua/flow.hpp"
#include "mua/io.hpp"
#include "util.hpp"

using namespace mua;
using testutil::R;

namespace {

const char* kEx1 = R"({
  "agents": ["a", "b", "c", "d", "e", "f"],
  "objects": [{"id": "alpha", "capacity": 4}, {"id": "beta", "capacity": 4}, {"id": "gamma", "capacity": 4}],
  "acceptable": {
    "a": ["alpha", "beta", "gamma"], "b": ["alpha", "beta", "gamma"],
    "c": ["alpha", "beta", "gamma"], "d": ["alpha", "beta", "gamma"],
    "e": ["alpha", "beta"], "f": ["alpha"]
  }
})";

std::string input_error_where(const std::string& text) {
  try {
    load_instance(text);
  } catch (const InputError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(R(6, 8).str() == "3/4");
  CHECK(R(8, 4).str() == "2");
  CHECK(R(-3, 9).str() == "-1/3");
  CHECK(Rational::parse("10/4") == R(5, 2));
  CHECK(Rational::parse("-7") == R(-7));
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(Rational::parse("x"));
  CHECK(R(37, 15).decimal(2) == "2.47");
  CHECK(R(22, 15).decimal(2) == "1.47");
  CHECK(R(2, 3).decimal(2) == "0.67");
  // Half to even at the displayed precision.
  CHECK(R(1, 8).decimal(2) == "0.12");
  CHECK(R(3, 8).decimal(2) == "0.38");
  CHECK(R(5, 2).decimal(0) == "2");
  CHECK(R(-5, 8).decimal(2) == "-0.62");
  CHECK(approximate(0.5714285714, 100) == R(4, 7));
}

TEST_CASE("load_instance: first example document") {
  const Instance inst = load_instance(kEx1);
  CHECK(inst.agent_count() == 6);
  CHECK(inst.object_count() == 3);
  CHECK(inst.capacities() == std::vector<long>{4, 4, 4});
  CHECK(inst == fixtures::ex1());
  CHECK(inst.demand_adequate());
}

TEST_CASE("load_instance: 0/1 rows are accepted") {
  const Instance inst = load_instance(R"({"agents": ["a", "b"], "objects": [{"id": "x", "capacity": 1}],
                                          "acceptable": {"a": [1], "b": [0]}})");
  CHECK(inst.accepts(0, 0));
  CHECK_FALSE(inst.accepts(1, 0));
}

TEST_CASE("load_instance: validation errors name the location") {
  CHECK(input_error_where(R"({"agents": ["a"], "objects": [{"id": "alpha", "capacity": 0}],
                              "acceptable": {"a": ["alpha"]}})") == "objects[0].capacity");
  CHECK(input_error_where(R"({"agents": ["a"], "objects": [{"id": "x", "capacity": 1}],
                              "acceptable": {"a": [2]}})") == "acceptable.a[0]");
  CHECK(input_error_where(R"({"agents": ["a", "b"], "objects": [{"id": "x", "capacity": 1}, {"id": "y", "capacity": 1}],
                              "acceptable": {"a": ["x"], "b": ["x"]}})") == "objects[1]");
  CHECK(input_error_where("{not json") == "document");
  CHECK(input_error_where(R"({"agents": ["a"], "objects": []})") == "acceptable");
  CHECK(input_error_where(R"({"agents": ["a"], "objects": [{"id": "x", "capacity": 1}],
                              "acceptable": {"z": ["x"]}})") == "acceptable.z");
}

TEST_CASE("corrected misreport document keeps demand adequacy") {
  const Instance x = load_instance(serialize_instance(fixtures::ex3_misreport()));
  CHECK(x.demand_adequate());
  const std::size_t gamma = *x.object_index("gamma");
  CHECK(x.demand(gamma) == 4);
  const ObjectPartition p = partition_objects(x);
  CHECK(p.perfect.size() == 3);
  CHECK(p.over_demanded == std::vector<std::size_t>{*x.object_index("alpha")});
}

TEST_CASE("partition_objects") {
  const Instance ex1 = fixtures::ex1();
  const ObjectPartition p = partition_objects(ex1);
  CHECK(p.perfect == std::vector<std::size_t>{2});
  CHECK(p.over_demanded == std::vector<std::size_t>{0, 1});
  CHECK(partition_objects(fixtures::ex3()).perfect.empty());
  const Instance all = make_instance({"a", "b", "c"}, {{"x", 3}}, {{"x"}, {"x"}, {"x"}});
  CHECK(partition_objects(all).perfect == std::vector<std::size_t>{0});
}

TEST_CASE("perfect_extension") {
  const Instance ex4 = perfect_extension(fixtures::ex4(), {0, 1, 2, 3});
  CHECK(ex4.object_count() == 2);
  CHECK(ex4.capacities() == std::vector<long>{4, 4});
  CHECK(perfect_extension(fixtures::ex4(), {0, 1, 2, 3, 4}).capacity(1) == 5);

  const Instance ex1 = fixtures::ex1();
  const Instance ext = perfect_extension(ex1, {0, 1});
  CHECK(ext.capacity(3) == 2);
  const ObjectPartition p = partition_objects(ext);
  CHECK(p.is_perfect(3));
  CHECK(p.is_perfect(2));
  CHECK_FALSE(p.is_perfect(0));
  CHECK(ext.object(3) == "k'");
  CHECK_THROWS(perfect_extension(ex1, {}));
}

TEST_CASE("matching_size") {
  CHECK(matching_size(fixtures::ex1()) == 12);
  CHECK(matching_size(fixtures::ex2()) == 24);
  const Instance thin = make_instance({"a", "b", "c"}, {{"x", 4}}, {{"x"}, {"x"}, {"x"}});
  CHECK(matching_size(thin) == 3);
  CHECK_FALSE(thin.demand_adequate());
  CHECK(thin.effective_capacity(0) == 3);
}

TEST_CASE("partition, extension and matching size on random instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance inst = random_instance(2 + seed % 5, 1 + seed % 4, R(1, 2), seed);
    const ObjectPartition p = partition_objects(inst);
    std::vector<int> seen(inst.object_count(), 0);
    for (std::size_t k : p.perfect) ++seen[k];
    for (std::size_t k : p.over_demanded) ++seen[k];
    for (int s : seen) CHECK(s == 1);

    AgentSet everyone(inst.agent_count());
    std::iota(everyone.begin(), everyone.end(), 0);
    CHECK(matching_size(inst) == coalition_value(inst, everyone));

    const Instance ext = perfect_extension(inst, {0});
    const ObjectPartition q = partition_objects(ext);
    for (std::size_t k = 0; k < inst.object_count(); ++k) CHECK(q.is_perfect(k) == p.is_perfect(k));
    CHECK(q.is_perfect(inst.object_count()));
  }
}

TEST_CASE("instance documents round-trip") {
  for (const Instance& inst : {fixtures::ex1(), fixtures::ex2(), fixtures::ex3(), fixtures::ex3_misreport(),
                               fixtures::ex4(), random_instance(5, 4, R(1, 2), 7)})
    CHECK(load_instance(serialize_instance(inst)) == inst);
}

TEST_CASE("RAM and price documents round-trip") {
  const Instance inst = fixtures::ex1();
  AssignmentMatrix z(inst.agent_count(), inst.object_count());
  z.at(0, 0) = R(1, 2);
  z.at(4, 1) = R(1);
  const Json doc = ram_to_json(inst, z);
  CHECK(doc["a"]["alpha"] == "1/2");
  CHECK_FALSE(doc["a"].contains("beta"));
  CHECK(ram_from_json(inst, doc) == z);
  const std::vector<Rational> p = {R(4, 13), R(37, 52), R(0)};
  CHECK(prices_from_json(inst, prices_to_json(inst, p)) == p);
  CHECK_THROWS_AS(prices_from_json(inst, Json::parse(R"({"alpha": "1"})")), InputError);
  CHECK_THROWS_AS(ram_from_json(inst, Json::parse(R"({"a": {"alpha": "x"}})")), InputError);
}

TEST_CASE("ram_violation") {
  const Instance inst = fixtures::ex1();
  AssignmentMatrix z(inst.agent_count(), inst.object_count());
  CHECK(ram_violation(inst, z).empty());
  z.at(5, 1) = R(1, 2);
  CHECK_FALSE(ram_violation(inst, z).empty());
  z.at(5, 1) = R(0);
  for (std::size_t i = 0; i < 5; ++i) z.at(i, 0) = R(1);
  CHECK_FALSE(ram_violation(inst, z).empty());
}
