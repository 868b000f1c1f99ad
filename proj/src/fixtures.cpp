#include "mua/fixtures.hpp"

namespace mua::fixtures {

Instance ex1() {
  return make_instance({"a", "b", "c", "d", "e", "f"},
                       {{"alpha", 4}, {"beta", 4}, {"gamma", 4}},
                       {{"alpha", "beta", "gamma"},
                        {"alpha", "beta", "gamma"},
                        {"alpha", "beta", "gamma"},
                        {"alpha", "beta", "gamma"},
                        {"alpha", "beta"},
                        {"alpha"}});
}

Instance ex2() {
  const std::vector<std::string> ac = {"alpha", "beta"};
  const std::vector<std::string> fi = {"alpha", "gamma", "delta", "epsilon", "zeta"};
  return make_instance(
      {"a", "b", "c", "d", "e", "f", "g", "h", "i"},
      {{"alpha", 4}, {"beta", 4}, {"gamma", 4}, {"delta", 4}, {"epsilon", 4}, {"zeta", 4}},
      {ac, ac, ac, {"beta", "gamma", "delta"}, {"beta", "epsilon", "zeta"}, fi, fi, fi, fi});
}

Instance ex3() {
  const std::vector<std::string> all = {"alpha", "beta", "gamma", "delta"};
  return make_instance({"a", "b", "c", "d", "e", "f", "g"},
                       {{"alpha", 4}, {"beta", 4}, {"gamma", 4}, {"delta", 4}},
                       {all, all, all,
                        {"alpha", "gamma", "delta"},
                        {"alpha", "beta", "delta"},
                        {"alpha", "beta", "gamma"},
                        {"alpha"}});
}

Instance ex3_misreport() {
  return make_instance({"a", "b", "c", "d", "e", "f", "g"},
                       {{"alpha", 4}, {"beta", 4}, {"gamma", 4}, {"delta", 4}},
                       {{"alpha", "gamma", "delta"},
                        {"alpha", "beta", "delta"},
                        {"alpha", "beta", "gamma"},
                        {"alpha", "gamma", "delta"},
                        {"alpha", "beta", "delta"},
                        {"alpha", "beta", "gamma"},
                        {"alpha"}});
}

Instance ex4() {
  return make_instance({"a", "b", "c", "d", "e"}, {{"alpha", 4}},
                       {{"alpha"}, {"alpha"}, {"alpha"}, {"alpha"}, {"alpha"}});
}

}  // namespace mua::fixtures
