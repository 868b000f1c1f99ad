#pragma once

#include "mua/instance.hpp"

// Small instances used throughout the tests, the CLI and the docs.
namespace mua::fixtures {

// 6 agents, 3 objects of capacity 4; a:d accept all, e accepts alpha and
// beta, f accepts alpha only.
Instance ex1();
// 9 agents, 6 objects of capacity 4.
Instance ex2();
// 7 agents, 4 objects of capacity 4 (truthful preferences).
Instance ex3();
// ex3 after a drops beta, b drops gamma and c drops delta. c keeps gamma
// (row 1,1,1,0): with row (1,1,0,0) gamma would have only three acceptors,
// and beta, gamma and delta would not all become perfect.
Instance ex3_misreport();
// 5 agents, one object of capacity 4 accepted by everyone.
Instance ex4();

}  // namespace mua::fixtures
