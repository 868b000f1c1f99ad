#pragma once

#include <string>
#include <vector>

#include "mua/instance.hpp"

namespace testutil {

inline mua::Rational R(long p, long q = 1) { return mua::Rational(p, q); }

inline mua::UtilityProfile profile(std::initializer_list<mua::Rational> xs) { return {xs}; }

// RAM from per-agent rows given in object order.
inline mua::AssignmentMatrix ram(const mua::Instance& inst, const std::vector<std::vector<mua::Rational>>& rows) {
  mua::AssignmentMatrix z(inst.agent_count(), inst.object_count());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) z.at(i, k) = rows[i][k];
  return z;
}

inline std::string str(const mua::UtilityProfile& u) {
  std::string s;
  for (const auto& x : u) s += (s.empty() ? "" : " ") + x.str();
  return s;
}

}  // namespace testutil
