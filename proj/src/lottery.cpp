#include "mua/lottery.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mua {

Lottery decompose(const Instance& inst, const AssignmentMatrix& ram) {
  if (ram.agents() != inst.agent_count() || ram.objects() != inst.object_count())
    throw InputError("ram", "assignment matrix has the wrong shape");
  if (const std::string bad = ram_violation(inst, ram); !bad.empty()) throw InputError("ram", bad);
  const std::size_t n = ram.agents();
  const std::size_t m = ram.objects();
  const Rational one(1);

  Lottery out;
  AssignmentMatrix z = ram;
  Rational remaining(1);
  while (true) {
    AssignmentMatrix b(n, m);
    bool fractional = false;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<std::size_t> cells;
      Rational mass;
      for (std::size_t i = 0; i < n; ++i) {
        const Rational& x = z.at(i, k);
        if (x == one) {
          b.at(i, k) = one;
        } else if (x.sign() > 0) {
          cells.push_back(i);
          mass += x;
        }
      }
      if (cells.empty()) continue;
      fractional = true;
      std::stable_sort(cells.begin(), cells.end(), [&](auto a, auto c) { return z.at(c, k) < z.at(a, k); });
      const long ones = mass.ceil().get_si();
      for (long t = 0; t < ones; ++t) b.at(cells[static_cast<std::size_t>(t)], k) = one;
    }
    if (!fractional) {
      out.components.push_back({remaining, z});
      break;
    }
    Rational step(1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        const Rational& x = z.at(i, k);
        if (x.sign() <= 0 || x == one) continue;
        step = min(step, b.at(i, k) == one ? x : one - x);
      }
    }
    out.components.push_back({remaining * step, b});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k) z.at(i, k) = (z.at(i, k) - step * b.at(i, k)) / (one - step);
    remaining *= one - step;
  }

  // Merge repeated matrices, keeping first-appearance order.
  Lottery merged;
  for (auto& c : out.components) {
    auto it = std::find_if(merged.components.begin(), merged.components.end(),
                           [&](const LotteryComponent& d) { return d.matrix == c.matrix; });
    if (it == merged.components.end())
      merged.components.push_back(std::move(c));
    else
      it->weight += c.weight;
  }
  return merged;
}

AssignmentMatrix reconstruct(const Lottery& lottery) {
  if (lottery.components.empty()) return {};
  const auto& first = lottery.components.front().matrix;
  AssignmentMatrix z(first.agents(), first.objects());
  for (const auto& c : lottery.components)
    for (std::size_t i = 0; i < z.agents(); ++i)
      for (std::size_t k = 0; k < z.objects(); ++k)
        if (!c.matrix.at(i, k).is_zero()) z.at(i, k) += c.weight * c.matrix.at(i, k);
  return z;
}

const AssignmentMatrix& sample(const Lottery& lottery, std::uint64_t seed) {
  if (lottery.components.empty()) throw std::invalid_argument("cannot sample an empty lottery");
  std::mt19937_64 rng(seed);
  static_assert(sizeof(unsigned long) == sizeof(std::uint64_t));
  const mpz_class draw(static_cast<unsigned long>(rng()));
  mpz_class span(1);
  span <<= 64;
  const Rational u(mpq_class(draw, span));
  Rational acc;
  for (const auto& c : lottery.components) {
    acc += c.weight;
    if (u < acc) return c.matrix;
  }
  return lottery.components.back().matrix;
}

Json binary_assignment_to_json(const Instance& inst, const AssignmentMatrix& z) {
  Json out = Json::object();
  for (std::size_t i = 0; i < z.agents(); ++i) {
    Json objs = Json::array();
    for (std::size_t k = 0; k < z.objects(); ++k)
      if (!z.at(i, k).is_zero()) objs.push_back(inst.object(k));
    out[inst.agent(i)] = objs;
  }
  return out;
}

Json lottery_to_json(const Instance& inst, const Lottery& lottery) {
  Json out = Json::array();
  for (const auto& c : lottery.components)
    out.push_back({{"weight", c.weight.str()}, {"assignment", binary_assignment_to_json(inst, c.matrix)}});
  return out;
}

}  // namespace mua
