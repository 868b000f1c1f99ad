#include "mua/egalitarian.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "mua/flow.hpp"

namespace mua {

LeximinResult es(const Instance& inst) {
  const std::size_t n = inst.agent_count();
  std::vector<std::optional<Rational>> fixed(n);
  const Rational nu(matching_size(inst));
  Rational frozen_mass;
  std::size_t remaining = n;
  LeximinResult out;

  auto profile_at = [&](const Rational& level) {
    UtilityProfile u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = fixed[i] ? *fixed[i] : level;
    return u;
  };

  while (remaining > 0) {
    Rational level = (nu - frozen_mass) / Rational(remaining);
    while (true) {
      for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) level = min(level, Rational(inst.row_size(i)));

      const FeasibilityCertificate cert = feasible_utilities(inst, profile_at(level));
      if (cert.feasible) {
        LeximinPhase phase{level, {}};
        for (std::size_t i : cert.tight_set) {
          if (fixed[i]) continue;
          fixed[i] = level;
          frozen_mass += level;
          --remaining;
          phase.frozen.push_back(i);
        }
        if (phase.frozen.empty()) throw std::logic_error("water-filling round froze no agent");
        out.phases.push_back(std::move(phase));
        break;
      }
      // Newton step: the violated coalition becomes tight at the new level.
      Rational fixed_in_cut;
      long free_in_cut = 0;
      for (std::size_t i : cert.tight_set) {
        if (fixed[i])
          fixed_in_cut += *fixed[i];
        else
          ++free_in_cut;
      }
      if (free_in_cut == 0) throw std::logic_error("violated cut contains only frozen agents");
      level = (Rational(coalition_value(inst, cert.tight_set)) - fixed_in_cut) / Rational(free_in_cut);
    }
  }

  out.utilities = profile_at(Rational());
  FeasibilityCertificate final_cert = feasible_utilities(inst, out.utilities);
  if (!final_cert.feasible) throw std::logic_error("leximin profile failed its own feasibility check");
  out.ram = std::move(final_cert.witness);
  return out;
}

UtilityProfile es_star(const Instance& inst) {
  const ObjectPartition part = partition_objects(inst);
  const Instance over = inst.restricted_to(part.over_demanded);
  UtilityProfile u = es(over).utilities;
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    long perfect = 0;
    for (std::size_t k : part.perfect)
      if (inst.accepts(i, k)) ++perfect;
    u[i] += Rational(perfect);
  }
  return u;
}

UtilityProfile epo(const Instance& inst) {
  UtilityProfile u(inst.agent_count());
  for (std::size_t k = 0; k < inst.object_count(); ++k) {
    if (inst.demand(k) == 0) continue;
    const Rational share(inst.effective_capacity(k), inst.demand(k));
    for (std::size_t i = 0; i < inst.agent_count(); ++i)
      if (inst.accepts(i, k)) u[i] += share;
  }
  return u;
}

AssignmentMatrix priority(const Instance& inst, const std::vector<std::size_t>& order) {
  const std::size_t n = inst.agent_count();
  std::vector<bool> seen(n, false);
  if (order.size() != n) throw std::invalid_argument("priority order must list every agent once");
  for (std::size_t i : order) {
    if (i >= n || seen[i]) throw std::invalid_argument("priority order must be a permutation of the agents");
    seen[i] = true;
  }
  AssignmentMatrix z(n, inst.object_count());
  std::vector<long> left(inst.object_count());
  for (std::size_t k = 0; k < left.size(); ++k) left[k] = inst.effective_capacity(k);
  for (std::size_t i : order) {
    for (std::size_t k = 0; k < left.size(); ++k) {
      if (inst.accepts(i, k) && left[k] > 0) {
        z.at(i, k) = Rational(1);
        --left[k];
      }
    }
  }
  return z;
}

UtilityProfile random_priority_profile(const Instance& inst, std::size_t max_agents) {
  const std::size_t n = inst.agent_count();
  if (n > max_agents)
    throw CapExceeded("random priority averages n! orders; n = " + std::to_string(n) +
                      " exceeds the cap of " + std::to_string(max_agents));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<long> units(n, 0);
  long orders = 0;
  do {
    ++orders;
    std::vector<long> left(inst.object_count());
    for (std::size_t k = 0; k < left.size(); ++k) left[k] = inst.effective_capacity(k);
    for (std::size_t i : order) {
      for (std::size_t k = 0; k < left.size(); ++k) {
        if (inst.accepts(i, k) && left[k] > 0) {
          ++units[i];
          --left[k];
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));
  UtilityProfile u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = Rational(units[i], orders);
  return u;
}

UtilityProfile sorted_ascending(UtilityProfile u) {
  std::sort(u.begin(), u.end());
  return u;
}

int leximin_compare(const UtilityProfile& a, const UtilityProfile& b) {
  const auto ga = sorted_ascending(a);
  const auto gb = sorted_ascending(b);
  for (std::size_t t = 0; t < std::min(ga.size(), gb.size()); ++t) {
    if (ga[t] < gb[t]) return -1;
    if (gb[t] < ga[t]) return 1;
  }
  return 0;
}

}  // namespace mua
