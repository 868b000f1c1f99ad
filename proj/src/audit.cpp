#include "mua/audit.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "mua/egalitarian.hpp"
#include "mua/flow.hpp"

namespace mua {

std::string to_string(LorenzRelation r) {
  switch (r) {
    case LorenzRelation::dominates: return "dominates";
    case LorenzRelation::dominated: return "dominated";
    case LorenzRelation::equal: return "equal";
    case LorenzRelation::incomparable: return "incomparable";
  }
  return "?";
}

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::es: return "es";
    case SolverKind::es_star: return "es-star";
    case SolverKind::epo: return "epo";
    case SolverKind::priority: return "priority";
    case SolverKind::cce: return "cce";
  }
  return "?";
}

LorenzVerdict lorenz_compare(const UtilityProfile& u, const UtilityProfile& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("Lorenz comparison needs profiles of equal length (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  const UtilityProfile a = sorted_ascending(u);
  const UtilityProfile b = sorted_ascending(v);
  Rational sa, sb;
  std::size_t first_gt = 0, first_lt = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    sa += a[t];
    sb += b[t];
    if (sa > sb && first_gt == 0) first_gt = t + 1;
    if (sa < sb && first_lt == 0) first_lt = t + 1;
  }
  if (first_gt == 0 && first_lt == 0) return {LorenzRelation::equal, 0};
  if (first_lt == 0) return {LorenzRelation::dominates, first_gt};
  if (first_gt == 0) return {LorenzRelation::dominated, first_lt};
  return {LorenzRelation::incomparable, std::max(first_gt, first_lt)};
}

namespace {

// Greedy vertex of the base polytope of mu for the given agent order.
UtilityProfile greedy_vertex(const Instance& inst, const std::vector<std::size_t>& order) {
  std::vector<long> taken(inst.object_count(), 0);
  UtilityProfile u(inst.agent_count());
  for (std::size_t i : order) {
    long gain = 0;
    for (std::size_t k = 0; k < inst.object_count(); ++k) {
      if (inst.accepts(i, k) && taken[k] < inst.effective_capacity(k)) {
        ++gain;
        ++taken[k];
      }
    }
    u[i] = Rational(gain);
  }
  return u;
}

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

}  // namespace

UtilityProfile random_efficient_profile(const Instance& inst, std::mt19937_64& rng) {
  const std::size_t n = inst.agent_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  const std::size_t vertices = 1 + below(rng, 3);
  UtilityProfile u(n);
  long total_weight = 0;
  std::vector<std::pair<long, UtilityProfile>> picks;
  for (std::size_t v = 0; v < vertices; ++v) {
    for (std::size_t s = n; s > 1; --s) std::swap(order[s - 1], order[below(rng, s)]);
    const long w = 1 + static_cast<long>(below(rng, 6));
    total_weight += w;
    picks.emplace_back(w, greedy_vertex(inst, order));
  }
  for (const auto& [w, vert] : picks)
    for (std::size_t i = 0; i < n; ++i) u[i] += Rational(w, total_weight) * vert[i];

  const std::size_t transfers = below(rng, 7);
  for (std::size_t t = 0; t < transfers && n > 1; ++t) {
    const std::size_t i = below(rng, n);
    const std::size_t j = below(rng, n);
    if (u[i] <= u[j]) continue;
    const Rational delta = (u[i] - u[j]) * Rational(1 + static_cast<long>(below(rng, 4)), 8);
    if (u[j] + delta > Rational(inst.row_size(j))) continue;
    UtilityProfile w = u;
    w[i] -= delta;
    w[j] += delta;
    if (feasible_utilities(inst, w).feasible) u = std::move(w);
  }
  return u;
}

LorenzTestReport lorenz_dominance_test(const Instance& inst, const UtilityProfile& u, std::size_t trials,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LorenzTestReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const UtilityProfile sample = random_efficient_profile(inst, rng);
    const LorenzVerdict v = lorenz_compare(u, sample);
    if (v.relation == LorenzRelation::dominates || v.relation == LorenzRelation::equal) continue;
    if (report.counterexamples++ == 0) {
      report.first_counterexample = sample;
      report.first_verdict = v;
    }
  }
  return report;
}

EnvyReport envy_check(const Instance& inst, const UtilityProfile& u) {
  EnvyReport report;
  const std::size_t n = inst.agent_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool subset = true;
      for (std::size_t k = 0; k < inst.object_count() && subset; ++k)
        if (inst.accepts(i, k) && !inst.accepts(j, k)) subset = false;
      if (!subset) continue;
      const bool same = inst.row(i) == inst.row(j);
      if (same && i < j && u[i] != u[j])
        report.violations.push_back({i, j, true});
      else if (!same && u[i] > u[j])
        report.violations.push_back({i, j, false});
    }
  }
  return report;
}

bool IpoReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const IpoRow& r) { return r.passed(); });
}

IpoReport ipo_check(const Instance& inst, const SolutionFn& solve, const AgentSet& acceptors) {
  if (acceptors.empty()) throw std::invalid_argument("a perfect extension needs at least one acceptor");
  const Instance ext = perfect_extension(inst, acceptors);
  const UtilityProfile before = solve(inst);
  const UtilityProfile after = solve(ext);
  IpoReport report;
  for (std::size_t i : acceptors) report.rows.push_back({i, before[i], after[i]});
  return report;
}

SolutionFn solver_function(SolverKind kind, const std::vector<std::size_t>& priority_order) {
  switch (kind) {
    case SolverKind::es: return [](const Instance& x) { return es(x).utilities; };
    case SolverKind::es_star: return [](const Instance& x) { return es_star(x); };
    case SolverKind::epo: return [](const Instance& x) { return epo(x); };
    case SolverKind::priority:
      return [priority_order](const Instance& x) {
        std::vector<std::size_t> order = priority_order;
        if (order.empty()) {
          order.resize(x.agent_count());
          std::iota(order.begin(), order.end(), 0);
        }
        return priority(x, order).utilities();
      };
    case SolverKind::cce: return [](const Instance& x) { return cce_ipo_selection(x).utilities(); };
  }
  throw std::invalid_argument("unknown solver");
}

namespace {

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return b > std::numeric_limits<std::size_t>::max() - a ? std::numeric_limits<std::size_t>::max() : a + b;
}

// Non-empty subsets of `objects` that keep at least `keep` of them, ordered
// by size and then lexicographically.
std::vector<std::vector<std::size_t>> drop_sets(const std::vector<std::size_t>& objects, const Rational& keep) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t r = objects.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << r); ++mask) {
    std::vector<std::size_t> d;
    for (std::size_t t = 0; t < r; ++t)
      if (mask >> t & 1) d.push_back(objects[t]);
    if (Rational(r - d.size()) >= keep) out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

Instance apply_drops(const Instance& inst, const AgentSet& members, const std::vector<std::vector<std::size_t>>& drops) {
  Instance out = inst;
  for (std::size_t s = 0; s < members.size(); ++s) {
    if (drops[s].empty()) continue;
    std::vector<bool> row = inst.row(members[s]);
    for (std::size_t k : drops[s]) row[k] = false;
    out = out.with_row(members[s], std::move(row));
  }
  return out;
}

// Coalitions of size `size` over n agents in lexicographic order.
void for_each_combination(std::size_t n, std::size_t size, const std::function<bool(const AgentSet&)>& f) {
  if (size > n) return;
  AgentSet c(size);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    if (!f(c)) return;
    std::size_t pos = size;
    while (pos > 0 && c[pos - 1] == n - size + pos - 1) --pos;
    if (pos == 0) return;
    ++c[pos - 1];
    for (std::size_t t = pos; t < size; ++t) c[t] = c[t - 1] + 1;
  }
}

struct Candidate {
  std::vector<std::vector<std::size_t>> drops;
  std::size_t total = 0;
};

}  // namespace

ManipulationReport manipulation_search(const Instance& inst, SolverKind solver, const ManipulationOptions& opts) {
  const std::size_t n = inst.agent_count();
  ManipulationReport report;
  report.solver = solver;
  const bool set_valued = solver == SolverKind::cce;

  SolutionFn solve;
  UtilityProfile truthful;
  std::vector<Interval> truthful_range;
  UtilityProfile bound(n);
  if (set_valued) {
    const CceRange r = cce_utility_range(inst, opts.cce_caps);
    truthful_range = r.utilities;
    for (std::size_t i = 0; i < n; ++i) bound[i] = r.utilities[i].hi;
    truthful = bound;
  } else {
    solve = solver_function(solver, opts.priority_order);
    truthful = solve(inst);
    bound = truthful;
  }

  std::vector<std::vector<std::vector<std::size_t>>> options(n);
  for (std::size_t i = 0; i < n; ++i) options[i] = drop_sets(inst.acceptable_objects(i), bound[i]);

  std::map<std::vector<std::vector<bool>>, UtilityProfile> single_cache;
  std::map<std::vector<std::vector<bool>>, CceRange> range_cache;
  AgentSet everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0);
  bool stop = false;

  auto evaluate_single = [&](const AgentSet& members, std::vector<Candidate>& batch) {
    // Solve uncached instances (possibly in parallel), then scan in order.
    std::vector<Instance> todo;
    std::vector<std::vector<std::vector<bool>>> keys;
    for (const auto& c : batch) {
      Instance x = apply_drops(inst, members, c.drops);
      if (single_cache.count(x.acceptable()) != 0 ||
          std::find(keys.begin(), keys.end(), x.acceptable()) != keys.end())
        continue;
      keys.push_back(x.acceptable());
      todo.push_back(std::move(x));
    }
    if (report.evaluations + todo.size() > opts.max_evaluations) {
      todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(opts.max_evaluations - report.evaluations), todo.end());
      keys.resize(todo.size());
      report.complete = false;
    }
    std::vector<UtilityProfile> results(todo.size());
    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(todo.size())));
    if (jobs <= 1) {
      for (std::size_t t = 0; t < todo.size(); ++t) results[t] = solve(todo[t]);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t t = w; t < todo.size(); t += jobs) results[t] = solve(todo[t]);
        });
      for (auto& th : pool) th.join();
    }
    report.evaluations += todo.size();
    for (std::size_t t = 0; t < todo.size(); ++t) single_cache.emplace(keys[t], std::move(results[t]));

    for (const auto& c : batch) {
      Instance x = apply_drops(inst, members, c.drops);
      auto it = single_cache.find(x.acceptable());
      if (it == single_cache.end()) {
        stop = true;  // cap reached
        return;
      }
      ++report.examined;
      const UtilityProfile& u = it->second;
      bool weak = true, strict = false;
      for (std::size_t i : members) {
        if (u[i] < truthful[i]) weak = false;
        if (u[i] > truthful[i]) strict = true;
      }
      if (weak && strict) {
        report.found = ManipulationWitness{members, c.drops, x, truthful, u, {}, {}, std::nullopt};
        stop = true;
        return;
      }
    }
  };

  auto evaluate_cce = [&](const AgentSet& members, std::vector<Candidate>& batch) {
    for (const auto& c : batch) {
      Instance x = apply_drops(inst, members, c.drops);
      auto it = range_cache.find(x.acceptable());
      if (it == range_cache.end()) {
        if (report.evaluations >= opts.max_evaluations) {
          report.complete = false;
          stop = true;
          return;
        }
        ++report.evaluations;
        it = range_cache.emplace(x.acceptable(), cce_member_range(x, everyone, opts.cce_caps)).first;
      }
      ++report.examined;
      const CceRange& r = it->second;
      bool all_lo = true, all_hi = true, some_hi = false;
      std::optional<std::size_t> strict_member;
      for (std::size_t i : members) {
        if (r.utilities[i].lo < bound[i]) all_lo = false;
        if (r.utilities[i].hi < bound[i]) all_hi = false;
        if (r.utilities[i].hi > bound[i]) {
          some_hi = true;
          if (!strict_member) strict_member = i;
        }
      }
      auto witness = [&](std::optional<Equilibrium> eq) {
        UtilityProfile manipulated = eq ? eq->utilities() : UtilityProfile{};
        const CceRange full = cce_utility_range(x, opts.cce_caps);
        return ManipulationWitness{members, c.drops, x, truthful, manipulated, truthful_range, full.utilities,
                                   std::move(eq)};
      };
      if (!report.found_strong && all_lo && some_hi)
        report.found_strong = witness(r.upper_witness[*strict_member]);
      if (!report.found && all_hi && some_hi) {
        if (all_lo) {
          report.found = witness(r.upper_witness[*strict_member]);
        } else {
          auto dominates = [&](const Equilibrium& eq) {
            const UtilityProfile u = eq.utilities();
            bool strict = false;
            for (std::size_t i : members) {
              if (u[i] < bound[i]) return false;
              if (u[i] > bound[i]) strict = true;
            }
            return strict;
          };
          std::optional<Equilibrium> eq;
          for (std::size_t i : members) {
            if (dominates(r.upper_witness[i])) eq = r.upper_witness[i];
            else if (dominates(r.lower_witness[i])) eq = r.lower_witness[i];
            if (eq) break;
          }
          if (!eq) {
            UtilityProfile floors;
            for (std::size_t i : members) floors.push_back(bound[i]);
            eq = cce_find_dominating(x, members, floors, opts.cce_caps);
          }
          if (eq) report.found = witness(std::move(eq));
        }
      }
      if (report.found && report.found_strong) {
        stop = true;
        return;
      }
    }
  };

  auto visit = [&](const AgentSet& members) {
    std::size_t space = 1;
    for (std::size_t i : members) space = saturating_mul(space, std::size_t{1} << inst.row_size(i));
    report.search_space = saturating_add(report.search_space, space - 1);

    std::vector<Candidate> batch;
    std::vector<std::vector<std::size_t>> current(members.size());
    std::function<void(std::size_t, std::size_t)> gen = [&](std::size_t s, std::size_t total) {
      if (s == members.size()) {
        if (total > 0) batch.push_back({current, total});
        return;
      }
      current[s].clear();
      gen(s + 1, total);
      for (const auto& d : options[members[s]]) {
        current[s] = d;
        gen(s + 1, total + d.size());
      }
      current[s].clear();
    };
    gen(0, 0);
    std::sort(batch.begin(), batch.end(), [](const Candidate& a, const Candidate& b) {
      return a.total != b.total ? a.total < b.total : a.drops < b.drops;
    });
    if (set_valued)
      evaluate_cce(members, batch);
    else
      evaluate_single(members, batch);
    return !stop;
  };

  if (opts.coalition) {
    AgentSet c = *opts.coalition;
    std::sort(c.begin(), c.end());
    for (std::size_t i : c)
      if (i >= n) throw std::invalid_argument("coalition member out of range");
    visit(c);
  } else {
    for (std::size_t size = 1; size <= std::min(opts.max_coalition, n) && !stop; ++size)
      for_each_combination(n, size, visit);
  }
  if (!report.complete)
    report.coverage_note = "partial coverage: stopped after " + std::to_string(report.evaluations) +
                           " evaluations (cap " + std::to_string(opts.max_evaluations) + ")";
  return report;
}

bool NonbossyReport::passed() const {
  return violations.empty() &&
         std::all_of(perfect_drops.begin(), perfect_drops.end(), [](const PerfectDropRow& r) { return r.passed(); });
}

NonbossyReport nonbossy_check(const Instance& inst, std::size_t max_evaluations) {
  NonbossyReport report;
  const UtilityProfile base = es(inst).utilities;
  const ObjectPartition part = partition_objects(inst);
  for (std::size_t i = 0; i < inst.agent_count() && report.complete; ++i) {
    for (const auto& d : drop_sets(inst.acceptable_objects(i), Rational(0))) {
      if (report.examined >= max_evaluations) {
        report.complete = false;
        break;
      }
      ++report.examined;
      std::vector<bool> row = inst.row(i);
      for (std::size_t k : d) row[k] = false;
      const UtilityProfile after = es(inst.with_row(i, row)).utilities;
      if (after[i] == base[i] && after != base) report.violations.push_back({i, d, base, after});
      if (d.size() == 1 && part.is_perfect(d[0]))
        report.perfect_drops.push_back({i, d[0], base[i], after[i]});
    }
  }
  return report;
}

Instance random_instance(std::size_t n, std::size_t m, const Rational& density, std::uint64_t seed) {
  if (n == 0 || m == 0) throw std::invalid_argument("random instances need n, m >= 1");
  if (density.sign() <= 0 || density > Rational(1)) throw std::invalid_argument("density must lie in (0, 1]");
  if (!density.denominator().fits_ulong_p()) throw std::invalid_argument("density denominator too large");
  const std::uint64_t num = density.numerator().get_ui();
  const std::uint64_t den = density.denominator().get_ui();
  std::mt19937_64 rng(seed);
  std::vector<std::vector<bool>> acc(n, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) acc[i][k] = rng() % den < num;
  std::vector<long> caps(m);
  for (std::size_t k = 0; k < m; ++k) {
    long count = 0;
    for (std::size_t i = 0; i < n; ++i) count += acc[i][k] ? 1 : 0;
    if (count == 0) {
      acc[rng() % n][k] = true;
      count = 1;
    }
    caps[k] = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(count));
  }
  std::vector<std::string> agents, objects;
  for (std::size_t i = 0; i < n; ++i)
    agents.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i)) : "a" + std::to_string(i + 1));
  for (std::size_t k = 0; k < m; ++k) objects.push_back("o" + std::to_string(k + 1));
  return Instance(agents, objects, acc, caps);
}

}  // namespace mua
