#include "mua/competitive.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "mua/lp.hpp"

namespace mua {

namespace {

// Runs of three or more consecutive agents print as "first:last".
std::string join_agents(const Instance& inst, const std::vector<std::size_t>& agents) {
  std::string s;
  for (std::size_t t = 0; t < agents.size();) {
    std::size_t e = t;
    while (e + 1 < agents.size() && agents[e + 1] == agents[e] + 1) ++e;
    if (!s.empty()) s += ", ";
    if (e - t >= 2) {
      s += inst.agent(agents[t]) + ":" + inst.agent(agents[e]);
    } else {
      s += inst.agent(agents[t]);
      if (e > t) s += ", " + inst.agent(agents[e]);
    }
    t = e + 1;
  }
  return s;
}

std::string join_objects(const Instance& inst, const std::vector<std::size_t>& objects) {
  std::string s;
  for (std::size_t t = 0; t < objects.size(); ++t) {
    if (t > 0) s += ", ";
    s += inst.object(objects[t]);
  }
  return s;
}

Violation violation(const Instance& inst, const char* name, std::vector<std::size_t> agents,
                    std::vector<std::size_t> objects, const std::string& what) {
  std::string msg = what;
  if (!agents.empty()) msg += " for agent" + std::string(agents.size() > 1 ? "s " : " ") + join_agents(inst, agents);
  if (!objects.empty()) msg += " (object" + std::string(objects.size() > 1 ? "s " : " ") + join_objects(inst, objects) + ")";
  return {name, std::move(agents), std::move(objects), msg};
}

Rational spend(const AssignmentMatrix& z, std::size_t i, const PriceVector& p) {
  Rational s;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (!z.at(i, k).is_zero()) s += z.at(i, k) * p[k];
  return s;
}

// ---------------------------------------------------------------------------
// Pattern machinery.

struct AgentType {
  AgentSet members;
  std::vector<std::size_t> objects;
  long size() const { return static_cast<long>(members.size()); }
};

struct Market {
  std::vector<std::size_t> active;
  std::vector<AgentType> types;
  std::vector<std::size_t> type_of;
};

Market build_market(const Instance& inst) {
  Market mk;
  for (std::size_t k = 0; k < inst.object_count(); ++k)
    if (inst.demand(k) > 0) mk.active.push_back(k);
  std::map<std::vector<bool>, std::size_t> seen;
  mk.type_of.resize(inst.agent_count());
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    auto [it, fresh] = seen.emplace(inst.row(i), mk.types.size());
    if (fresh) mk.types.push_back({{}, inst.acceptable_objects(i)});
    mk.types[it->second].members.push_back(i);
    mk.type_of[i] = it->second;
  }
  return mk;
}

struct Pattern {
  std::vector<int> rank;  // per object; -1 for objects nobody accepts
  int classes = 0;
  std::vector<int> marginal;  // per type; -1 = satiated
};

// Ordered set partitions of {0..a-1} as rank vectors, coarsest first.
std::vector<std::vector<int>> ordered_partitions(std::size_t a) {
  std::vector<std::vector<int>> out;
  if (a == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<int> r(a, 0);
  const int base = static_cast<int>(a);
  while (true) {
    const int top = *std::max_element(r.begin(), r.end());
    std::vector<bool> used(static_cast<std::size_t>(top) + 1, false);
    for (int v : r) used[static_cast<std::size_t>(v)] = true;
    if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) out.push_back(r);
    // Odometer step, last digit fastest.
    std::size_t pos = a;
    while (pos > 0 && r[pos - 1] + 1 == base) r[--pos] = 0;
    if (pos == 0) break;
    ++r[pos - 1];
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return *std::max_element(x.begin(), x.end()) < *std::max_element(y.begin(), y.end());
  });
  return out;
}

// Counting rules for a complete pattern.
bool counts_ok(const Instance& inst, const Market& mk, const Pattern& pat) {
  for (std::size_t k : mk.active) {
    long full = 0, part = 0;
    for (std::size_t t = 0; t < mk.types.size(); ++t) {
      if (!inst.accepts(mk.types[t].members.front(), k)) continue;
      if (pat.marginal[t] < 0 || pat.rank[k] < pat.marginal[t])
        full += mk.types[t].size();
      else if (pat.rank[k] == pat.marginal[t])
        part += mk.types[t].size();
    }
    const long q = inst.effective_capacity(k);
    if (full > q || full + part < q || (part == 0 && full != q)) return false;
  }
  return true;
}

// Walks every pattern that survives the counting rules: for each object,
// acceptors buying it in full never exceed supply, and full plus marginal
// buyers can absorb it (exactly the full buyers when nobody is marginal).
// `visit` returns false to stop.
void enumerate_patterns(const Instance& inst, const Market& mk, const CceCaps& caps,
                        const std::function<bool(const Pattern&)>& visit) {
  if (mk.active.size() > caps.max_objects)
    throw CapExceeded("equilibrium search enumerates ordered partitions of " +
                      std::to_string(mk.active.size()) + " objects; the cap is " +
                      std::to_string(caps.max_objects));
  const std::size_t m = inst.object_count();
  const std::size_t types = mk.types.size();
  std::vector<long> acceptors_left(m, 0);
  for (std::size_t k = 0; k < m; ++k) acceptors_left[k] = inst.demand(k);

  std::vector<std::size_t> tied;
  for (std::size_t k : partition_objects(inst).perfect)
    if (inst.demand(k) > 0) tied.push_back(k);
  std::size_t handed = 0;
  bool stop = false;
  for (const auto& ranks : ordered_partitions(mk.active.size())) {
    Pattern pat;
    pat.rank.assign(m, -1);
    for (std::size_t a = 0; a < mk.active.size(); ++a) pat.rank[mk.active[a]] = ranks[a];
    if (caps.tie_perfect_prices && tied.size() > 1 &&
        std::any_of(tied.begin(), tied.end(), [&](std::size_t k) { return pat.rank[k] != pat.rank[tied.front()]; }))
      continue;
    pat.classes = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
    pat.marginal.assign(types, -1);
    std::vector<long> full(m, 0), part(m, 0), left = acceptors_left;

    std::function<void(std::size_t)> dfs = [&](std::size_t t) {
      if (stop) return;
      if (t == types) {
        for (std::size_t k : mk.active) {
          const long q = inst.effective_capacity(k);
          if (full[k] + part[k] < q) return;
          if (part[k] == 0 && full[k] != q) return;
        }
        if (++handed > caps.max_patterns)
          throw CapExceeded("equilibrium search exceeded the cap of " +
                            std::to_string(caps.max_patterns) + " candidate patterns");
        if (!visit(pat)) stop = true;
        return;
      }
      const AgentType& ty = mk.types[t];
      std::vector<int> options;
      for (std::size_t k : ty.objects) options.push_back(pat.rank[k]);
      std::sort(options.begin(), options.end());
      options.erase(std::unique(options.begin(), options.end()), options.end());
      options.push_back(-1);
      for (int c : options) {
        bool ok = true;
        for (std::size_t k : ty.objects) {
          const bool bought_full = c < 0 || pat.rank[k] < c;
          if (bought_full)
            full[k] += ty.size();
          else if (pat.rank[k] == c)
            part[k] += ty.size();
          left[k] -= ty.size();
          if (full[k] > inst.effective_capacity(k) ||
              full[k] + part[k] + left[k] < inst.effective_capacity(k))
            ok = false;
        }
        if (ok) {
          pat.marginal[t] = c;
          dfs(t + 1);
        }
        for (std::size_t k : ty.objects) {
          const bool bought_full = c < 0 || pat.rank[k] < c;
          if (bought_full)
            full[k] -= ty.size();
          else if (pat.rank[k] == c)
            part[k] -= ty.size();
          left[k] += ty.size();
        }
        if (stop) return;
      }
    };
    dfs(0);
    if (stop) return;
  }
}

// LP over class prices pi_c, per-type money b on marginal cells, and a
// homogenizing variable t standing for the constant 1.
struct PatternProgram {
  LinearProgram lp{0};
  std::size_t t_var = 0;
  // Per type: (object, money variable) on its marginal class.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> money;
  std::vector<long> full_count;
};

PatternProgram build_program(const Instance& inst, const Market& mk, const Pattern& pat) {
  PatternProgram pp;
  const std::size_t classes = static_cast<std::size_t>(pat.classes);
  std::size_t next = classes;
  pp.money.resize(mk.types.size());
  pp.full_count.assign(mk.types.size(), 0);
  for (std::size_t t = 0; t < mk.types.size(); ++t) {
    for (std::size_t k : mk.types[t].objects) {
      if (pat.marginal[t] < 0 || pat.rank[k] < pat.marginal[t])
        ++pp.full_count[t];
      else if (pat.rank[k] == pat.marginal[t])
        pp.money[t].push_back({k, next++});
    }
  }
  pp.t_var = next++;
  pp.lp = LinearProgram(next);
  LinearProgram& lp = pp.lp;

  for (std::size_t c = 0; c + 1 < classes; ++c)
    lp.add({{c, Rational(1)}, {c + 1, Rational(-1)}}, Sense::less_equal, Rational(0));

  for (std::size_t t = 0; t < mk.types.size(); ++t) {
    const AgentType& ty = mk.types[t];
    if (ty.objects.empty()) continue;
    const Rational size(ty.size());
    if (pat.marginal[t] < 0) {
      std::vector<LpTerm> terms;
      for (std::size_t k : ty.objects) terms.push_back({static_cast<std::size_t>(pat.rank[k]), Rational(1)});
      terms.push_back({pp.t_var, Rational(-1)});
      lp.add(std::move(terms), Sense::less_equal, Rational(0));
      continue;
    }
    const std::size_t mc = static_cast<std::size_t>(pat.marginal[t]);
    std::vector<LpTerm> budget;
    for (std::size_t k : ty.objects)
      if (pat.rank[k] < pat.marginal[t]) budget.push_back({static_cast<std::size_t>(pat.rank[k]), size});
    for (auto [k, v] : pp.money[t]) {
      budget.push_back({v, Rational(1)});
      lp.add({{v, Rational(1)}, {mc, -size}}, Sense::less_equal, Rational(0));
    }
    budget.push_back({pp.t_var, -size});
    lp.add(std::move(budget), Sense::equal, Rational(0));
  }

  for (std::size_t k : mk.active) {
    const std::size_t c = static_cast<std::size_t>(pat.rank[k]);
    long full = 0;
    std::vector<LpTerm> terms;
    for (std::size_t t = 0; t < mk.types.size(); ++t) {
      if (!inst.accepts(mk.types[t].members.front(), k)) continue;
      if (pat.marginal[t] < 0 || pat.rank[k] < pat.marginal[t]) full += mk.types[t].size();
      for (auto [obj, v] : pp.money[t])
        if (obj == k) terms.push_back({v, Rational(1)});
    }
    if (terms.empty()) continue;  // counting rules already force full == supply
    terms.push_back({c, Rational(full - inst.effective_capacity(k))});
    lp.add(std::move(terms), Sense::equal, Rational(0));
  }
  return pp;
}

// Fix t = 1: the LP is then directly over prices and money.
void fix_scale(PatternProgram& pp) { pp.lp.add({{pp.t_var, Rational(1)}}, Sense::equal, Rational(1)); }

// Charnes-Cooper normalization for ratio objectives of type t: the
// marginal class price becomes 1 and t carries the scale. Prices never
// exceed n, so t >= 1/n keeps the scale strictly positive.
void fix_ratio(PatternProgram& pp, const Instance& inst, std::size_t marginal_class) {
  pp.lp.add({{marginal_class, Rational(1)}}, Sense::equal, Rational(1));
  pp.lp.add({{pp.t_var, Rational(1)}}, Sense::greater_equal,
            Rational(1, static_cast<long>(std::max<std::size_t>(1, inst.agent_count()))));
}

// u_t >= floor as a homogeneous constraint. Returns false when the type is
// satiated below the floor.
bool add_floor(PatternProgram& pp, const Market& mk, const Pattern& pat, std::size_t t,
               const Rational& floor) {
  if (pat.marginal[t] < 0) return Rational(pp.full_count[t]) >= floor;
  std::vector<LpTerm> terms;
  const Rational size(mk.types[t].size());
  for (auto [k, v] : pp.money[t]) terms.push_back({v, Rational(1)});
  terms.push_back({static_cast<std::size_t>(pat.marginal[t]), -(size * (floor - Rational(pp.full_count[t])))});
  pp.lp.add(std::move(terms), Sense::greater_equal, Rational(0));
  return true;
}

std::vector<LpTerm> marginal_units(const PatternProgram& pp, const Market& mk, std::size_t t) {
  std::vector<LpTerm> obj;
  const Rational inv = Rational(1) / Rational(mk.types[t].size());
  for (auto [k, v] : pp.money[t]) obj.push_back({v, inv});
  return obj;
}

Equilibrium recover(const Instance& inst, const Market& mk, const Pattern& pat, const PatternProgram& pp,
                    const std::vector<Rational>& x) {
  const Rational scale = x[pp.t_var];
  if (scale.sign() <= 0) throw std::logic_error("pattern LP returned a point at infinity");
  PriceVector prices(inst.object_count());
  for (std::size_t k : mk.active) prices[k] = x[static_cast<std::size_t>(pat.rank[k])] / scale;
  AssignmentMatrix z(inst.agent_count(), inst.object_count());
  for (std::size_t t = 0; t < mk.types.size(); ++t) {
    const AgentType& ty = mk.types[t];
    std::vector<Rational> row(inst.object_count());
    for (std::size_t k : ty.objects)
      if (pat.marginal[t] < 0 || pat.rank[k] < pat.marginal[t]) row[k] = Rational(1);
    for (auto [k, v] : pp.money[t]) {
      const Rational price = x[static_cast<std::size_t>(pat.marginal[t])];
      row[k] = x[v] / (Rational(ty.size()) * price);
    }
    for (std::size_t i : ty.members)
      for (std::size_t k = 0; k < row.size(); ++k) z.at(i, k) = row[k];
  }
  Verification v = cce_verify(inst, z, prices);
  if (auto* bad = std::get_if<Violation>(&v))
    throw std::logic_error("pattern LP produced a non-equilibrium: " + bad->message);
  return std::get<Equilibrium>(std::move(v));
}

// ---------------------------------------------------------------------------
// Floating-point price adjustment, used only to guess a likely pattern.

std::optional<Pattern> seed_pattern(const Instance& inst, const Market& mk) {
  const std::size_t m = inst.object_count();
  if (mk.active.empty()) return std::nullopt;
  std::vector<double> p(m, 1.0);
  constexpr double tie = 1e-9;

  auto buy = [&](const std::vector<std::size_t>& objs, std::vector<double>& take) {
    std::vector<std::size_t> order = objs;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    double budget = 1.0;
    for (std::size_t s = 0; s < order.size();) {
      std::size_t e = s;
      while (e < order.size() && std::fabs(p[order[e]] - p[order[s]]) <= tie) ++e;
      const double price = p[order[s]];
      const double cost = price * static_cast<double>(e - s);
      if (cost <= budget + tie) {
        for (std::size_t u = s; u < e; ++u) take[order[u]] = 1.0;
        budget -= cost;
      } else {
        const double each = budget / cost;
        for (std::size_t u = s; u < e; ++u) take[order[u]] = each;
        break;
      }
      s = e;
    }
  };

  for (int iter = 0; iter < 4000; ++iter) {
    std::vector<double> excess(m, 0.0);
    for (const auto& ty : mk.types) {
      std::vector<double> take(m, 0.0);
      buy(ty.objects, take);
      for (std::size_t k : ty.objects) excess[k] += take[k] * static_cast<double>(ty.size());
    }
    const double step = 0.5 / (1.0 + 0.01 * iter);
    for (std::size_t k : mk.active) {
      const double q = static_cast<double>(inst.effective_capacity(k));
      p[k] = std::max(0.0, p[k] + step * (excess[k] - q) / q);
    }
  }

  std::vector<std::size_t> order = mk.active;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
  Pattern pat;
  pat.rank.assign(m, -1);
  int c = 0;
  for (std::size_t s = 0; s < order.size(); ++s) {
    if (s > 0 && p[order[s]] - p[order[s - 1]] > 1e-4 * std::max(1.0, p[order[s]])) ++c;
    pat.rank[order[s]] = c;
  }
  pat.classes = c + 1;
  std::vector<double> cls(static_cast<std::size_t>(pat.classes), 0.0);
  std::vector<int> cnt(cls.size(), 0);
  for (std::size_t k : mk.active) {
    cls[static_cast<std::size_t>(pat.rank[k])] += p[k];
    ++cnt[static_cast<std::size_t>(pat.rank[k])];
  }
  for (std::size_t u = 0; u < cls.size(); ++u) cls[u] /= cnt[u];
  for (const auto& ty : mk.types) {
    std::vector<int> per(cls.size(), 0);
    for (std::size_t k : ty.objects) ++per[static_cast<std::size_t>(pat.rank[k])];
    double budget = 1.0;
    int marginal = -1;
    for (std::size_t u = 0; u < cls.size(); ++u) {
      if (per[u] == 0) continue;
      const double cost = cls[u] * per[u];
      if (cost <= budget + 1e-6) {
        budget -= cost;
      } else {
        marginal = static_cast<int>(u);
        break;
      }
    }
    pat.marginal.push_back(marginal);
  }
  return pat;
}

std::optional<Equilibrium> solve_plain(const Instance& inst, const Market& mk, const Pattern& pat) {
  PatternProgram pp = build_program(inst, mk, pat);
  fix_scale(pp);
  const LpResult r = pp.lp.solve();
  if (r.status != LpStatus::optimal) return std::nullopt;
  return recover(inst, mk, pat, pp, r.x);
}

}  // namespace

// ---------------------------------------------------------------------------

DemandSummary demand(const Instance& inst, std::size_t agent, const PriceVector& prices) {
  if (prices.size() != inst.object_count()) throw std::invalid_argument("price vector has the wrong length");
  std::vector<std::size_t> objs = inst.acceptable_objects(agent);
  std::stable_sort(objs.begin(), objs.end(), [&](auto a, auto b) { return prices[a] < prices[b]; });
  DemandSummary d;
  Rational budget(1);
  for (std::size_t s = 0; s < objs.size();) {
    std::size_t e = s;
    while (e < objs.size() && prices[objs[e]] == prices[objs[s]]) ++e;
    const Rational& price = prices[objs[s]];
    const Rational cost = price * Rational(e - s);
    if (cost <= budget) {
      for (std::size_t u = s; u < e; ++u) d.full.push_back(objs[u]);
      budget -= cost;
      d.spend += cost;
    } else {
      d.marginal_class.assign(objs.begin() + static_cast<long>(s), objs.begin() + static_cast<long>(e));
      d.marginal_price = price;
      d.marginal_quantity = budget / price;
      d.spend += budget;
      return d;
    }
    s = e;
  }
  d.satiated = true;
  return d;
}

Verification cce_verify(const Instance& inst, const AssignmentMatrix& z, const PriceVector& p) {
  const std::size_t n = inst.agent_count();
  const std::size_t m = inst.object_count();
  if (z.agents() != n || z.objects() != m)
    return Violation{clause::kFeasibility, {}, {}, "assignment matrix has the wrong shape"};
  if (p.size() != m) return Violation{clause::kFeasibility, {}, {}, "price vector has the wrong length"};
  std::vector<std::size_t> neg;
  for (std::size_t k = 0; k < m; ++k)
    if (p[k].sign() < 0) neg.push_back(k);
  if (!neg.empty()) return violation(inst, clause::kFeasibility, {}, neg, "negative price");
  if (const std::string bad = ram_violation(inst, z); !bad.empty())
    return Violation{clause::kFeasibility, {}, {}, bad};

  Equilibrium eq{z, p, {clause::kFeasibility}};
  std::vector<std::size_t> witnesses;

  for (std::size_t i = 0; i < n; ++i)
    if (spend(z, i, p) > Rational(1)) witnesses.push_back(i);
  if (!witnesses.empty()) return violation(inst, clause::kAffordability, witnesses, {}, "unaffordable bundle");
  eq.certificate.push_back(clause::kAffordability);

  for (std::size_t i = 0; i < n; ++i)
    if (z.row_sum(i) != demand(inst, i, p).utility()) witnesses.push_back(i);
  if (!witnesses.empty())
    return violation(inst, clause::kOptimality, witnesses, {}, "bundle is not utility-maximizing within the budget");
  eq.certificate.push_back(clause::kOptimality);

  const ObjectPartition part = partition_objects(inst);
  std::vector<std::size_t> objs;
  for (std::size_t k : part.over_demanded)
    if (p[k].sign() <= 0) objs.push_back(k);
  if (!objs.empty()) return violation(inst, clause::kPositivePrices, {}, objs, "over-demanded object priced at zero");
  eq.certificate.push_back(clause::kPositivePrices);

  for (std::size_t i = 0; i < n; ++i) {
    std::optional<Rational> seen;
    for (std::size_t k = 0; k < m; ++k) {
      const Rational& x = z.at(i, k);
      if (x.sign() <= 0 || x >= Rational(1)) continue;
      if (seen && *seen != p[k]) {
        witnesses.push_back(i);
        break;
      }
      seen = p[k];
    }
  }
  if (!witnesses.empty())
    return violation(inst, clause::kEqualMarginalPrices, witnesses, {}, "partially consumed objects with different prices");
  eq.certificate.push_back(clause::kEqualMarginalPrices);

  for (std::size_t i = 0; i < n; ++i) {
    bool bad = false;
    for (std::size_t k = 0; k < m && !bad; ++k) {
      if (!inst.accepts(i, k) || z.at(i, k) >= Rational(1)) continue;
      for (std::size_t k2 = 0; k2 < m; ++k2)
        if (z.at(i, k2).sign() > 0 && p[k] < p[k2]) bad = true;
    }
    if (bad) witnesses.push_back(i);
  }
  if (!witnesses.empty())
    return violation(inst, clause::kCheaperFirst, witnesses, {}, "a cheaper acceptable object is not consumed in full");
  eq.certificate.push_back(clause::kCheaperFirst);

  for (std::size_t i = 0; i < n; ++i)
    if (z.row_sum(i) < Rational(inst.row_size(i)) && spend(z, i, p) != Rational(1)) witnesses.push_back(i);
  if (!witnesses.empty())
    return violation(inst, clause::kBudgetExhaustion, witnesses, {}, "unsatiated agent leaves budget unspent");
  eq.certificate.push_back(clause::kBudgetExhaustion);

  for (std::size_t k = 0; k < m; ++k)
    if (z.column_sum(k) != Rational(inst.effective_capacity(k))) objs.push_back(k);
  if (!objs.empty()) return violation(inst, clause::kMarketClearing, {}, objs, "object not fully allocated");
  eq.certificate.push_back(clause::kMarketClearing);
  return eq;
}

PriceSupport supporting_prices(const Instance& inst, const AssignmentMatrix& z) {
  const std::size_t n = inst.agent_count();
  const std::size_t m = inst.object_count();
  PriceSupport out;
  if (z.agents() != n || z.objects() != m) {
    out.reason = "assignment matrix has the wrong shape";
    return out;
  }
  if (std::string bad = ram_violation(inst, z); !bad.empty()) {
    out.reason = bad;
    return out;
  }
  std::vector<std::size_t> short_objs;
  for (std::size_t k = 0; k < m; ++k)
    if (z.column_sum(k) != Rational(inst.effective_capacity(k))) short_objs.push_back(k);
  if (!short_objs.empty()) {
    out.reason = "market does not clear: " + join_objects(inst, short_objs) + " not fully allocated";
    return out;
  }

  // Variables: p_0..p_{m-1}, then s (the smallest over-demanded price).
  const std::size_t s_var = m;
  struct Row {
    std::vector<LpTerm> terms;
    Sense sense;
    Rational rhs;
    std::string label;
    std::optional<std::size_t> budget_agent;
  };
  std::vector<Row> equalities, inequalities;

  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::size_t> first;
    for (std::size_t k = 0; k < m; ++k) {
      const Rational& x = z.at(i, k);
      if (x.sign() <= 0 || x >= Rational(1)) continue;
      if (first)
        equalities.push_back({{{k, Rational(1)}, {*first, Rational(-1)}}, Sense::equal, Rational(0),
                              "equal prices on " + inst.object(*first) + " and " + inst.object(k) +
                                  " (partial for " + inst.agent(i) + ")", {}});
      else
        first = k;
    }
    std::vector<LpTerm> cost;
    for (std::size_t k = 0; k < m; ++k)
      if (z.at(i, k).sign() > 0) cost.push_back({k, z.at(i, k)});
    if (z.row_sum(i) < Rational(inst.row_size(i)))
      equalities.push_back({cost, Sense::equal, Rational(1), "budget of unsatiated " + inst.agent(i) + " spent", {}});
    else
      inequalities.push_back({cost, Sense::less_equal, Rational(1), "affordability for " + inst.agent(i), i});
    for (std::size_t k = 0; k < m; ++k) {
      if (!inst.accepts(i, k) || z.at(i, k) >= Rational(1)) continue;
      for (std::size_t k2 = 0; k2 < m; ++k2) {
        if (k2 == k || z.at(i, k2).sign() <= 0) continue;
        inequalities.push_back({{{k, Rational(1)}, {k2, Rational(-1)}}, Sense::greater_equal, Rational(0),
                                inst.agent(i) + " buys " + inst.object(k2) + " before cheaper-or-equal " +
                                    inst.object(k), {}});
      }
    }
  }

  const ObjectPartition part = partition_objects(inst);
  LinearProgram lp(m + 1);
  for (const auto& r : equalities) lp.add(r.terms, r.sense, r.rhs);
  for (const auto& r : inequalities) lp.add(r.terms, r.sense, r.rhs);
  for (std::size_t k : part.over_demanded) lp.add({{k, Rational(1)}, {s_var, Rational(-1)}}, Sense::greater_equal, Rational(0));
  lp.add({{s_var, Rational(1)}}, Sense::less_equal, Rational(1));
  lp.maximize({{s_var, Rational(1)}});
  const LpResult r = lp.solve();

  if (r.status == LpStatus::optimal && r.objective.sign() > 0) {
    out.feasible = true;
    out.prices.assign(r.x.begin(), r.x.begin() + static_cast<long>(m));
    if (std::holds_alternative<Violation>(cce_verify(inst, z, out.prices)))
      throw std::logic_error("supporting price LP returned prices that fail verification");
    return out;
  }
  if (r.status == LpStatus::optimal) {
    out.reason = "every supporting price vector leaves an over-demanded object at price zero";
    for (std::size_t k : part.over_demanded) {
      LinearProgram probe(m + 1);
      for (const auto& row : equalities) probe.add(row.terms, row.sense, row.rhs);
      for (const auto& row : inequalities) probe.add(row.terms, row.sense, row.rhs);
      probe.maximize({{k, Rational(1)}});
      const LpResult pr = probe.solve();
      if (pr.status == LpStatus::optimal && pr.objective.is_zero())
        out.conflicts.push_back("price of " + inst.object(k) + " is forced to 0");
    }
    return out;
  }

  LinearProgram eq_only(m + 1);
  for (const auto& row : equalities) eq_only.add(row.terms, row.sense, row.rhs);
  if (eq_only.solve().status != LpStatus::optimal) {
    out.reason = "the forced price equalities are inconsistent";
    for (const auto& row : equalities) out.conflicts.push_back(row.label);
    return out;
  }
  out.reason = "no price vector supports this assignment";
  for (const auto& row : inequalities) {
    LinearProgram probe(m + 1);
    for (const auto& e : equalities) probe.add(e.terms, e.sense, e.rhs);
    if (row.budget_agent) {
      probe.minimize(row.terms);
      const LpResult pr = probe.solve();
      if (pr.status == LpStatus::optimal && pr.objective > Rational(1))
        out.conflicts.push_back(row.label + ": bundle costs at least " + pr.objective.str() + " > 1");
      continue;
    }
    probe.add(row.terms, row.sense, row.rhs);
    if (probe.solve().status != LpStatus::optimal) out.conflicts.push_back(row.label);
  }
  if (out.conflicts.empty()) out.conflicts.push_back("constraints conflict only jointly");
  return out;
}

Equilibrium cce_find(const Instance& inst, const CceCaps& caps) {
  const Market mk = build_market(inst);
  if (auto seed = seed_pattern(inst, mk); seed && counts_ok(inst, mk, *seed)) {
    if (auto eq = solve_plain(inst, mk, *seed)) return *eq;
  }
  std::optional<Equilibrium> found;
  enumerate_patterns(inst, mk, caps, [&](const Pattern& pat) {
    found = solve_plain(inst, mk, pat);
    return !found;
  });
  if (!found) throw std::logic_error("no competitive equilibrium found; existence guarantees one");
  return *found;
}

namespace {

// Shared by the full range and the member-only variant. `wanted` marks the
// types whose bounds are needed; prices are bracketed only on request.
CceRange range_impl(const Instance& inst, const Market& mk, const CceCaps& caps, const std::vector<bool>& wanted,
                    bool with_prices) {
  const std::size_t m = inst.object_count();
  CceRange out;
  std::vector<std::optional<Interval>> util(mk.types.size());
  std::vector<std::optional<Equilibrium>> lo_eq(mk.types.size()), hi_eq(mk.types.size());
  std::vector<std::optional<Interval>> price(m);

  enumerate_patterns(inst, mk, caps, [&](const Pattern& pat) {
    ++out.patterns_enumerated;
    PatternProgram base = build_program(inst, mk, pat);
    {
      PatternProgram pp = base;
      fix_scale(pp);
      if (pp.lp.solve().status != LpStatus::optimal) return true;
    }
    ++out.patterns_feasible;

    std::vector<std::optional<Interval>> cls(with_prices ? static_cast<std::size_t>(pat.classes) : 0);
    for (std::size_t c = 0; c < cls.size(); ++c) {
      PatternProgram pp = base;
      fix_scale(pp);
      pp.lp.minimize({{c, Rational(1)}});
      const LpResult lo = pp.lp.solve();
      pp.lp.maximize({{c, Rational(1)}});
      const LpResult hi = pp.lp.solve();
      if (lo.status != LpStatus::optimal || hi.status != LpStatus::optimal)
        throw std::logic_error("class price LP failed on a feasible pattern");
      cls[c] = Interval{lo.objective, hi.objective};
    }
    for (std::size_t k : with_prices ? mk.active : std::vector<std::size_t>{}) {
      const Interval& iv = *cls[static_cast<std::size_t>(pat.rank[k])];
      if (!price[k])
        price[k] = iv;
      else
        price[k] = Interval{min(price[k]->lo, iv.lo), max(price[k]->hi, iv.hi)};
    }

    for (std::size_t t = 0; t < mk.types.size(); ++t) {
      if (!wanted[t]) continue;
      if (pat.marginal[t] < 0) {
        const Rational u(mk.types[t].objects.size());
        const bool new_lo = !lo_eq[t] || u < util[t]->lo;
        const bool new_hi = !hi_eq[t] || u > util[t]->hi;
        if (new_lo || new_hi) {
          const Equilibrium eq = *solve_plain(inst, mk, pat);
          if (!util[t]) util[t] = Interval{u, u};
          if (new_lo) util[t]->lo = u, lo_eq[t] = eq;
          if (new_hi) util[t]->hi = u, hi_eq[t] = eq;
        }
        continue;
      }
      for (int dir = 0; dir < 2; ++dir) {
        PatternProgram pp = base;
        fix_ratio(pp, inst, static_cast<std::size_t>(pat.marginal[t]));
        if (dir == 0)
          pp.lp.minimize(marginal_units(pp, mk, t));
        else
          pp.lp.maximize(marginal_units(pp, mk, t));
        const LpResult r = pp.lp.solve();
        if (r.status != LpStatus::optimal) throw std::logic_error("utility LP failed on a feasible pattern");
        const Rational u = Rational(pp.full_count[t]) + r.objective;
        if (dir == 0 && (!lo_eq[t] || u < util[t]->lo)) {
          if (!util[t]) util[t] = Interval{u, u};
          util[t]->lo = u;
          lo_eq[t] = recover(inst, mk, pat, pp, r.x);
        }
        if (dir == 1 && (!hi_eq[t] || u > util[t]->hi)) {
          if (!util[t]) util[t] = Interval{u, u};
          util[t]->hi = u;
          hi_eq[t] = recover(inst, mk, pat, pp, r.x);
        }
      }
    }
    return true;
  });

  if (out.patterns_feasible == 0) throw std::logic_error("no competitive equilibrium found; existence guarantees one");
  for (std::size_t t = 0; t < mk.types.size(); ++t) {
    if (!wanted[t]) continue;
    out.utilities.push_back(*util[t]);
    out.lower_witness.push_back(*lo_eq[t]);
    out.upper_witness.push_back(*hi_eq[t]);
  }
  if (with_prices) {
    out.prices.resize(m);
    for (std::size_t k = 0; k < m; ++k) out.prices[k] = price[k] ? *price[k] : Interval{};
  }
  return out;
}

// Re-indexes per-type results (wanted types in order) by agent.
CceRange spread(const Market& mk, const std::vector<bool>& wanted, const AgentSet& agents, CceRange by_type) {
  std::vector<std::size_t> slot(mk.types.size(), 0);
  for (std::size_t t = 0, next = 0; t < mk.types.size(); ++t)
    if (wanted[t]) slot[t] = next++;
  CceRange out;
  out.prices = std::move(by_type.prices);
  out.patterns_enumerated = by_type.patterns_enumerated;
  out.patterns_feasible = by_type.patterns_feasible;
  for (std::size_t i : agents) {
    const std::size_t s = slot[mk.type_of.at(i)];
    out.utilities.push_back(by_type.utilities[s]);
    out.lower_witness.push_back(by_type.lower_witness[s]);
    out.upper_witness.push_back(by_type.upper_witness[s]);
  }
  return out;
}

}  // namespace

CceRange cce_utility_range(const Instance& inst, const CceCaps& caps) {
  const Market mk = build_market(inst);
  const std::vector<bool> wanted(mk.types.size(), true);
  AgentSet all(inst.agent_count());
  std::iota(all.begin(), all.end(), 0);
  return spread(mk, wanted, all, range_impl(inst, mk, caps, wanted, true));
}

CceRange cce_member_range(const Instance& inst, const AgentSet& members, const CceCaps& caps) {
  const Market mk = build_market(inst);
  std::vector<bool> wanted(mk.types.size(), false);
  for (std::size_t i : members) {
    if (i >= inst.agent_count()) throw std::invalid_argument("member index out of range");
    wanted[mk.type_of[i]] = true;
  }
  return spread(mk, wanted, members, range_impl(inst, mk, caps, wanted, false));
}

std::optional<Equilibrium> cce_find_dominating(const Instance& inst, const AgentSet& members,
                                               const UtilityProfile& floors, const CceCaps& caps) {
  if (members.size() != floors.size()) throw std::invalid_argument("one floor per member expected");
  const Market mk = build_market(inst);
  // Tightest floor per type.
  std::map<std::size_t, Rational> floor_of;
  for (std::size_t s = 0; s < members.size(); ++s) {
    const std::size_t t = mk.type_of.at(members[s]);
    auto [it, fresh] = floor_of.emplace(t, floors[s]);
    if (!fresh) it->second = max(it->second, floors[s]);
  }
  std::optional<Equilibrium> found;
  enumerate_patterns(inst, mk, caps, [&](const Pattern& pat) {
    // Counting bound first: full objects plus the whole marginal class.
    bool room = false;
    for (const auto& [t, h] : floor_of) {
      long most = 0;
      for (std::size_t k : mk.types[t].objects)
        if (pat.marginal[t] < 0 || pat.rank[k] <= pat.marginal[t]) ++most;
      if (Rational(most) < h) return true;
      if (Rational(most) > h) room = true;
    }
    if (!room) return true;
    PatternProgram base = build_program(inst, mk, pat);
    bool strict_satiated = false;
    for (const auto& [t, h] : floor_of) {
      if (!add_floor(base, mk, pat, t, h)) return true;
      if (pat.marginal[t] < 0 && Rational(base.full_count[t]) > h) strict_satiated = true;
    }
    if (strict_satiated) {
      PatternProgram pp = base;
      fix_scale(pp);
      const LpResult r = pp.lp.solve();
      if (r.status == LpStatus::optimal) found = recover(inst, mk, pat, pp, r.x);
      return !found;
    }
    for (const auto& [t, h] : floor_of) {
      if (pat.marginal[t] < 0) continue;
      PatternProgram pp = base;
      fix_ratio(pp, inst, static_cast<std::size_t>(pat.marginal[t]));
      pp.lp.maximize(marginal_units(pp, mk, t));
      const LpResult r = pp.lp.solve();
      if (r.status != LpStatus::optimal) return true;  // floors infeasible for this pattern
      if (Rational(pp.full_count[t]) + r.objective > h) {
        found = recover(inst, mk, pat, pp, r.x);
        return false;
      }
    }
    return true;
  });
  return found;
}

Equilibrium cce_ipo_selection(const Instance& inst, const CceCaps& caps) {
  const ObjectPartition part = partition_objects(inst);
  const Instance sub = inst.restricted_to(part.over_demanded);
  const Equilibrium inner = cce_find(sub, caps);
  AssignmentMatrix z(inst.agent_count(), inst.object_count());
  PriceVector p(inst.object_count());
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    for (std::size_t k : part.perfect)
      if (inst.accepts(i, k)) z.at(i, k) = Rational(1);
    for (std::size_t s = 0; s < part.over_demanded.size(); ++s) z.at(i, part.over_demanded[s]) = inner.ram.at(i, s);
  }
  for (std::size_t s = 0; s < part.over_demanded.size(); ++s) p[part.over_demanded[s]] = inner.prices[s];
  Verification v = cce_verify(inst, z, p);
  if (auto* bad = std::get_if<Violation>(&v))
    throw std::logic_error("IPO selection failed verification: " + bad->message);
  return std::get<Equilibrium>(std::move(v));
}

}  // namespace mua
