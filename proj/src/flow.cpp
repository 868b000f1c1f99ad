#include "mua/flow.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <queue>
#include <stdexcept>

namespace mua {

namespace {

// Dinic's algorithm on a small dense-ish network. Cap is either a machine
// integer or mpz_class; everything else is shared.
template <typename Cap>
class Dinic {
 public:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    Cap cap;
    Cap original;
  };

  explicit Dinic(std::size_t nodes) : graph_(nodes), level_(nodes), iter_(nodes) {}

  // Returns the index of the new edge within graph_[from].
  std::size_t add_edge(std::size_t from, std::size_t to, const Cap& cap) {
    graph_[from].push_back({to, graph_[to].size(), cap, cap});
    graph_[to].push_back({from, graph_[from].size() - 1, Cap(0), Cap(0)});
    return graph_[from].size() - 1;
  }

  Cap run(std::size_t s, std::size_t t) {
    Cap total(0);
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      while (true) {
        Cap pushed = dfs(s, t, Cap(-1));
        if (pushed == 0) break;
        total += pushed;
      }
    }
    return total;
  }

  const Edge& edge(std::size_t from, std::size_t idx) const { return graph_[from][idx]; }

  // Nodes from which t is reachable through residual edges.
  std::vector<bool> reaches_sink(std::size_t t) const {
    std::vector<bool> seen(graph_.size(), false);
    std::queue<std::size_t> q;
    seen[t] = true;
    q.push(t);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      // u -> v has residual capacity iff the paired edge record shows it.
      for (const Edge& e : graph_[v]) {
        const Edge& back = graph_[e.to][e.rev];
        if (!seen[e.to] && back.cap > 0) {
          seen[e.to] = true;
          q.push(e.to);
        }
      }
    }
    return seen;
  }

 private:
  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (const Edge& e : graph_[v]) {
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  // limit < 0 means unbounded.
  Cap dfs(std::size_t v, std::size_t t, Cap limit) {
    if (v == t) return limit;
    for (std::size_t& i = iter_[v]; i < graph_[v].size(); ++i) {
      Edge& e = graph_[v][i];
      if (e.cap > 0 && level_[v] < level_[e.to]) {
        Cap next = (limit < 0 || e.cap < limit) ? Cap(e.cap) : Cap(limit);
        Cap d = dfs(e.to, t, next);
        if (d > 0) {
          e.cap -= d;
          graph_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return Cap(0);
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

long long to_ll(const mpz_class& z) { return z.get_si(); }
mpz_class to_mpz(long long v) { return mpz_class(static_cast<long>(v)); }
mpz_class to_mpz(const mpz_class& v) { return v; }

template <typename Cap>
Cap make_cap(const mpz_class& z) {
  if constexpr (std::is_same_v<Cap, mpz_class>) {
    return z;
  } else {
    return static_cast<Cap>(to_ll(z));
  }
}

template <typename Cap>
FeasibilityCertificate solve_network(const Instance& inst, const UtilityProfile& u,
                                     const mpz_class& scale) {
  const std::size_t n = inst.agent_count();
  const std::size_t m = inst.object_count();
  const std::size_t source = 0;
  const std::size_t sink = n + m + 1;
  Dinic<Cap> net(n + m + 2);

  Cap wanted(0);
  for (std::size_t i = 0; i < n; ++i) {
    const mpq_class scaled = u[i].raw() * scale;
    const Cap c = make_cap<Cap>(scaled.get_num());
    net.add_edge(source, 1 + i, c);
    wanted += c;
  }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> arcs(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      if (inst.accepts(i, k)) arcs[i].push_back({k, net.add_edge(1 + i, 1 + n + k, make_cap<Cap>(scale))});
  for (std::size_t k = 0; k < m; ++k)
    net.add_edge(1 + n + k, sink, make_cap<Cap>(scale * inst.effective_capacity(k)));

  const Cap flow = net.run(source, sink);

  FeasibilityCertificate cert;
  cert.feasible = flow == wanted;
  const auto reaches = net.reaches_sink(sink);
  for (std::size_t i = 0; i < n; ++i)
    if (!reaches[1 + i]) cert.tight_set.push_back(i);
  if (cert.feasible) {
    cert.witness = AssignmentMatrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto [k, idx] : arcs[i]) {
        const auto& e = net.edge(1 + i, idx);
        const mpz_class used = to_mpz(e.original - e.cap);
        cert.witness.at(i, k) = Rational(mpq_class(used, scale));
      }
    }
  }
  return cert;
}

}  // namespace

long coalition_value(const Instance& inst, const AgentSet& coalition) {
  long total = 0;
  for (std::size_t k = 0; k < inst.object_count(); ++k) {
    long count = 0;
    for (std::size_t i : coalition)
      if (inst.accepts(i, k)) ++count;
    total += std::min(count, inst.capacity(k));
  }
  return total;
}

long coalition_value(const Instance& inst, std::uint64_t coalition) {
  if (!inst.has_masks()) throw std::invalid_argument("bitmask coalitions need n <= 64");
  long total = 0;
  for (std::size_t k = 0; k < inst.object_count(); ++k) {
    const long count = std::popcount(inst.column_mask(k) & coalition);
    total += std::min(count, inst.capacity(k));
  }
  return total;
}

FeasibilityCertificate feasible_utilities(const Instance& inst, const UtilityProfile& u) {
  if (u.size() != inst.agent_count())
    throw std::invalid_argument("utility profile has " + std::to_string(u.size()) +
                                " entries for " + std::to_string(inst.agent_count()) + " agents");
  mpz_class scale = 1;
  mpq_class largest = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].sign() < 0)
      throw std::invalid_argument("utility of agent " + inst.agent(i) + " is negative (" + u[i].str() + ")");
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), u[i].denominator().get_mpz_t());
  }
  // Bound on any capacity or flow value after scaling.
  long units = 1;
  for (std::size_t i = 0; i < inst.agent_count(); ++i) units += inst.row_size(i);
  for (std::size_t k = 0; k < inst.object_count(); ++k) units += inst.effective_capacity(k);
  const mpz_class bound = scale * units;
  if (bound < mpz_class(std::numeric_limits<long>::max() / 4))
    return solve_network<long long>(inst, u, scale);
  return solve_network<mpz_class>(inst, u, scale);
}

CoreCheck core_from_above_check(const Instance& inst, const UtilityProfile& u,
                                std::size_t max_agents) {
  const std::size_t n = inst.agent_count();
  if (n > max_agents || n > 62)
    throw CapExceeded("core-from-above check enumerates 2^n coalitions; n = " + std::to_string(n) +
                      " exceeds the cap of " + std::to_string(std::min<std::size_t>(max_agents, 62)));
  CoreCheck out;
  Rational total;
  for (const auto& x : u) total += x;
  const Rational nu(matching_size(inst));
  if (total != nu) {
    out.excess = total - nu;
    out.reason = "sum of utilities " + total.str() + " differs from the matching size " + nu.str();
    return out;
  }
  bool found = false;
  AgentSet best_set;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    Rational sum;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) sum += u[i];
    const Rational excess = sum - Rational(coalition_value(inst, mask));
    if (excess.sign() <= 0) continue;
    AgentSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i);
    if (!found || excess > out.excess || (excess == out.excess && s < best_set)) {
      found = true;
      out.excess = excess;
      best_set = s;
    }
  }
  if (found) {
    out.violating = best_set;
    out.reason = "coalition exceeds its stand-alone value by " + out.excess.str();
    return out;
  }
  out.in_core = true;
  return out;
}

}  // namespace mua
