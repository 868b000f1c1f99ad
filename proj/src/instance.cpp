#include "mua/instance.hpp"

#include <algorithm>
#include <set>

namespace mua {

Instance::Instance(std::vector<std::string> agents, std::vector<std::string> objects,
                   std::vector<std::vector<bool>> acceptable, std::vector<long> capacities)
    : agents_(std::move(agents)),
      objects_(std::move(objects)),
      acceptable_(std::move(acceptable)),
      capacities_(std::move(capacities)) {
  const std::size_t n = agents_.size();
  const std::size_t m = objects_.size();
  if (capacities_.size() != m) throw InputError("capacities", "one capacity per object required");
  if (acceptable_.size() != n) throw InputError("acceptable", "one row per agent required");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen.insert(agents_[i]).second)
      throw InputError("agents[" + std::to_string(i) + "]", "duplicate agent id \"" + agents_[i] + "\"");
  }
  seen.clear();
  for (std::size_t k = 0; k < m; ++k) {
    if (!seen.insert(objects_[k]).second)
      throw InputError("objects[" + std::to_string(k) + "]", "duplicate object id \"" + objects_[k] + "\"");
    if (capacities_[k] <= 0)
      throw InputError("objects[" + std::to_string(k) + "].capacity",
                       "capacity of \"" + objects_[k] + "\" must be a positive integer");
  }
  demand_.assign(m, 0);
  row_size_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (acceptable_[i].size() != m)
      throw InputError("acceptable[" + std::to_string(i) + "]", "row length must equal object count");
    for (std::size_t k = 0; k < m; ++k) {
      if (acceptable_[i][k]) {
        ++demand_[k];
        ++row_size_[i];
      }
    }
  }
  effective_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    effective_[k] = std::min(capacities_[k], demand_[k]);
    if (demand_[k] < capacities_[k]) adequate_ = false;
  }
  if (n <= 64) {
    masks_.assign(m, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k)
        if (acceptable_[i][k]) masks_[k] |= std::uint64_t{1} << i;
  }
}

std::optional<std::size_t> Instance::agent_index(const std::string& id) const {
  auto it = std::find(agents_.begin(), agents_.end(), id);
  if (it == agents_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - agents_.begin());
}

std::optional<std::size_t> Instance::object_index(const std::string& id) const {
  auto it = std::find(objects_.begin(), objects_.end(), id);
  if (it == objects_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - objects_.begin());
}

std::vector<std::size_t> Instance::acceptable_objects(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < objects_.size(); ++k)
    if (acceptable_[i][k]) out.push_back(k);
  return out;
}

Instance Instance::with_row(std::size_t i, std::vector<bool> row) const {
  auto acc = acceptable_;
  acc.at(i) = std::move(row);
  return Instance(agents_, objects_, std::move(acc), capacities_);
}

Instance Instance::restricted_to(const std::vector<std::size_t>& keep) const {
  std::vector<std::string> objs;
  std::vector<long> caps;
  for (std::size_t k : keep) {
    objs.push_back(objects_.at(k));
    caps.push_back(capacities_.at(k));
  }
  std::vector<std::vector<bool>> acc(agents_.size(), std::vector<bool>(keep.size()));
  for (std::size_t i = 0; i < agents_.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) acc[i][j] = acceptable_[i][keep[j]];
  return Instance(agents_, std::move(objs), std::move(acc), std::move(caps));
}

bool ObjectPartition::is_perfect(std::size_t k) const {
  return std::binary_search(perfect.begin(), perfect.end(), k);
}

Rational AssignmentMatrix::row_sum(std::size_t i) const {
  Rational s;
  for (std::size_t k = 0; k < m_; ++k) s += at(i, k);
  return s;
}

Rational AssignmentMatrix::column_sum(std::size_t k) const {
  Rational s;
  for (std::size_t i = 0; i < n_; ++i) s += at(i, k);
  return s;
}

UtilityProfile AssignmentMatrix::utilities() const {
  UtilityProfile u(n_);
  for (std::size_t i = 0; i < n_; ++i) u[i] = row_sum(i);
  return u;
}

bool AssignmentMatrix::is_binary() const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [](const Rational& x) { return x.is_zero() || x == Rational(1); });
}

std::string ram_violation(const Instance& inst, const AssignmentMatrix& z) {
  if (z.agents() != inst.agent_count() || z.objects() != inst.object_count())
    return "matrix shape does not match the instance";
  for (std::size_t i = 0; i < z.agents(); ++i) {
    for (std::size_t k = 0; k < z.objects(); ++k) {
      const Rational& v = z.at(i, k);
      if (v.sign() < 0 || v > Rational(1))
        return "share of " + inst.agent(i) + " in " + inst.object(k) + " is " + v.str() + ", outside [0,1]";
      if (!inst.accepts(i, k) && !v.is_zero())
        return inst.agent(i) + " receives unacceptable object " + inst.object(k);
    }
  }
  for (std::size_t k = 0; k < z.objects(); ++k) {
    const Rational s = z.column_sum(k);
    if (s > Rational(inst.effective_capacity(k)))
      return "column " + inst.object(k) + " allocates " + s.str() + " > capacity " +
             std::to_string(inst.effective_capacity(k));
  }
  return {};
}

ObjectPartition partition_objects(const Instance& inst) {
  ObjectPartition p;
  for (std::size_t k = 0; k < inst.object_count(); ++k) {
    if (inst.demand(k) <= inst.capacity(k))
      p.perfect.push_back(k);
    else
      p.over_demanded.push_back(k);
  }
  return p;
}

Instance perfect_extension(const Instance& inst, const AgentSet& acceptors, const std::string& id) {
  if (acceptors.empty()) throw std::invalid_argument("perfect extension needs at least one acceptor");
  auto objs = inst.objects();
  objs.push_back(id);
  auto caps = inst.capacities();
  caps.push_back(static_cast<long>(acceptors.size()));
  auto acc = inst.acceptable();
  for (auto& row : acc) row.push_back(false);
  for (std::size_t i : acceptors) acc.at(i).back() = true;
  return Instance(inst.agents(), std::move(objs), std::move(acc), std::move(caps));
}

long matching_size(const Instance& inst) {
  long total = 0;
  for (std::size_t k = 0; k < inst.object_count(); ++k) total += inst.effective_capacity(k);
  return total;
}

Instance make_instance(const std::vector<std::string>& agents,
                       const std::vector<std::pair<std::string, long>>& objects,
                       const std::vector<std::vector<std::string>>& acceptable) {
  std::vector<std::string> ids;
  std::vector<long> caps;
  for (const auto& [id, cap] : objects) {
    ids.push_back(id);
    caps.push_back(cap);
  }
  std::vector<std::vector<bool>> acc(agents.size(), std::vector<bool>(ids.size(), false));
  for (std::size_t i = 0; i < acceptable.size() && i < agents.size(); ++i) {
    for (const auto& obj : acceptable[i]) {
      auto it = std::find(ids.begin(), ids.end(), obj);
      if (it == ids.end()) throw InputError("acceptable." + agents[i], "unknown object \"" + obj + "\"");
      acc[i][static_cast<std::size_t>(it - ids.begin())] = true;
    }
  }
  return Instance(agents, std::move(ids), std::move(acc), std::move(caps));
}

}  // namespace mua
