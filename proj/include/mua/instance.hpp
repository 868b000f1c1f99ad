#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mua/rational.hpp"

namespace mua {

// Raised for malformed documents and instances that break a structural
// rule; `where` names the offending location (e.g. "objects[0].capacity").
class InputError : public std::runtime_error {
 public:
  InputError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Raised when an exhaustive procedure would exceed its configured cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sorted agent indices.
using AgentSet = std::vector<std::size_t>;

// One exact expected object count per agent.
using UtilityProfile = std::vector<Rational>;

// A multi-unit assignment problem: binary acceptability plus capacities.
// Immutable once built. Objects nobody accepts are tolerated here (they
// arise from misreports) but rejected by the document loader.
class Instance {
 public:
  Instance(std::vector<std::string> agents, std::vector<std::string> objects,
           std::vector<std::vector<bool>> acceptable, std::vector<long> capacities);

  std::size_t agent_count() const { return agents_.size(); }
  std::size_t object_count() const { return objects_.size(); }
  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::string& agent(std::size_t i) const { return agents_.at(i); }
  const std::string& object(std::size_t k) const { return objects_.at(k); }
  std::optional<std::size_t> agent_index(const std::string& id) const;
  std::optional<std::size_t> object_index(const std::string& id) const;

  bool accepts(std::size_t i, std::size_t k) const { return acceptable_[i][k]; }
  const std::vector<bool>& row(std::size_t i) const { return acceptable_[i]; }
  const std::vector<std::vector<bool>>& acceptable() const { return acceptable_; }
  std::vector<std::size_t> acceptable_objects(std::size_t i) const;

  long capacity(std::size_t k) const { return capacities_[k]; }
  const std::vector<long>& capacities() const { return capacities_; }
  // min(q_k, |R_Nk|): the capacity every solver actually uses.
  long effective_capacity(std::size_t k) const { return effective_[k]; }
  // |R_Nk|
  long demand(std::size_t k) const { return demand_[k]; }
  // |R_iM|
  long row_size(std::size_t i) const { return row_size_[i]; }
  // |R_Nk| >= q_k for every k.
  bool demand_adequate() const { return adequate_; }

  // Bitmask of accepting agents per object; requires n <= 64.
  std::uint64_t column_mask(std::size_t k) const { return masks_.at(k); }
  bool has_masks() const { return !masks_.empty(); }

  // Copy with agent i's acceptable row replaced.
  Instance with_row(std::size_t i, std::vector<bool> row) const;
  // Copy keeping only the listed objects (in the given order).
  Instance restricted_to(const std::vector<std::size_t>& objects) const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.agents_ == b.agents_ && a.objects_ == b.objects_ &&
           a.acceptable_ == b.acceptable_ && a.capacities_ == b.capacities_;
  }

 private:
  std::vector<std::string> agents_;
  std::vector<std::string> objects_;
  std::vector<std::vector<bool>> acceptable_;
  std::vector<long> capacities_;
  std::vector<long> effective_;
  std::vector<long> demand_;
  std::vector<long> row_size_;
  std::vector<std::uint64_t> masks_;
  bool adequate_ = true;
};

// Perfect objects have total demand equal to (effective) supply.
struct ObjectPartition {
  std::vector<std::size_t> perfect;
  std::vector<std::size_t> over_demanded;

  bool is_perfect(std::size_t k) const;
};

// Agents x objects matrix of exact shares.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(std::size_t agents, std::size_t objects)
      : n_(agents), m_(objects), cells_(agents * objects) {}

  std::size_t agents() const { return n_; }
  std::size_t objects() const { return m_; }
  Rational& at(std::size_t i, std::size_t k) { return cells_[i * m_ + k]; }
  const Rational& at(std::size_t i, std::size_t k) const { return cells_[i * m_ + k]; }

  Rational row_sum(std::size_t i) const;
  Rational column_sum(std::size_t k) const;
  UtilityProfile utilities() const;
  bool is_binary() const;

  friend bool operator==(const AssignmentMatrix& a, const AssignmentMatrix& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<Rational> cells_;
};

// Returns an empty string when `z` satisfies 0 <= z <= 1, column sums
// within effective capacity and individual rationality; otherwise a
// description of the first violation.
std::string ram_violation(const Instance& inst, const AssignmentMatrix& z);

ObjectPartition partition_objects(const Instance& inst);

// Appends one object acceptable exactly to `acceptors` with capacity
// |acceptors|. The new object's id is `id` (default "k'").
Instance perfect_extension(const Instance& inst, const AgentSet& acceptors,
                           const std::string& id = "k'");

// Sum over objects of min(q_k, |R_Nk|).
long matching_size(const Instance& inst);

// Builds an instance from per-agent acceptable id lists.
Instance make_instance(const std::vector<std::string>& agents,
                       const std::vector<std::pair<std::string, long>>& objects,
                       const std::vector<std::vector<std::string>>& acceptable);

}  // namespace mua
