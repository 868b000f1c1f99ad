#include "mua/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mua {

namespace {

template <typename T>
struct Num;

template <>
struct Num<mpq_class> {
  static bool pos(const mpq_class& x) { return sgn(x) > 0; }
  static bool neg(const mpq_class& x) { return sgn(x) < 0; }
  static bool zero(const mpq_class& x) { return sgn(x) == 0; }
  static bool less(const mpq_class& a, const mpq_class& b) { return a < b; }
  static bool same(const mpq_class& a, const mpq_class& b) { return a == b; }
  static mpq_class from(const Rational& r) { return r.raw(); }
};

template <>
struct Num<double> {
  static constexpr double eps = 1e-9;
  static bool pos(double x) { return x > eps; }
  static bool neg(double x) { return x < -eps; }
  static bool zero(double x) { return std::fabs(x) <= eps; }
  static bool less(double a, double b) { return a < b - eps; }
  static bool same(double a, double b) { return std::fabs(a - b) <= eps; }
  static double from(const Rational& r) { return r.to_double(); }
};

}  // namespace

template <typename T>
class Simplex {
  using N = Num<T>;

 public:
  explicit Simplex(const LinearProgram& lp) : structural_(lp.vars_) {
    std::size_t slack_count = 0;
    std::size_t art_count = 0;
    for (const auto& row : lp.rows_) {
      if (row.sense != Sense::equal) ++slack_count;
      if (row.sense != Sense::less_equal) ++art_count;
    }
    // A <= row whose right-hand side is negative flips into a >= row.
    for (const auto& row : lp.rows_)
      if (row.sense == Sense::less_equal && row.rhs.sign() < 0) ++art_count;
    first_art_ = structural_ + slack_count;
    cols_ = first_art_ + art_count;

    std::size_t next_slack = structural_;
    std::size_t next_art = first_art_;
    for (const auto& row : lp.rows_) {
      std::vector<T> coeffs(cols_, T(0));
      for (const auto& t : row.terms) {
        if (t.var >= structural_) throw std::out_of_range("LP term refers to unknown variable");
        coeffs[t.var] += N::from(t.coef);
      }
      T rhs = N::from(row.rhs);
      Sense sense = row.sense;
      const bool flip = rhs < T(0);
      if (flip) {
        for (auto& c : coeffs) c = -c;
        rhs = -rhs;
        if (sense == Sense::less_equal)
          sense = Sense::greater_equal;
        else if (sense == Sense::greater_equal)
          sense = Sense::less_equal;
      }
      flipped_.push_back(flip);
      std::size_t basic = 0;
      if (sense == Sense::less_equal) {
        coeffs[next_slack] = T(1);
        basic = next_slack++;
      } else if (sense == Sense::greater_equal) {
        coeffs[next_slack++] = T(-1);
        coeffs[next_art] = T(1);
        basic = next_art++;
      } else {
        coeffs[next_art] = T(1);
        basic = next_art++;
      }
      unit_.push_back(basic);
      a_.push_back(std::move(coeffs));
      rhs_.push_back(rhs);
      basis_.push_back(basic);
    }
    cols_ = next_art;
    for (auto& r : a_) r.resize(cols_);
  }

  // On phase-1 infeasibility `farkas` (if given) receives the phase-1 dual
  // in the orientation of the original rows.
  LpStatus run(const std::vector<LpTerm>& objective, T& value, std::vector<T>& x,
               std::vector<T>* farkas = nullptr) {
    // Phase 1: drive artificial variables to zero.
    std::vector<T> cost(cols_, T(0));
    for (std::size_t j = first_art_; j < cols_; ++j) cost[j] = T(-1);
    std::vector<bool> eligible(cols_, true);
    T phase1 = T(0);
    std::vector<T> reduced;
    if (optimize(cost, eligible, phase1, &reduced) != LpStatus::optimal) return LpStatus::infeasible;
    if (N::neg(phase1)) {
      if (farkas != nullptr) {
        farkas->clear();
        for (std::size_t r = 0; r < unit_.size(); ++r) {
          const T y = cost[unit_[r]] - reduced[unit_[r]];
          farkas->push_back(flipped_[r] ? T(-y) : y);
        }
      }
      return LpStatus::infeasible;
    }

    for (std::size_t r = 0; r < a_.size();) {
      if (basis_[r] < first_art_) {
        ++r;
        continue;
      }
      std::size_t col = cols_;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (!N::zero(a_[r][j])) {
          col = j;
          break;
        }
      }
      if (col == cols_) {
        a_.erase(a_.begin() + static_cast<long>(r));
        rhs_.erase(rhs_.begin() + static_cast<long>(r));
        basis_.erase(basis_.begin() + static_cast<long>(r));
        continue;
      }
      pivot(r, col, nullptr, nullptr);
      ++r;
    }

    std::fill(cost.begin(), cost.end(), T(0));
    for (const auto& t : objective) cost[t.var] += N::from(t.coef);
    for (std::size_t j = first_art_; j < cols_; ++j) eligible[j] = false;
    const LpStatus status = optimize(cost, eligible, value);
    if (status != LpStatus::optimal) return status;
    x.assign(structural_, T(0));
    for (std::size_t r = 0; r < a_.size(); ++r)
      if (basis_[r] < structural_) x[basis_[r]] = rhs_[r];
    return LpStatus::optimal;
  }

 private:
  void pivot(std::size_t p, std::size_t c, std::vector<T>* reduced, T* value) {
    const T piv = a_[p][c];
    for (auto& v : a_[p]) {
      if (!N::zero(v)) v /= piv;
    }
    rhs_[p] /= piv;
    a_[p][c] = T(1);
    for (std::size_t r = 0; r < a_.size(); ++r) {
      if (r == p || N::zero(a_[r][c])) continue;
      const T f = a_[r][c];
      for (std::size_t j = 0; j < cols_; ++j)
        if (!N::zero(a_[p][j])) a_[r][j] -= f * a_[p][j];
      rhs_[r] -= f * rhs_[p];
      a_[r][c] = T(0);
    }
    if (reduced != nullptr && !N::zero((*reduced)[c])) {
      const T f = (*reduced)[c];
      for (std::size_t j = 0; j < cols_; ++j)
        if (!N::zero(a_[p][j])) (*reduced)[j] -= f * a_[p][j];
      (*reduced)[c] = T(0);
      *value += f * rhs_[p];
    }
    basis_[p] = c;
  }

  LpStatus optimize(const std::vector<T>& cost, const std::vector<bool>& eligible, T& value,
                    std::vector<T>* reduced_out = nullptr) {
    std::vector<T> local;
    std::vector<T>& reduced = reduced_out != nullptr ? *reduced_out : local;
    reduced = cost;
    value = T(0);
    for (std::size_t r = 0; r < a_.size(); ++r) {
      const T cb = cost[basis_[r]];
      if (N::zero(cb)) continue;
      for (std::size_t j = 0; j < cols_; ++j)
        if (!N::zero(a_[r][j])) reduced[j] -= cb * a_[r][j];
      value += cb * rhs_[r];
    }
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (eligible[j] && N::pos(reduced[j])) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return LpStatus::optimal;
      std::size_t leave = a_.size();
      T best = T(0);
      for (std::size_t r = 0; r < a_.size(); ++r) {
        if (!N::pos(a_[r][enter])) continue;
        T ratio = rhs_[r] / a_[r][enter];
        if (leave == a_.size() || N::less(ratio, best) ||
            (N::same(ratio, best) && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == a_.size()) return LpStatus::unbounded;
      pivot(leave, enter, &reduced, &value);
    }
  }

  std::size_t structural_;
  std::size_t first_art_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<T>> a_;
  std::vector<T> rhs_;
  std::vector<std::size_t> basis_;
  // Per original row: its initial unit column and whether it was negated.
  std::vector<std::size_t> unit_;
  std::vector<bool> flipped_;
};

void LinearProgram::add(std::vector<LpTerm> terms, Sense sense, Rational rhs) {
  rows_.push_back({std::move(terms), sense, std::move(rhs)});
}

void LinearProgram::minimize(std::vector<LpTerm> objective) {
  for (auto& t : objective) t.coef = -t.coef;
  objective_ = std::move(objective);
  minimizing_ = true;
}

bool LinearProgram::certifies_infeasible(const std::vector<double>& y) const {
  if (y.size() != rows_.size()) return false;
  double scale = 0;
  for (double v : y) scale = std::max(scale, std::fabs(v));
  if (!(scale > 0) || !std::isfinite(scale)) return false;
  std::vector<Rational> yq;
  for (double v : y) yq.push_back(approximate(v / scale, 1L << 20));
  // y_le >= 0, y_ge <= 0, y.A >= 0 and y.b < 0 rule out every x >= 0.
  std::vector<Rational> combo(vars_);
  Rational rhs;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Rational& w = yq[r];
    if (w.is_zero()) continue;
    if (rows_[r].sense == Sense::less_equal && w.sign() < 0) return false;
    if (rows_[r].sense == Sense::greater_equal && w.sign() > 0) return false;
    for (const auto& t : rows_[r].terms) combo[t.var] += w * t.coef;
    rhs += w * rows_[r].rhs;
  }
  if (rhs.sign() >= 0) return false;
  return std::all_of(combo.begin(), combo.end(), [](const Rational& c) { return c.sign() >= 0; });
}

LpResult LinearProgram::solve() const {
  {
    // Cheap screen: a floating phase 1 that reports infeasibility, backed by
    // an exactly checked Farkas certificate, settles the LP.
    Simplex<double> screen(*this);
    double value = 0;
    std::vector<double> x, farkas;
    if (screen.run(objective_, value, x, &farkas) == LpStatus::infeasible && certifies_infeasible(farkas))
      return LpResult{};
  }
  Simplex<mpq_class> simplex(*this);
  mpq_class value;
  std::vector<mpq_class> x;
  LpResult result;
  result.status = simplex.run(objective_, value, x);
  if (result.status == LpStatus::optimal) {
    result.objective = minimizing_ ? -Rational(value) : Rational(value);
    result.x.reserve(x.size());
    for (auto& v : x) result.x.push_back(Rational(v));
  }
  return result;
}

LpStatus LinearProgram::solve_approx() const {
  Simplex<double> simplex(*this);
  double value = 0;
  std::vector<double> x;
  return simplex.run(objective_, value, x);
}

}  // namespace mua
