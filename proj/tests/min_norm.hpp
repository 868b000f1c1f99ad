#pragma once

// Wolfe's minimum-norm-point algorithm over the base polytope of the
// coalition value, in doubles. argmin sum U_i^2 over the efficient
// profiles; independent of the water-filling code path.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mua/instance.hpp"

namespace testutil {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Vertex minimizing <w, v>: agents in ascending w take their marginal
// units greedily.
inline Vec greedy_min_vertex(const mua::Instance& inst, const Vec& w) {
  const std::size_t n = inst.agent_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
  std::vector<long> taken(inst.object_count(), 0);
  Vec v(n, 0);
  for (std::size_t i : order) {
    for (std::size_t k = 0; k < inst.object_count(); ++k) {
      if (inst.accepts(i, k) && taken[k] < inst.effective_capacity(k)) {
        v[i] += 1;
        ++taken[k];
      }
    }
  }
  return v;
}

// Solves the small dense system a x = b by partial pivoting.
inline Vec solve_dense(std::vector<Vec> a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[c][c] == 0) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][i] == 0 ? 0 : b[i] / a[i][i];
  return x;
}

// Affine minimizer: weights alpha (sum 1) of the min-norm point of aff(S).
inline Vec affine_weights(const std::vector<Vec>& s) {
  const std::size_t k = s.size();
  std::vector<Vec> a(k + 1, Vec(k + 1, 0));
  Vec b(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = dot(s[i], s[j]);
    a[i][k] = 1;
    a[k][i] = 1;
  }
  b[k] = 1;
  Vec x = solve_dense(a, b);
  x.pop_back();
  return x;
}

inline Vec min_norm_point(const mua::Instance& inst, double tol = 1e-12) {
  const std::size_t n = inst.agent_count();
  std::vector<Vec> s = {greedy_min_vertex(inst, Vec(n, 0))};
  Vec lambda = {1};
  Vec x = s[0];
  for (int major = 0; major < 10000; ++major) {
    const Vec q = greedy_min_vertex(inst, x);
    if (dot(x, x) - dot(x, q) <= tol * std::max(1.0, dot(x, x))) break;
    if (std::find(s.begin(), s.end(), q) != s.end()) break;
    s.push_back(q);
    lambda.push_back(0);
    while (true) {
      const Vec alpha = affine_weights(s);
      Vec y(n, 0);
      for (std::size_t j = 0; j < s.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) y[i] += alpha[j] * s[j][i];
      if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a > 1e-14; })) {
        x = y;
        lambda = alpha;
        break;
      }
      double theta = 1;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (alpha[j] <= 1e-14) theta = std::min(theta, lambda[j] / (lambda[j] - alpha[j]));
      for (std::size_t i = 0; i < n; ++i) x[i] = theta * y[i] + (1 - theta) * x[i];
      for (std::size_t j = 0; j < s.size(); ++j) lambda[j] = theta * alpha[j] + (1 - theta) * lambda[j];
      std::vector<Vec> keep;
      Vec keep_lambda;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (lambda[j] > 1e-14) {
          keep.push_back(s[j]);
          keep_lambda.push_back(lambda[j]);
        }
      }
      s = keep;
      lambda = keep_lambda;
    }
  }
  return x;
}

}  // namespace testutil
