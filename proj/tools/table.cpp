#include "table.hpp"

#include <algorithm>

namespace mua::cli {

std::string shown(const Rational& x, int places) {
  std::string s = x.decimal(places);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string shown(const Interval& r, int places) {
  if (r.degenerate()) return shown(r.lo, places);
  return "[" + shown(r.lo, places) + " - " + shown(r.hi, places) + "]";
}

std::string render(const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  auto measure = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  };
  measure(t.header);
  for (const auto& r : t.rows) measure(r);

  std::size_t total = 0;
  for (std::size_t w : width) total += w + 3;
  const std::string rule(total > 3 ? total - 3 : 0, '-');

  auto line = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < row.size() ? row[c] : "";
      if (c) s += " | ";
      s += cell + std::string(width[c] - cell.size(), ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
  };

  std::string out = line(t.header) + rule + "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (std::find(t.rules.begin(), t.rules.end(), r) != t.rules.end()) out += rule + "\n";
    out += line(t.rows[r]);
  }
  return out;
}

std::string run_label(const std::vector<std::string>& names, std::size_t first, std::size_t last) {
  if (first == last) return names[first];
  if (last == first + 1) return names[first] + "," + names[last];
  return names[first] + ":" + names[last];
}

Table matrix_table(const Instance& inst, const MatrixView& v) {
  const std::size_t n = inst.agent_count();
  const std::size_t m = inst.object_count();

  auto column = [&](std::size_t k) {
    std::vector<std::string> col;
    for (std::size_t i = 0; i < n; ++i) col.push_back(v.cells[i][k]);
    col.push_back(std::to_string(inst.capacity(k)));
    for (const auto& f : v.footer) col.push_back(f[k]);
    return col;
  };
  std::vector<std::pair<std::size_t, std::size_t>> cols;
  for (std::size_t k = 0; k < m; ++k) {
    if (!cols.empty() && column(cols.back().second) == column(k))
      cols.back().second = k;
    else
      cols.push_back({k, k});
  }

  Table t;
  t.header.push_back("N \\ M");
  for (auto [a, b] : cols) t.header.push_back(run_label(inst.objects(), a, b));
  for (const auto& h : v.extra_header) t.header.push_back(h);

  auto cells = [&](std::size_t i) {
    std::vector<std::string> row;
    for (auto [a, b] : cols) row.push_back(v.cells[i][a]);
    for (const auto& e : v.extra[i]) row.push_back(e);
    return row;
  };
  for (std::size_t i = 0; i < n;) {
    std::size_t e = i;
    while (e + 1 < n && cells(e + 1) == cells(i)) ++e;
    std::vector<std::string> row = {run_label(inst.agents(), i, e)};
    for (auto& c : cells(i)) row.push_back(c);
    t.rows.push_back(row);
    i = e + 1;
  }

  if (v.totals) {
    t.rules.push_back(t.rows.size());
    std::vector<std::string> total = {"Total"};
    for (auto [a, b] : cols) total.push_back(v.column_totals[a]);
    t.rows.push_back(total);
    t.rules.push_back(t.rows.size());
    std::vector<std::string> q = {"q"};
    for (auto [a, b] : cols) q.push_back(std::to_string(inst.capacity(a)));
    t.rows.push_back(q);
  }
  for (std::size_t f = 0; f < v.footer.size(); ++f) {
    if (!v.totals && f == 0) t.rules.push_back(t.rows.size());
    std::vector<std::string> row = {v.footer_label[f]};
    for (auto [a, b] : cols) row.push_back(v.footer[f][a]);
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace mua::cli
