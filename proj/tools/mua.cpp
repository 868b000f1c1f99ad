// mua: command-line front end for the solvers and audits.
//
// Exit codes: 0 pass, 2 input error, 3 cap refusal, 4 verification
// failure, 5 property violation.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "mua/audit.hpp"
#include "mua/competitive.hpp"
#include "mua/egalitarian.hpp"
#include "mua/fixtures.hpp"
#include "mua/io.hpp"
#include "mua/lottery.hpp"
#include "table.hpp"

using namespace mua;
using mua::cli::shown;

namespace {

enum Exit { kPass = 0, kInput = 2, kCap = 3, kVerify = 4, kViolation = 5 };

struct Globals {
  std::string format = "json";
  unsigned jobs = 1;
  int decimals = 2;
  CceCaps caps;
  std::size_t max_evaluations = std::size_t{1} << 20;
};

struct Outcome {
  Json result = Json::object();
  std::string table;
  int exit = kPass;
  std::string status = "pass";
};

// Default caps from MUA_CAPS, e.g. "max_objects=6,max_patterns=100000".
void apply_env_caps(Globals& g) {
  const char* env = std::getenv("MUA_CAPS");
  if (!env) return;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("MUA_CAPS", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    std::size_t value = 0;
    try {
      value = std::stoul(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("MUA_CAPS", "bad value for " + key);
    }
    if (key == "max_objects")
      g.caps.max_objects = value;
    else if (key == "max_patterns")
      g.caps.max_patterns = value;
    else if (key == "max_evaluations")
      g.max_evaluations = value;
    else
      throw InputError("MUA_CAPS", "unknown key " + key);
  }
}

std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string profile_string(const UtilityProfile& u) {
  std::string s;
  for (const auto& x : u) s += (s.empty() ? "" : " ") + x.str();
  return s;
}

Json load_json_file(const std::string& path, const std::string& flag) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(flag, std::string("not valid JSON: ") + e.what());
  }
}

AgentSet parse_agents(const Instance& inst, const std::vector<std::string>& names, const std::string& flag) {
  AgentSet out;
  for (const auto& name : names) {
    const auto i = inst.agent_index(name);
    if (!i) throw InputError(flag, "unknown agent " + name);
    out.push_back(*i);
  }
  return out;
}

std::vector<std::size_t> parse_order(const Instance& inst, const std::vector<std::string>& names) {
  const AgentSet order = parse_agents(inst, names, "--order");
  std::vector<bool> seen(inst.agent_count(), false);
  for (std::size_t i : order) {
    if (seen[i]) throw InputError("--order", "agent " + inst.agent(i) + " listed twice");
    seen[i] = true;
  }
  if (order.size() != inst.agent_count()) throw InputError("--order", "must list every agent exactly once");
  return order;
}

Json agent_names(const Instance& inst, const AgentSet& s) {
  Json a = Json::array();
  for (std::size_t i : s) a.push_back(inst.agent(i));
  return a;
}

Json interval_json(const Interval& r) { return Json{{"lo", r.lo.str()}, {"hi", r.hi.str()}}; }

Json equilibrium_json(const Instance& inst, const Equilibrium& eq) {
  return Json{{"utilities", profile_to_json(inst, eq.utilities())},
              {"ram", ram_to_json(inst, eq.ram)},
              {"prices", prices_to_json(inst, eq.prices)},
              {"certificate", eq.certificate}};
}

std::vector<std::vector<std::string>> acceptability_cells(const Instance& inst) {
  std::vector<std::vector<std::string>> cells(inst.agent_count());
  for (std::size_t i = 0; i < inst.agent_count(); ++i)
    for (std::size_t k = 0; k < inst.object_count(); ++k) cells[i].push_back(inst.accepts(i, k) ? "1" : "0");
  return cells;
}

std::vector<std::string> demand_totals(const Instance& inst) {
  std::vector<std::string> t;
  for (std::size_t k = 0; k < inst.object_count(); ++k) t.push_back(std::to_string(inst.demand(k)));
  return t;
}

// Acceptability matrix with one trailing per-agent column.
std::string preference_table(const Instance& inst, const std::string& label, const std::vector<std::string>& values,
                             const std::vector<std::string>& price_row = {}) {
  cli::MatrixView v;
  v.cells = acceptability_cells(inst);
  v.extra_header = {label};
  for (const auto& x : values) v.extra.push_back({x});
  v.totals = true;
  v.column_totals = demand_totals(inst);
  if (!price_row.empty()) {
    v.footer_label = {"p"};
    v.footer = {price_row};
  }
  return cli::render(cli::matrix_table(inst, v));
}

// Shares with the row sums as a Total column and prices underneath.
std::string ram_table(const Instance& inst, const AssignmentMatrix& z, int places,
                      const std::optional<PriceVector>& prices = std::nullopt) {
  cli::MatrixView v;
  v.cells.resize(inst.agent_count());
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    for (std::size_t k = 0; k < inst.object_count(); ++k) v.cells[i].push_back(shown(z.at(i, k), places));
    v.extra.push_back({shown(z.row_sum(i), places)});
  }
  v.extra_header = {"Total"};
  if (prices) {
    v.footer_label = {"p"};
    std::vector<std::string> row;
    for (const auto& p : *prices) row.push_back(shown(p, places));
    v.footer = {row};
  }
  return cli::render(cli::matrix_table(inst, v));
}

std::string kv_table(const std::vector<std::pair<std::string, std::string>>& rows) {
  cli::Table t;
  t.header = {"field", "value"};
  for (const auto& [k, v] : rows) t.rows.push_back({k, v});
  return cli::render(t);
}

SolverKind parse_solver(const std::string& s) {
  if (s == "es") return SolverKind::es;
  if (s == "es-star") return SolverKind::es_star;
  if (s == "epo") return SolverKind::epo;
  if (s == "priority") return SolverKind::priority;
  return SolverKind::cce;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string method;
  std::vector<std::string> order;
};

Outcome cmd_solve(const Instance& inst, const SolveArgs& a, const Globals& g) {
  Outcome out;
  UtilityProfile u;
  std::optional<AssignmentMatrix> ram;
  out.result["method"] = a.method;
  if (a.method == "es") {
    const LeximinResult r = es(inst);
    u = r.utilities;
    ram = r.ram;
    Json phases = Json::array();
    for (const auto& p : r.phases) phases.push_back({{"level", p.level.str()}, {"frozen", agent_names(inst, p.frozen)}});
    out.result["phases"] = phases;
  } else if (a.method == "es-star") {
    u = es_star(inst);
  } else if (a.method == "epo") {
    u = epo(inst);
  } else if (a.method == "rp") {
    u = random_priority_profile(inst);
  } else {
    if (a.order.empty()) throw InputError("--order", "required for method priority");
    const auto order = parse_order(inst, a.order);
    ram = priority(inst, order);
    u = ram->utilities();
    out.result["order"] = a.order;
  }
  out.result["profile"] = profile_string(u);
  out.result["utilities"] = profile_to_json(inst, u);
  if (ram) out.result["ram"] = ram_to_json(inst, *ram);

  std::vector<std::string> values;
  for (const auto& x : u) values.push_back(shown(x, g.decimals));
  out.table = preference_table(inst, a.method, values);
  if (ram) out.table += "\n" + ram_table(inst, *ram, g.decimals);
  return out;
}

// --- compare ---------------------------------------------------------------

Outcome cmd_compare(const Instance& inst, const Globals& g) {
  Outcome out;
  const UtilityProfile e = es(inst).utilities;
  const CceRange r = cce_utility_range(inst, g.caps);
  const UtilityProfile p = epo(inst);
  Json rows = Json::array();
  cli::Table t;
  t.header = {"N", "ES", "CCE", "EPO"};
  std::vector<std::vector<std::string>> cells;
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    rows.push_back({{"agent", inst.agent(i)},
                    {"es", e[i].str()},
                    {"cce", interval_json(r.utilities[i])},
                    {"epo", p[i].str()}});
    cells.push_back({shown(e[i], g.decimals), shown(r.utilities[i], g.decimals), shown(p[i], g.decimals)});
  }
  for (std::size_t i = 0; i < inst.agent_count();) {
    std::size_t j = i;
    while (j + 1 < inst.agent_count() && cells[j + 1] == cells[i] && inst.row(j + 1) == inst.row(i)) ++j;
    std::vector<std::string> row = {cli::run_label(inst.agents(), i, j)};
    row.insert(row.end(), cells[i].begin(), cells[i].end());
    t.rows.push_back(row);
    i = j + 1;
  }
  out.result["rows"] = rows;
  out.table = cli::render(t);
  return out;
}

// --- cce -------------------------------------------------------------------

struct CceArgs {
  std::string action;
  std::string equilibrium;
};

Outcome cmd_cce(const Instance& inst, const CceArgs& a, const Globals& g) {
  Outcome out;
  out.result["action"] = a.action;
  if (a.action == "find" || a.action == "ipo-selection") {
    const Equilibrium eq = a.action == "find" ? cce_find(inst, g.caps) : cce_ipo_selection(inst, g.caps);
    out.result["equilibrium"] = equilibrium_json(inst, eq);
    out.result["profile"] = profile_string(eq.utilities());
    out.table = ram_table(inst, eq.ram, g.decimals, eq.prices);
    return out;
  }
  if (a.action == "verify") {
    if (a.equilibrium.empty()) throw InputError("--equilibrium", "required for action verify");
    const Json doc = load_json_file(a.equilibrium, "--equilibrium");
    const bool wrapped = doc.is_object() && doc.contains("ram");
    const AssignmentMatrix z = ram_from_json(inst, wrapped ? doc["ram"] : doc);
    if (wrapped && doc.contains("prices")) {
      const PriceVector p = prices_from_json(inst, doc["prices"]);
      const Verification v = cce_verify(inst, z, p);
      if (const auto* bad = std::get_if<Violation>(&v)) {
        out.exit = kVerify;
        out.status = "verification-failed";
        out.result["verified"] = false;
        out.result["clause"] = bad->clause;
        out.result["message"] = bad->message;
        out.table = kv_table({{"verified", "no"}, {"clause", bad->clause}, {"message", bad->message}});
      } else {
        const auto& eq = std::get<Equilibrium>(v);
        out.result["verified"] = true;
        out.result["certificate"] = eq.certificate;
        std::string clauses;
        for (const auto& c : eq.certificate) clauses += (clauses.empty() ? "" : ", ") + c;
        out.table = kv_table({{"verified", "yes"}, {"clauses", clauses}});
      }
      return out;
    }
    // No prices given: search for any supporting price vector.
    const PriceSupport s = supporting_prices(inst, z);
    out.result["verified"] = s.feasible;
    if (s.feasible) {
      out.result["prices"] = prices_to_json(inst, s.prices);
      out.table = ram_table(inst, z, g.decimals, s.prices);
    } else {
      out.exit = kVerify;
      out.status = "verification-failed";
      out.result["message"] = s.reason;
      out.result["conflicts"] = s.conflicts;
      std::vector<std::pair<std::string, std::string>> rows = {{"verified", "no"}, {"reason", s.reason}};
      for (const auto& c : s.conflicts) rows.push_back({"conflict", c});
      out.table = kv_table(rows);
    }
    return out;
  }

  // range
  const CceRange r = cce_utility_range(inst, g.caps);
  Json agents = Json::array();
  std::vector<std::string> values;
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    agents.push_back({{"agent", inst.agent(i)},
                      {"range", interval_json(r.utilities[i])},
                      {"attained_lo", equilibrium_json(inst, r.lower_witness[i])},
                      {"attained_hi", equilibrium_json(inst, r.upper_witness[i])}});
    values.push_back(shown(r.utilities[i], g.decimals));
  }
  Json prices = Json::object();
  Json free = Json::array();
  std::vector<std::string> price_row;
  for (std::size_t k = 0; k < inst.object_count(); ++k) {
    prices[inst.object(k)] = interval_json(r.prices[k]);
    if (!r.prices[k].degenerate()) free.push_back(inst.object(k));
    price_row.push_back(shown(r.prices[k], g.decimals));
  }
  out.result["agents"] = agents;
  out.result["prices"] = prices;
  out.result["free_prices"] = free;
  out.result["patterns_enumerated"] = r.patterns_enumerated;
  out.result["patterns_feasible"] = r.patterns_feasible;
  out.table = preference_table(inst, "CCE", values, price_row);
  return out;
}

// --- audit -----------------------------------------------------------------

struct AuditArgs {
  std::string property;
  std::string solution = "es";
  std::size_t max_coalition = 3;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> acceptors;
  std::vector<std::string> coalition;
  std::vector<std::string> order;
};

Json witness_json(const Instance& inst, const ManipulationWitness& w, bool set_valued) {
  Json dropped = Json::object();
  for (std::size_t t = 0; t < w.coalition.size(); ++t) {
    Json objs = Json::array();
    for (std::size_t k : w.dropped[t]) objs.push_back(inst.object(k));
    dropped[inst.agent(w.coalition[t])] = objs;
  }
  Json j = {{"coalition", agent_names(inst, w.coalition)},
            {"dropped", dropped},
            {"misreport", instance_to_json(w.misreport)}};
  if (set_valued) {
    Json tr = Json::object(), mr = Json::object();
    for (std::size_t i = 0; i < inst.agent_count(); ++i) {
      tr[inst.agent(i)] = interval_json(w.truthful_range[i]);
      mr[inst.agent(i)] = interval_json(w.manipulated_range[i]);
    }
    j["truthful_range"] = tr;
    j["manipulated_range"] = mr;
    if (w.equilibrium) j["equilibrium"] = equilibrium_json(w.misreport, *w.equilibrium);
  } else {
    j["truthful"] = profile_to_json(inst, w.truthful);
    j["manipulated"] = profile_to_json(inst, w.manipulated);
  }
  return j;
}

std::string witness_summary(const Instance& inst, const ManipulationWitness& w) {
  std::string s = "{";
  for (std::size_t t = 0; t < w.coalition.size(); ++t) s += (t ? "," : "") + inst.agent(w.coalition[t]);
  s += "} dropping";
  for (std::size_t t = 0; t < w.coalition.size(); ++t) {
    s += " " + inst.agent(w.coalition[t]) + ":";
    std::string objs;
    for (std::size_t k : w.dropped[t]) objs += (objs.empty() ? "" : "+") + inst.object(k);
    s += objs.empty() ? "-" : objs;
  }
  return s;
}

Outcome audit_manipulate(const Instance& inst, const AuditArgs& a, const Globals& g) {
  Outcome out;
  const SolverKind kind = parse_solver(a.solution);
  ManipulationOptions opts;
  opts.max_coalition = a.max_coalition;
  opts.max_evaluations = g.max_evaluations;
  opts.cce_caps = g.caps;
  opts.jobs = g.jobs;
  if (!a.coalition.empty()) {
    AgentSet c = parse_agents(inst, a.coalition, "--coalition");
    std::sort(c.begin(), c.end());
    opts.coalition = c;
  }
  if (kind == SolverKind::priority)
    opts.priority_order = a.order.empty() ? std::vector<std::size_t>{} : parse_order(inst, a.order);
  if (kind == SolverKind::priority && opts.priority_order.empty()) {
    opts.priority_order.resize(inst.agent_count());
    std::iota(opts.priority_order.begin(), opts.priority_order.end(), 0);
  }
  const ManipulationReport r = manipulation_search(inst, kind, opts);
  const bool set_valued = kind == SolverKind::cce;
  out.result["search_space"] = r.search_space;
  out.result["examined"] = r.examined;
  out.result["evaluations"] = r.evaluations;
  out.result["complete"] = r.complete;
  if (!r.coverage_note.empty()) out.result["coverage_note"] = r.coverage_note;
  out.result["found"] = r.found ? witness_json(inst, *r.found, set_valued) : Json(nullptr);
  if (set_valued) out.result["found_strong"] = r.found_strong ? witness_json(inst, *r.found_strong, true) : Json(nullptr);

  std::vector<std::pair<std::string, std::string>> rows = {
      {"solution", a.solution},
      {"examined", std::to_string(r.examined) + " of " + std::to_string(r.search_space) + " joint misreports"},
      {"evaluations", std::to_string(r.evaluations)}};
  if (r.found) {
    out.exit = kViolation;
    out.status = "violation";
    rows.push_back({set_valued ? "found (some equilibrium improves)" : "found", witness_summary(inst, *r.found)});
    const auto& w = *r.found;
    for (std::size_t i : w.coalition) {
      if (set_valued)
        rows.push_back({inst.agent(i), shown(w.truthful_range[i], g.decimals) + " -> " +
                                           shown(w.manipulated_range[i], g.decimals)});
      else
        rows.push_back({inst.agent(i), w.truthful[i].str() + " -> " + w.manipulated[i].str()});
    }
  } else {
    rows.push_back({"found", "none"});
  }
  if (set_valued)
    rows.push_back({"found (every equilibrium improves)", r.found_strong ? witness_summary(inst, *r.found_strong) : "none"});
  if (!r.found && !r.complete) {
    out.exit = kCap;
    out.status = "cap";
    rows.push_back({"coverage", r.coverage_note});
  }
  out.table = kv_table(rows);
  return out;
}

Outcome audit_ipo(const Instance& inst, const AuditArgs& a, const Globals& g) {
  Outcome out;
  const SolverKind kind = parse_solver(a.solution);
  std::vector<std::size_t> order(inst.agent_count());
  std::iota(order.begin(), order.end(), 0);
  if (kind == SolverKind::priority && !a.order.empty()) order = parse_order(inst, a.order);
  SolutionFn solve = solver_function(kind, order);
  if (kind == SolverKind::cce) solve = [&](const Instance& x) { return cce_ipo_selection(x, g.caps).utilities(); };

  std::vector<AgentSet> candidates;
  if (!a.acceptors.empty()) {
    AgentSet s = parse_agents(inst, a.acceptors, "--acceptors");
    std::sort(s.begin(), s.end());
    candidates.push_back(s);
  } else {
    // Every acceptor set, largest first then lexicographic.
    const std::size_t n = inst.agent_count();
    if (n > 12) throw CapExceeded("ipo audit over every acceptor set needs n <= 12; pass --acceptors");
    for (std::size_t size = n; size >= 1; --size) {
      std::vector<bool> pick(n, false);
      std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
      do {
        AgentSet s;
        for (std::size_t i = 0; i < n; ++i)
          if (pick[i]) s.push_back(i);
        candidates.push_back(s);
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
  }

  Json checked = Json::array();
  std::vector<std::pair<std::string, std::string>> rows = {{"solution", a.solution}};
  for (const AgentSet& s : candidates) {
    const IpoReport r = ipo_check(inst, solve, s);
    if (r.passed()) {
      checked.push_back(agent_names(inst, s));
      continue;
    }
    Json detail = Json::array();
    rows.push_back({"acceptors", agent_names(inst, s).dump()});
    for (const auto& row : r.rows) {
      detail.push_back({{"agent", inst.agent(row.agent)},
                        {"before", row.before.str()},
                        {"after", row.after.str()},
                        {"expected", (row.before + Rational(1)).str()}});
      if (!row.passed())
        rows.push_back({inst.agent(row.agent), row.after.str() + " != " + (row.before + Rational(1)).str() +
                                                   " (before " + row.before.str() + ")"});
    }
    out.exit = kViolation;
    out.status = "violation";
    out.result["violation"] = {{"acceptors", agent_names(inst, s)}, {"rows", detail}};
    break;
  }
  out.result["passed_acceptor_sets"] = checked.size();
  if (out.exit == kPass) rows.push_back({"result", "pass on " + std::to_string(checked.size()) + " acceptor sets"});
  out.table = kv_table(rows);
  return out;
}

Outcome cmd_audit(const Instance& inst, const AuditArgs& a, const Globals& g) {
  Outcome out;
  const SolverKind kind = parse_solver(a.solution);
  if (a.property == "manipulate") {
    out = audit_manipulate(inst, a, g);
  } else if (a.property == "ipo") {
    out = audit_ipo(inst, a, g);
  } else if (a.property == "nonbossy") {
    if (kind != SolverKind::es) throw InputError("--solution", "nonbossy audit is defined for es only");
    const NonbossyReport r = nonbossy_check(inst, g.max_evaluations);
    Json v = Json::array();
    std::vector<std::pair<std::string, std::string>> rows = {
        {"examined", std::to_string(r.examined)}};
    for (const auto& b : r.violations) {
      Json drop = Json::array();
      for (std::size_t k : b.dropped) drop.push_back(inst.object(k));
      v.push_back({{"agent", inst.agent(b.agent)},
                   {"dropped", drop},
                   {"before", profile_to_json(inst, b.before)},
                   {"after", profile_to_json(inst, b.after)}});
      rows.push_back({"bossy " + inst.agent(b.agent), profile_string(b.before) + " -> " + profile_string(b.after)});
    }
    Json perfect = Json::array();
    for (const auto& p : r.perfect_drops) {
      perfect.push_back({{"agent", inst.agent(p.agent)},
                         {"object", inst.object(p.object)},
                         {"before", p.before.str()},
                         {"after", p.after.str()},
                         {"passed", p.passed()}});
      if (!p.passed())
        rows.push_back({"perfect drop " + inst.agent(p.agent) + "/" + inst.object(p.object),
                        p.before.str() + " -> " + p.after.str()});
    }
    out.result = {{"examined", r.examined}, {"complete", r.complete}, {"violations", v}, {"perfect_drops", perfect}};
    if (!r.passed()) {
      out.exit = kViolation;
      out.status = "violation";
    } else if (!r.complete) {
      out.exit = kCap;
      out.status = "cap";
    }
    rows.push_back({"result", out.status});
    out.table = kv_table(rows);
  } else {
    std::vector<std::size_t> order(inst.agent_count());
    std::iota(order.begin(), order.end(), 0);
    if (kind == SolverKind::priority && !a.order.empty()) order = parse_order(inst, a.order);
    const UtilityProfile u = kind == SolverKind::cce ? cce_ipo_selection(inst, g.caps).utilities()
                                                     : solver_function(kind, order)(inst);
    out.result["profile"] = profile_string(u);
    if (a.property == "lorenz") {
      const LorenzTestReport r = lorenz_dominance_test(inst, u, a.trials, a.seed);
      out.result["trials"] = r.trials;
      out.result["counterexamples"] = r.counterexamples;
      std::vector<std::pair<std::string, std::string>> rows = {
          {"solution", a.solution}, {"profile", profile_string(u)}, {"trials", std::to_string(r.trials)},
          {"counterexamples", std::to_string(r.counterexamples)}};
      if (!r.passed()) {
        out.exit = kViolation;
        out.status = "violation";
        out.result["first_counterexample"] = profile_to_json(inst, *r.first_counterexample);
        out.result["relation"] = to_string(r.first_verdict->relation);
        out.result["prefix"] = r.first_verdict->witness;
        rows.push_back({"first counterexample", profile_string(*r.first_counterexample)});
        rows.push_back({"relation", to_string(r.first_verdict->relation) + " at prefix " +
                                        std::to_string(r.first_verdict->witness)});
      }
      out.table = kv_table(rows);
    } else {
      const EnvyReport r = envy_check(inst, u);
      Json v = Json::array();
      std::vector<std::pair<std::string, std::string>> rows = {{"solution", a.solution}, {"profile", profile_string(u)}};
      for (const auto& e : r.violations) {
        v.push_back({{"i", inst.agent(e.i)}, {"j", inst.agent(e.j)}, {"equal_sets", e.equal_sets},
                     {"u_i", u[e.i].str()}, {"u_j", u[e.j].str()}});
        rows.push_back({inst.agent(e.i) + " vs " + inst.agent(e.j),
                        u[e.i].str() + (e.equal_sets ? " != " : " > ") + u[e.j].str()});
      }
      out.result["violations"] = v;
      if (!r.passed()) {
        out.exit = kViolation;
        out.status = "violation";
      }
      rows.push_back({"result", out.status});
      out.table = kv_table(rows);
    }
  }
  out.result["property"] = a.property;
  out.result["solution"] = a.solution;
  return out;
}

// --- decompose -------------------------------------------------------------

Outcome cmd_decompose(const Instance& inst, const std::string& ram_path, const std::optional<std::uint64_t>& seed) {
  Outcome out;
  const Json doc = load_json_file(ram_path, "--ram");
  const bool wrapped = doc.is_object() && doc.contains("ram") && doc["ram"].is_object();
  const AssignmentMatrix z = ram_from_json(inst, wrapped ? doc["ram"] : doc);
  const Lottery l = decompose(inst, z);
  const AssignmentMatrix back = reconstruct(l);
  out.result["components"] = lottery_to_json(inst, l);
  out.result["count"] = l.components.size();
  out.result["input_digest"] = digest(ram_to_json(inst, z).dump());
  out.result["reconstruction_digest"] = digest(ram_to_json(inst, back).dump());
  out.result["reconstructs"] = back == z;

  cli::Table t;
  t.header = {"#", "weight", "assignment"};
  for (std::size_t c = 0; c < l.components.size(); ++c) {
    std::string who;
    const auto& m = l.components[c].matrix;
    for (std::size_t i = 0; i < inst.agent_count(); ++i) {
      std::string objs;
      for (std::size_t k = 0; k < inst.object_count(); ++k)
        if (!m.at(i, k).is_zero()) objs += (objs.empty() ? "" : "+") + inst.object(k);
      if (!objs.empty()) who += (who.empty() ? "" : " ") + inst.agent(i) + ":" + objs;
    }
    t.rows.push_back({std::to_string(c + 1), l.components[c].weight.str(), who});
  }
  out.table = cli::render(t);
  if (seed) {
    const AssignmentMatrix& pick = sample(l, *seed);
    std::size_t index = 0;
    while (&l.components[index].matrix != &pick) ++index;
    out.result["sample"] = {{"seed", *seed}, {"component", index + 1},
                            {"assignment", binary_assignment_to_json(inst, pick)}};
    out.table += "sampled component " + std::to_string(index + 1) + " (seed " + std::to_string(*seed) + ")\n";
  }
  return out;
}

// --- fixtures --------------------------------------------------------------

Instance named_fixture(const std::string& name) {
  if (name == "ex1") return fixtures::ex1();
  if (name == "ex2") return fixtures::ex2();
  if (name == "ex3") return fixtures::ex3();
  if (name == "ex3-misreport") return fixtures::ex3_misreport();
  return fixtures::ex4();
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) s += (i > 1 ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solvers and audits for multi-unit assignment with dichotomous preferences"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  try {
    apply_env_caps(g);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }

  std::string instance_path, out_path;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--jobs", g.jobs, "Worker threads for manipulation searches")->check(CLI::Range(1u, 256u));
  app.add_option("--decimals", g.decimals, "Places shown in table output (exact values in json)")
      ->check(CLI::Range(0, 12));
  app.add_option("--max-objects", g.caps.max_objects, "Equilibrium enumeration cap on accepted objects");
  app.add_option("--max-patterns", g.caps.max_patterns, "Equilibrium enumeration cap on candidate patterns");
  app.add_option("--max-evaluations", g.max_evaluations, "Audit cap on solved misreports");
  app.add_flag("--tie-perfect-prices", g.caps.tie_perfect_prices,
               "Restrict equilibria to one common price on perfect objects");
  app.add_option("--out", out_path, "Write the output here instead of stdout");

  auto need_instance = [&](CLI::App* sub) {
    sub->add_option("--instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
  };

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Utilities (and RAM) of a single-valued solution");
  need_instance(solve);
  solve->add_option("--method", solve_args.method)
      ->required()
      ->check(CLI::IsMember({"es", "es-star", "epo", "priority", "rp"}));
  solve->add_option("--order", solve_args.order, "Priority order, e.g. a,b,c")->delimiter(',');

  auto* compare = app.add_subcommand("compare", "ES, equilibrium range and EPO side by side");
  need_instance(compare);

  CceArgs cce_args;
  auto* cce = app.add_subcommand("cce", "Competitive equilibrium from equal incomes");
  need_instance(cce);
  cce->add_option("--action", cce_args.action)
      ->required()
      ->check(CLI::IsMember({"find", "verify", "range", "ipo-selection"}));
  cce->add_option("--equilibrium", cce_args.equilibrium, "RAM (with optional prices) to verify")
      ->check(CLI::ExistingFile);

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit", "Property audits");
  need_instance(audit);
  audit->add_option("--property", audit_args.property)
      ->required()
      ->check(CLI::IsMember({"lorenz", "envy", "ipo", "manipulate", "nonbossy"}));
  audit->add_option("--solution", audit_args.solution)
      ->check(CLI::IsMember({"es", "es-star", "epo", "cce", "priority"}));
  audit->add_option("--max-coalition", audit_args.max_coalition)->check(CLI::PositiveNumber);
  audit->add_option("--trials", audit_args.trials);
  audit->add_option("--seed", audit_args.seed);
  audit->add_option("--acceptors", audit_args.acceptors, "Acceptors of the added perfect object")->delimiter(',');
  audit->add_option("--coalition", audit_args.coalition, "Restrict the search to this coalition")->delimiter(',');
  audit->add_option("--order", audit_args.order, "Priority order (default: listed order)")->delimiter(',');

  std::string ram_path;
  std::optional<std::uint64_t> sample_seed;
  auto* dec = app.add_subcommand("decompose", "Lottery over deterministic assignments");
  need_instance(dec);
  dec->add_option("--ram", ram_path, "RAM JSON")->required()->check(CLI::ExistingFile);
  dec->add_option("--sample-seed", sample_seed);

  std::string fixture_name;
  auto* fixture = app.add_subcommand("fixture", "Print a built-in instance document");
  fixture->add_option("--name", fixture_name)
      ->required()
      ->check(CLI::IsMember({"ex1", "ex2", "ex3", "ex3-misreport", "ex4"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  auto emit = [&](const std::string& text) {
    if (out_path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return;
    }
    f << text;
  };

  if (fixture->parsed()) {
    emit(serialize_instance(named_fixture(fixture_name)) + "\n");
    return kPass;
  }

  const auto start = std::chrono::steady_clock::now();
  Json report = {{"command", join_args(argc, argv)}};
  Outcome out;
  std::string error;
  try {
    const Instance inst = load_instance(read_file(instance_path));
    report["instance"] = {{"path", instance_path},
                          {"digest", digest(serialize_instance(inst))},
                          {"agents", inst.agent_count()},
                          {"objects", inst.object_count()}};
    if (solve->parsed())
      out = cmd_solve(inst, solve_args, g);
    else if (compare->parsed())
      out = cmd_compare(inst, g);
    else if (cce->parsed())
      out = cmd_cce(inst, cce_args, g);
    else if (audit->parsed())
      out = cmd_audit(inst, audit_args, g);
    else
      out = cmd_decompose(inst, ram_path, sample_seed);
  } catch (const InputError& e) {
    out.exit = kInput;
    out.status = "input-error";
    out.result = {{"where", e.where()}, {"message", e.what()}};
    error = e.what();
  } catch (const CapExceeded& e) {
    out.exit = kCap;
    out.status = "cap";
    out.result = {{"message", e.what()}};
    error = e.what();
  } catch (const std::invalid_argument& e) {
    out.exit = kInput;
    out.status = "input-error";
    out.result = {{"message", e.what()}};
    error = e.what();
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (g.format == "table") {
    if (!error.empty()) {
      std::cerr << "error: " << error << "\n";
      return out.exit;
    }
    emit(out.table);
    return out.exit;
  }
  report["result"] = out.result;
  report["status"] = out.status;
  report["exit"] = out.exit;
  report["elapsed_ms"] = std::round(ms * 1000) / 1000;
  emit(report.dump(2) + "\n");
  return out.exit;
}
