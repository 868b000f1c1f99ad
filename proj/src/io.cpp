#include "mua/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mua {

namespace {

std::string at_key(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

}  // namespace

Instance load_instance(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("document", std::string("parse error: ") + e.what());
  }
  return instance_from_json(doc);
}

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("document", "top level must be an object");
  for (const char* key : {"agents", "objects", "acceptable"}) {
    if (!doc.contains(key)) throw InputError(key, "missing field");
  }
  const Json& agents_json = doc["agents"];
  if (!agents_json.is_array()) throw InputError("agents", "must be an array of ids");
  std::vector<std::string> agents;
  for (std::size_t i = 0; i < agents_json.size(); ++i) {
    if (!agents_json[i].is_string())
      throw InputError("agents[" + std::to_string(i) + "]", "agent id must be a string");
    agents.push_back(agents_json[i].get<std::string>());
  }

  const Json& objects_json = doc["objects"];
  if (!objects_json.is_array()) throw InputError("objects", "must be an array");
  std::vector<std::string> objects;
  std::vector<long> caps;
  for (std::size_t k = 0; k < objects_json.size(); ++k) {
    const std::string where = "objects[" + std::to_string(k) + "]";
    const Json& o = objects_json[k];
    if (!o.is_object() || !o.contains("id") || !o["id"].is_string())
      throw InputError(where, "object needs a string \"id\"");
    if (!o.contains("capacity") || !o["capacity"].is_number_integer())
      throw InputError(where + ".capacity", "capacity must be an integer");
    const long cap = o["capacity"].get<long>();
    if (cap <= 0) throw InputError(where + ".capacity", "capacity must be a positive integer");
    objects.push_back(o["id"].get<std::string>());
    caps.push_back(cap);
  }

  const Json& acc_json = doc["acceptable"];
  if (!acc_json.is_object()) throw InputError("acceptable", "must map agent ids to object lists");
  std::vector<std::vector<bool>> acc(agents.size(), std::vector<bool>(objects.size(), false));
  for (auto it = acc_json.begin(); it != acc_json.end(); ++it) {
    const std::string where = at_key("acceptable", it.key());
    auto ai = std::find(agents.begin(), agents.end(), it.key());
    if (ai == agents.end()) throw InputError(where, "unknown agent");
    const std::size_t i = static_cast<std::size_t>(ai - agents.begin());
    if (!it.value().is_array()) throw InputError(where, "must be an array");
    const Json& row = it.value();
    const bool numeric = !row.empty() && row[0].is_number();
    if (numeric && row.size() != objects.size())
      throw InputError(where, "0/1 row must have one entry per object");
    for (std::size_t j = 0; j < row.size(); ++j) {
      const std::string cell = where + "[" + std::to_string(j) + "]";
      if (numeric) {
        if (!row[j].is_number_integer() || (row[j].get<long>() != 0 && row[j].get<long>() != 1))
          throw InputError(cell, "non-binary entry");
        acc[i][j] = row[j].get<long>() == 1;
      } else {
        if (!row[j].is_string()) throw InputError(cell, "object id must be a string");
        auto oi = std::find(objects.begin(), objects.end(), row[j].get<std::string>());
        if (oi == objects.end()) throw InputError(cell, "unknown object \"" + row[j].get<std::string>() + "\"");
        acc[i][static_cast<std::size_t>(oi - objects.begin())] = true;
      }
    }
  }

  Instance inst(std::move(agents), std::move(objects), std::move(acc), std::move(caps));
  for (std::size_t k = 0; k < inst.object_count(); ++k) {
    if (inst.demand(k) == 0)
      throw InputError("objects[" + std::to_string(k) + "]",
                       "object \"" + inst.object(k) + "\" is acceptable to no agent");
  }
  return inst;
}

Json instance_to_json(const Instance& inst) {
  Json doc;
  doc["agents"] = inst.agents();
  Json objs = Json::array();
  for (std::size_t k = 0; k < inst.object_count(); ++k)
    objs.push_back({{"id", inst.object(k)}, {"capacity", inst.capacity(k)}});
  doc["objects"] = objs;
  Json acc = Json::object();
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    Json row = Json::array();
    for (std::size_t k : inst.acceptable_objects(i)) row.push_back(inst.object(k));
    acc[inst.agent(i)] = row;
  }
  doc["acceptable"] = acc;
  return doc;
}

std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(2); }

Rational rational_from_json(const Json& value, const std::string& where) {
  try {
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long>());
  } catch (const std::invalid_argument& e) {
    throw InputError(where, e.what());
  }
  throw InputError(where, "expected a rational string \"p/q\"");
}

Json profile_to_json(const Instance& inst, const UtilityProfile& u) {
  Json out = Json::object();
  for (std::size_t i = 0; i < u.size(); ++i) out[inst.agent(i)] = u[i].str();
  return out;
}

Json ram_to_json(const Instance& inst, const AssignmentMatrix& z) {
  Json out = Json::object();
  for (std::size_t i = 0; i < z.agents(); ++i) {
    Json row = Json::object();
    for (std::size_t k = 0; k < z.objects(); ++k)
      if (!z.at(i, k).is_zero()) row[inst.object(k)] = z.at(i, k).str();
    out[inst.agent(i)] = row;
  }
  return out;
}

AssignmentMatrix ram_from_json(const Instance& inst, const Json& doc) {
  if (!doc.is_object()) throw InputError("ram", "must map agent ids to {object: share}");
  AssignmentMatrix z(inst.agent_count(), inst.object_count());
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string where = "ram." + it.key();
    auto i = inst.agent_index(it.key());
    if (!i) throw InputError(where, "unknown agent");
    if (!it.value().is_object()) throw InputError(where, "must map object ids to shares");
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
      auto k = inst.object_index(jt.key());
      if (!k) throw InputError(where + "." + jt.key(), "unknown object");
      z.at(*i, *k) = rational_from_json(jt.value(), where + "." + jt.key());
    }
  }
  return z;
}

Json prices_to_json(const Instance& inst, const std::vector<Rational>& prices) {
  Json out = Json::object();
  for (std::size_t k = 0; k < prices.size(); ++k) out[inst.object(k)] = prices[k].str();
  return out;
}

std::vector<Rational> prices_from_json(const Instance& inst, const Json& doc) {
  if (!doc.is_object()) throw InputError("prices", "must map object ids to prices");
  std::vector<Rational> p(inst.object_count());
  std::vector<bool> seen(inst.object_count(), false);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto k = inst.object_index(it.key());
    if (!k) throw InputError("prices." + it.key(), "unknown object");
    p[*k] = rational_from_json(it.value(), "prices." + it.key());
    seen[*k] = true;
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) throw InputError("prices", "missing price for \"" + inst.object(k) + "\"");
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mua
