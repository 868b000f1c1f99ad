#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mua/instance.hpp"

namespace mua {

using Json = nlohmann::ordered_json;

// Parses and validates an instance document:
//   {"agents": ["a", ...],
//    "objects": [{"id": "alpha", "capacity": 4}, ...],
//    "acceptable": {"a": ["alpha", "beta"], ...}}
// An agent's entry may alternatively be a 0/1 row in object order.
// Throws InputError naming the offending location.
Instance load_instance(std::string_view text);
Instance instance_from_json(const Json& doc);
Json instance_to_json(const Instance& inst);
std::string serialize_instance(const Instance& inst);

Rational rational_from_json(const Json& value, const std::string& where);

// {"a": "9/4", ...}
Json profile_to_json(const Instance& inst, const UtilityProfile& u);
// {"a": {"alpha": "1/4", ...}, ...}; zero cells omitted.
Json ram_to_json(const Instance& inst, const AssignmentMatrix& z);
AssignmentMatrix ram_from_json(const Instance& inst, const Json& doc);
// {"alpha": "4/13", ...}
Json prices_to_json(const Instance& inst, const std::vector<Rational>& prices);
std::vector<Rational> prices_from_json(const Instance& inst, const Json& doc);

std::string read_file(const std::string& path);

}  // namespace mua
