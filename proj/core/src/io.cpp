#include "dmatch/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dmatch/error.hpp"

namespace dmatch {

using nlohmann::json;

namespace {

json parse_with_position(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kParseError, "JSON syntax error at line " + std::to_string(line) +
                                            ", column " + std::to_string(col) + ": " + e.what());
  }
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::kParseError, "invalid file: " + what);
}

std::vector<double> number_array(const json& j, const char* key) {
  if (!j.is_array()) schema_error(std::string("\"") + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) schema_error(std::string("\"") + key + "\" must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string type_id(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  schema_error("type ids must be strings or integers");
}

TypeIndex index_of(const Instance& inst, const std::string& id) {
  const auto& ids = inst.type_ids();
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) schema_error("unknown type id \"" + id + "\"");
  return static_cast<TypeIndex>(it - ids.begin());
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance parse_instance_json(const std::string& text) {
  const json doc = parse_with_position(text);
  if (!doc.is_object()) schema_error("instance must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "types" && key != "lambda" && key != "mu" && key != "r") {
      schema_error("unexpected key \"" + key + "\"");
    }
  }
  for (const char* key : {"lambda", "mu", "r"}) {
    if (!doc.contains(key)) schema_error(std::string("missing key \"") + key + "\"");
  }
  RawInstance raw;
  if (doc.contains("types")) {
    if (!doc["types"].is_array()) schema_error("\"types\" must be an array");
    for (const auto& t : doc["types"]) raw.type_ids.push_back(type_id(t));
  }
  raw.lambda = number_array(doc["lambda"], "lambda");
  raw.mu = number_array(doc["mu"], "mu");
  if (!doc["r"].is_array()) schema_error("\"r\" must be an array of rows");
  for (const auto& row : doc["r"]) raw.r.push_back(number_array(row, "r"));
  return validate(raw);
}

Instance load_instance(const std::string& path) { return parse_instance_json(read_file(path)); }

std::string instance_to_json(const Instance& instance) {
  json doc;
  doc["types"] = instance.type_ids();
  doc["lambda"] = instance.lambda();
  doc["mu"] = instance.mu();
  doc["r"] = instance.r().rows();
  return doc.dump(2);
}

GreedyPolicy parse_policy_json(const std::string& text, const Instance& instance) {
  const json doc = parse_with_position(text);
  if (!doc.is_object() || !doc.contains("preferences") || !doc["preferences"].is_object()) {
    schema_error("policy must be {\"preferences\": {...}}");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "preferences") schema_error("unexpected key \"" + key + "\"");
  }
  std::vector<std::vector<TypeIndex>> prefs(instance.num_types());
  for (const auto& [key, list] : doc["preferences"].items()) {
    const TypeIndex j = index_of(instance, key);
    if (!list.is_array()) schema_error("preference lists must be arrays");
    for (const auto& v : list) prefs[j].push_back(index_of(instance, type_id(v)));
  }
  return GreedyPolicy(std::move(prefs));
}

GreedyPolicy load_policy(const std::string& path, const Instance& instance) {
  return parse_policy_json(read_file(path), instance);
}

std::string policy_to_json(const GreedyPolicy& policy, const Instance& instance) {
  json prefs = json::object();
  for (TypeIndex j = 0; j < policy.num_types(); ++j) {
    json list = json::array();
    for (TypeIndex i : policy.preferences(j)) list.push_back(instance.type_ids()[i]);
    prefs[instance.type_ids()[j]] = list;
  }
  return json{{"preferences", prefs}}.dump(2);
}

}  // namespace dmatch
