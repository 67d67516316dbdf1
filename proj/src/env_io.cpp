#include "rwre/env_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rwre/errors.hpp"
#include "rwre/json_out.hpp"

namespace rwre {

namespace {

using nlohmann::json;

const json& support_of(const json& root, const char* law) {
  if (!root.contains(law) || !root[law].is_object()) throw ConfigError(std::string("missing object \"") + law + "\"");
  const json& law_obj = root[law];
  if (!law_obj.contains("support") || !law_obj["support"].is_array())
    throw ConfigError(std::string("missing array \"") + law + ".support\"");
  return law_obj["support"];
}

const json& pair_at(const json& support, std::size_t i, const char* law) {
  const json& p = support[i];
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
    throw ConfigError(std::string(law) + ".support[" + std::to_string(i) + "] must be a [number, number] pair");
  return p;
}

}  // namespace

EnvironmentSpec parse_environment(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("environment JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("environment JSON must be an object");

  EnvironmentSpec spec;
  const json& offspring = support_of(root, "offspring");
  for (std::size_t i = 0; i < offspring.size(); ++i) {
    const json& p = pair_at(offspring, i, "offspring");
    if (!p[0].is_number_integer()) throw ConfigError("offspring counts must be integers");
    spec.offspring.support.emplace_back(p[0].get<int>(), p[1].get<double>());
  }
  const json& weights = support_of(root, "weights");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const json& p = pair_at(weights, i, "weights");
    spec.weights.support.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return spec;
}

EnvironmentSpec load_environment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open environment file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_environment(buf.str());
}

std::string environment_to_json(const EnvironmentSpec& spec) {
  std::string off = "[";
  for (std::size_t i = 0; i < spec.offspring.support.size(); ++i) {
    if (i) off += ',';
    off += "[" + std::to_string(spec.offspring.support[i].first) + "," +
           format_real(spec.offspring.support[i].second) + "]";
  }
  off += "]";
  std::string w = "[";
  for (std::size_t i = 0; i < spec.weights.support.size(); ++i) {
    if (i) w += ',';
    w += "[" + format_real(spec.weights.support[i].first) + "," + format_real(spec.weights.support[i].second) + "]";
  }
  w += "]";
  return JsonObject()
      .raw("offspring", JsonObject().raw("support", off).str())
      .raw("weights", JsonObject().raw("support", w).str())
      .str();
}

}  // namespace rwre
