#include "slb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "slb/bounds.hpp"
#include "slb/errors.hpp"

namespace slb {

using nlohmann::json;

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path + "': " + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional,
                const std::string& where) {
  if (!obj.is_object())
    throw ConfigError("config: " + where + " must be an object");
  std::set<std::string> allowed;
  for (const char* k : required) allowed.insert(k);
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError("config: " + where + ": unknown key '" + item.key() +
                        "'");
  }
  for (const char* k : required) {
    if (!obj.contains(k))
      throw ConfigError("config: " + where + ": missing key '" + k + "'");
  }
}

double get_double(const json& obj, const char* key, const std::string& where) {
  const json& node = obj.at(key);
  if (!node.is_number())
    throw ConfigError("config: " + where + "." + key + " must be a number");
  return node.get<double>();
}

std::int64_t get_int(const json& obj, const char* key,
                     const std::string& where) {
  const json& node = obj.at(key);
  if (!node.is_number_integer())
    throw ConfigError("config: " + where + "." + key + " must be an integer");
  return node.get<std::int64_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& where,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj.at(key);
  if (!node.is_boolean())
    throw ConfigError("config: " + where + "." + key + " must be a boolean");
  return node.get<bool>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& where) {
  const json& node = obj.at(key);
  if (!node.is_string())
    throw ConfigError("config: " + where + "." + key + " must be a string");
  return node.get<std::string>();
}

std::vector<double> get_double_array(const json& node,
                                     const std::string& where) {
  if (!node.is_array() || node.empty())
    throw ConfigError("config: " + where + " must be a nonempty array");
  std::vector<double> out;
  out.reserve(node.size());
  for (const json& v : node) {
    if (!v.is_number())
      throw ConfigError("config: " + where + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Alphabet parse_alphabet(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("config: alphabet needs a 'kind'");
  const std::string kind = get_string(j, "kind", "alphabet");
  if (kind == "binary") {
    check_keys(j, {"kind"}, {}, "alphabet");
    return Alphabet::binary();
  }
  if (kind == "discrete") {
    check_keys(j, {"kind", "symbols"}, {"modular"}, "alphabet");
    auto symbols = get_double_array(j.at("symbols"), "alphabet.symbols");
    return Alphabet::discrete(std::move(symbols),
                              get_bool(j, "modular", "alphabet", false));
  }
  if (kind == "interval") {
    check_keys(j, {"kind", "lower", "upper", "nodes"}, {"rule"}, "alphabet");
    QuadratureRule rule = QuadratureRule::CompositeSimpson;
    if (j.contains("rule")) {
      const std::string name = get_string(j, "rule", "alphabet");
      if (name == "simpson")
        rule = QuadratureRule::CompositeSimpson;
      else if (name == "gauss-legendre")
        rule = QuadratureRule::GaussLegendre;
      else
        throw ConfigError("config: alphabet.rule must be 'simpson' or "
                          "'gauss-legendre'");
    }
    return Alphabet::continuous_interval(
        get_double(j, "lower", "alphabet"), get_double(j, "upper", "alphabet"),
        static_cast<int>(get_int(j, "nodes", "alphabet")), rule);
  }
  throw ConfigError("config: unknown alphabet kind '" + kind + "'");
}

WindowFunction parse_window_function(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("config: distortion function needs a 'kind'");
  const std::string kind = get_string(j, "kind", "function");
  if (kind == "square") {
    check_keys(j, {"kind"}, {}, "function");
    return square_distortion();
  }
  if (kind == "abs") {
    check_keys(j, {"kind"}, {}, "function");
    return abs_distortion();
  }
  if (kind == "hamming") {
    check_keys(j, {"kind"}, {}, "function");
    return hamming_distortion();
  }
  if (kind == "neg-correlation") {
    check_keys(j, {"kind"}, {}, "function");
    return neg_correlation();
  }
  if (kind == "well") {
    check_keys(j, {"kind", "radius"}, {}, "function");
    return make_iwf(get_double(j, "radius", "function"));
  }
  if (kind == "table") {
    check_keys(j, {"kind", "values"}, {}, "function");
    return table_distortion(get_double_array(j.at("values"),
                                             "function.values"));
  }
  if (kind == "table2") {
    check_keys(j, {"kind", "values"}, {}, "function");
    const json& rows = j.at("values");
    if (!rows.is_array() || rows.empty())
      throw ConfigError("config: function.values must be a nonempty array");
    std::vector<std::vector<double>> values;
    values.reserve(rows.size());
    for (const json& row : rows)
      values.push_back(get_double_array(row, "function.values row"));
    return table_distortion2(std::move(values));
  }
  throw ConfigError("config: unknown distortion kind '" + kind + "'");
}

DistortionSpec parse_distortion(const json& j) {
  check_keys(j, {"functions", "levels"}, {}, "distortion");
  const json& fns = j.at("functions");
  if (!fns.is_array() || fns.empty())
    throw ConfigError("config: distortion.functions must be a nonempty array");
  std::vector<WindowFunction> functions;
  functions.reserve(fns.size());
  for (const json& f : fns) functions.push_back(parse_window_function(f));
  auto levels = get_double_array(j.at("levels"), "distortion.levels");
  if (levels.size() != functions.size())
    throw ConfigError(
        "config: distortion.levels must match functions in length");
  return make_spec(std::move(functions), std::move(levels));
}

double parse_entropy_rate(const json& obj, const std::string& where) {
  const bool direct = obj.contains("h_rate_bits");
  const bool modeled = obj.contains("source");
  if (direct == modeled)
    throw ConfigError("config: " + where +
                      " needs exactly one of 'h_rate_bits' or 'source'");
  if (direct) return get_double(obj, "h_rate_bits", where);
  const json& src = obj.at("source");
  if (!src.is_object() || !src.contains("kind"))
    throw ConfigError("config: " + where + ".source needs a 'kind'");
  const std::string kind = get_string(src, "kind", where + ".source");
  if (kind == "gaussian") {
    check_keys(src, {"kind", "variance"}, {}, where + ".source");
    return gaussian_entropy_rate(get_double(src, "variance", where));
  }
  if (kind == "uniform") {
    check_keys(src, {"kind", "width"}, {}, where + ".source");
    return uniform_entropy_rate(get_double(src, "width", where));
  }
  if (kind == "bernoulli") {
    check_keys(src, {"kind", "p"}, {}, where + ".source");
    return bernoulli_entropy_rate(get_double(src, "p", where));
  }
  throw ConfigError("config: unknown source kind '" + kind + "'");
}

}  // namespace slb
