#pragma once

#include <initializer_list>
#include <string>

#include "json.hpp"
#include "slb/alphabet.hpp"
#include "slb/distortion.hpp"

// Declarative problem descriptions for the command-line front end.  Parsing
// is strict: unknown keys, missing keys and type mismatches all raise
// ConfigError with the offending location in the message.

namespace slb {

// Reads and parses a JSON file; file and syntax problems become ConfigError.
nlohmann::json load_config_file(const std::string& path);

// Demands an object whose keys are exactly required plus a subset of
// optional.  `where` names the object in error messages.
void check_keys(const nlohmann::json& obj,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional,
                const std::string& where);

// Typed accessors with location-carrying errors.
double get_double(const nlohmann::json& obj, const char* key,
                  const std::string& where);
std::int64_t get_int(const nlohmann::json& obj, const char* key,
                     const std::string& where);
bool get_bool(const nlohmann::json& obj, const char* key,
              const std::string& where, bool fallback);
std::string get_string(const nlohmann::json& obj, const char* key,
                       const std::string& where);
std::vector<double> get_double_array(const nlohmann::json& node,
                                     const std::string& where);

// {"kind": "binary"}
// {"kind": "discrete", "symbols": [...], "modular": bool?}
// {"kind": "interval", "lower": a, "upper": b, "nodes": n, "rule": r?}
Alphabet parse_alphabet(const nlohmann::json& j);

// {"kind": "square" | "abs" | "hamming" | "neg-correlation"}
// {"kind": "well", "radius": r}
// {"kind": "table", "values": [...]}
// {"kind": "table2", "values": [[...], ...]}
WindowFunction parse_window_function(const nlohmann::json& j);

// {"functions": [window...], "levels": [...]}
DistortionSpec parse_distortion(const nlohmann::json& j);

// Reads the source entropy rate from `obj`: either "h_rate_bits" directly or
// a "source" object ({"kind":"gaussian","variance":v} | {"kind":"uniform",
// "width":w} | {"kind":"bernoulli","p":p}).  Exactly one must be present.
double parse_entropy_rate(const nlohmann::json& obj, const std::string& where);

}  // namespace slb
