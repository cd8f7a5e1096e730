#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace shiftlab::cli {

using Json = nlohmann::ordered_json;

/// Bad flags, unknown config keys, wrong value types. Exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Real, Integer, Text, RealList };

struct ParamSpec {
  std::string name;  // JSON key; the flag is --name with '_' as '-'
  Kind kind;
  Json default_value;
  std::string help;
};

struct Outcome {
  Json result;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::string text;  // replaces the JSON on stdout when non-empty
};

struct Command {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
  std::function<Outcome(const Json& params)> run;
};

const std::vector<Command>& commands();

/// Defaults overlaid with `given`; unknown keys and mistyped values throw UsageError.
Json resolve_params(const Command& cmd, const Json& given);

/// Converts the text of a flag into a JSON value of the declared kind.
Json parse_flag(const ParamSpec& spec, const std::string& text);

}  // namespace shiftlab::cli
