#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace mtclt::cli {

using json = nlohmann::json;

// Invalid configuration: exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool dump_samples = false;
  std::string out;  // empty means stdout; CSV side files need a path
};

struct CommandResult {
  json report;
  int exit_code = 0;
  std::string csv;       // optional CSV payload written next to the JSON report
  std::string csv_name;  // suffix for the CSV file
};

CommandResult cmd_variance_predict(const json& config, const RunOptions& opt);
CommandResult cmd_cumulant(const json& config, const RunOptions& opt);
CommandResult cmd_mc(const json& config, const RunOptions& opt);
CommandResult cmd_gff_check(const json& config, const RunOptions& opt);
CommandResult cmd_oracle(const json& config, const RunOptions& opt);
CommandResult cmd_ensemble_info(const json& config, const RunOptions& opt);

// JSON text with every floating value printed to 17 significant digits.
std::string dump_json(const json& j, int indent = 2);

// Minimal JSON-schema check (type, properties, required, additionalProperties, items, enum,
// const, minimum). Returns an empty string when valid, otherwise the first violation.
std::string validate_schema(const json& instance, const json& schema, const std::string& path = "$");

// Published schemas, keyed by command: "<command>.config" or "<command>.report".
const json& schema_for(const std::string& key);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtclt::cli
