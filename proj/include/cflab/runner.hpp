#ifndef CFLAB_RUNNER_HPP
#define CFLAB_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace cflab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Outcome of one run: the report (JSON form), optional text payload when the
// output format is csv/jsonl, and the CLI exit code.
struct RunOutcome {
  int exit_code = 0;
  nlohmann::ordered_json report;
  std::string text;          // csv or jsonl payload, empty for json format
  std::string format = "json";
  std::string out_path;      // empty = stdout
};

// Validate the config (strict schema: unknown fields rejected), dispatch to
// the module named by "command", and build the report. Throws InvalidInput
// for schema errors; gate refusals are folded into the outcome with exit
// code 2.
RunOutcome execute(const nlohmann::json& config, std::optional<std::uint64_t> seed_override,
                   std::optional<int> threads_override);

// Full CLI: --config run.json [--out report.json] [--seed N] [--threads T].
int run_main(int argc, char** argv);

}  // namespace cflab::cli

#endif
