// Job runner behind the command-line tool: JSON-described jobs resolved
// against per-subcommand defaults, executed into JSON reports plus optional
// CSV artifacts.  Keeping this in the library (the binary only does flag
// parsing) makes every report byte-testable without spawning processes.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "muntz/exponents.hpp"
#include "muntz/measure.hpp"

namespace muntz::report {

extern const char* kVersion;

// One unit of work. `inputs` is subcommand-specific; resolution fills in the
// defaults and rejects unknown keys, and the resolved form is echoed into
// the report so a run can be reproduced from its own output.
struct JobSpec {
  std::string subcommand;     // seq | poly | measure | embed | compop
  nlohmann::json inputs = nlohmann::json::object();
  std::string out;            // report file path; empty = caller's choice
  nlohmann::json tolerances = nlohmann::json::object();  // {"quad_tol": x}
};

// Strict parse of the JSON form above (unknown top-level keys rejected;
// inputs are validated later, during resolution).
JobSpec parse_job(const nlohmann::json& j);

struct RunOptions {
  bool with_timestamp = true;
  bool strict = false;  // verdicts present but all inconclusive -> exit 2
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 error, 2 inconclusive-only under strict
  nlohmann::json report;
  // (file name, contents) pairs for --emit-plot-data CSV series; the caller
  // decides the directory and does the writing
  std::vector<std::pair<std::string, std::string>> artifacts;
};

RunResult run(const JobSpec& job, const RunOptions& opt = {});

struct BundleResult {
  int exit_code = 0;  // max of the per-job codes
  nlohmann::json index;
};

// Runs every entry of `jobs` (a JSON array of JobSpec objects), writing one
// report file per job plus index.json into out_dir.  Malformed entries are
// recorded as failed in the index without stopping the rest.  `parallel`
// caps the worker count; jobs carrying a tolerances block force sequential
// execution because the quadrature override is process-wide.
BundleResult run_bundle(const nlohmann::json& jobs, const std::string& out_dir,
                        const RunOptions& opt = {}, int parallel = 1);

// "geom:2,12" -> geometric; "list:1,2,4" or a bare comma list -> from_values
exponents::ExponentSequence parse_seq_spec(const std::string& spec);

// {"lebesgue":true} | {"density":expr[,"atoms":[[x,w]..]]} | {"atoms":[..]}
// | {"pullback":expr}, each optionally with {"scale":factor}
measure::Measure measure_from_json(const nlohmann::json& j);

}  // namespace muntz::report
