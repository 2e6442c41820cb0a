#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcp/pcpcheck.hpp"
#include "pcp/primitives.hpp"
#include "pcp/sketch.hpp"

namespace pcp {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAssertionFailed = 2;

nlohmann::json to_json(const SketchParams& params, SketchMethod method);
/// {theorem, holds, measured{}, thresholds{}, lambda_used?, p_used?}. Unbounded
/// thresholds serialize as null.
nlohmann::json to_json(const Certificate& cert);
nlohmann::json to_json(const PcpReport& report, bool include_probes = true);

/// "key,value" lines with dotted keys; arrays contribute their index as a key.
std::string flatten_csv(const nlohmann::json& j);

/// Entry point of the `pcp` tool: subcommands gen, sketch, certify, verify,
/// solve, bench and jl-moment. `args` excludes the program name. The PCP_SEED
/// environment variable replaces the default seed of 0 when --seed is absent.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcp
