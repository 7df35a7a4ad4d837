#pragma once

#include <string>
#include <vector>

namespace crowdagg {

// Subcommands: fit, experiment, analyze, synth, validate. Exit codes: 0 ok,
// 1 usage error, 2 data error, 3 numerical failure. Errors go to stderr as
// one-line JSON.
int cli_dispatch(const std::vector<std::string>& args);
int cli_dispatch(int argc, const char* const* argv);

}  // namespace crowdagg
