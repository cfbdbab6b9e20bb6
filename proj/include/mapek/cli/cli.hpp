#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mapek::cli {

enum ExitCode : int { ok = 0, diagnostics = 1, usage = 2, runtime_failure = 3 };

/// Runs one `mapek` invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mapek::cli
