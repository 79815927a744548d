#ifndef SLOWFAST_CLI_HPP
#define SLOWFAST_CLI_HPP

#include <string>
#include <vector>

namespace slowfast {

/// Runs one CLI invocation; `args` excludes the program name. Returns the
/// process exit code: 0 success, 2 validation/usage error, 3 numerical
/// failure. Artifacts are written under the --out directory.
int dispatch(std::vector<std::string> args);

} // namespace slowfast

#endif
