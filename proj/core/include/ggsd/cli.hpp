#pragma once

#include <iosfwd>

namespace ggsd {

/// Entry point of the `ggsd` command. Returns the process exit status.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ggsd
