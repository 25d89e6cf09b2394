#pragma once

#include <iosfwd>

namespace hgarden::cli {

// Runs the tool with argv; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hgarden::cli
