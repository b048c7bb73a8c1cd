#pragma once

#include <iosfwd>

namespace ssinit::cli {

/// Entry point of the ssinit tool; returns the process exit code.
int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ssinit::cli
