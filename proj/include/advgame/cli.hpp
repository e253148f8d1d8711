#pragma once

#include <string>
#include <vector>

namespace advgame {

/// Exit codes: 0 success, 1 failed run or failed verification, 2 bad usage or unreadable input.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args exclude the program name

}  // namespace advgame
