#pragma once

namespace rebel::cli {

// Full command-line front end. Returns the process exit code:
// 0 success, 2 usage or validation error, 3 no regeneration / no viable
// small set, 4 empty confidence region, 5 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace rebel::cli
