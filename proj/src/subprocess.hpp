#pragma once

#include <string>
#include <vector>

namespace jitdp::detail {

struct ProcessResult {
    int exit_code = -1; // negative: terminated by signal -exit_code
    std::string out;
    std::string err;
};

// Runs argv[0] with execvp, capturing stdout and stderr. stdin reads from
// /dev/null. Throws std::runtime_error when the process cannot be spawned.
ProcessResult run_process(const std::vector<std::string>& argv);

} // namespace jitdp::detail
