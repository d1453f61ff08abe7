#pragma once

// Drives the built CLI binary (path injected by CMake as REALSEAL_CLI_PATH).

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace realseal::test_cli {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

inline CliResult run(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(REALSEAL_CLI_PATH) + " " + args +
                      (merge_stderr ? " 2>&1" : " 2>/dev/null");
    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    std::array<char, 4096> buffer;
    std::size_t n;
    while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.out.append(buffer.data(), n);
    }
    int status = pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

}  // namespace realseal::test_cli
