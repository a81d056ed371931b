#ifndef SMART_SUBPROCESS_HPP
#define SMART_SUBPROCESS_HPP

#include <string>
#include <vector>

namespace smart {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string out;
  std::string err;
  std::string spawn_error;
};

// Runs argv[0] with the given arguments, captures stdout/stderr, and kills
// the process group once the wall-clock timeout elapses.
ProcessResult run_process(const std::vector<std::string>& argv, int timeout_ms,
                          const std::string& workdir = {});

}  // namespace smart

#endif
