#ifndef CLIPFORGE_PROCESS_HPP
#define CLIPFORGE_PROCESS_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace clipforge {

struct ProcessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProcessResult {
  int exit_code = -1;
  double wall_seconds = 0.0;
  std::string stderr_tail;  // last few KiB, attached to error reports
};

// Shell-free: the command line is whitespace-tokenized and exec'd directly.
std::vector<std::string> tokenize_command(const std::string& command);

// Replaces {NAME} placeholders in each token. Unknown placeholders throw;
// a token that becomes empty after substitution is dropped.
std::vector<std::string> substitute_placeholders(const std::vector<std::string>& tokens,
                                                 const std::map<std::string, std::string>& values);

// fork/exec + waitpid with stdout discarded and stderr captured.
ProcessResult run_process(const std::vector<std::string>& argv);

// CLIPFORGE_TMPDIR override, system temp otherwise.
std::filesystem::path scratch_root();

// Creates a unique subdirectory under scratch_root().
std::filesystem::path make_scratch_dir(const std::string& prefix);

}  // namespace clipforge

#endif  // CLIPFORGE_PROCESS_HPP
