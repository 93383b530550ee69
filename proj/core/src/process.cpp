#include "clipforge/process.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace clipforge {

std::vector<std::string> tokenize_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::vector<std::string> substitute_placeholders(
    const std::vector<std::string>& tokens, const std::map<std::string, std::string>& values) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    std::string t = token;
    size_t pos = 0;
    while ((pos = t.find('{', pos)) != std::string::npos) {
      const size_t end = t.find('}', pos);
      if (end == std::string::npos) break;
      const std::string name = t.substr(pos + 1, end - pos - 1);
      const auto it = values.find(name);
      if (it == values.end())
        throw ProcessError("command template: no value for placeholder {" + name + "}");
      t = t.substr(0, pos) + it->second + t.substr(end + 1);
      pos += it->second.size();
    }
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

ProcessResult run_process(const std::vector<std::string>& argv) {
  if (argv.empty()) throw ProcessError("run_process: empty argv");

  const auto stderr_path = make_scratch_dir("stderr") / "err.txt";

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw ProcessError("run_process: fork failed");
  if (pid == 0) {
    const int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDOUT_FILENO);
    const int errfd = ::open(stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (errfd >= 0) ::dup2(errfd, STDERR_FILENO);
    ::execvp(cargv[0], cargv.data());
    // exec failed; 127 mirrors the shell convention
    std::perror(argv[0].c_str());
    _exit(127);
  }

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw ProcessError("run_process: waitpid failed");
  }
  const auto end = std::chrono::steady_clock::now();

  ProcessResult res;
  res.wall_seconds = std::chrono::duration<double>(end - start).count();
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);

  std::ifstream err(stderr_path);
  if (err) {
    std::ostringstream tail;
    tail << err.rdbuf();
    std::string text = tail.str();
    if (text.size() > 4096) text = text.substr(text.size() - 4096);
    res.stderr_tail = std::move(text);
  }
  std::error_code ec;
  std::filesystem::remove_all(stderr_path.parent_path(), ec);
  return res;
}

std::filesystem::path scratch_root() {
  if (const char* env = std::getenv("CLIPFORGE_TMPDIR"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::temp_directory_path();
}

std::filesystem::path make_scratch_dir(const std::string& prefix) {
  static std::atomic<uint64_t> counter{0};
  const auto root = scratch_root();
  std::filesystem::create_directories(root);
  const uint64_t id = counter.fetch_add(1);
  auto dir = root / ("clipforge-" + prefix + "-" + std::to_string(::getpid()) + "-" +
                     std::to_string(id));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace clipforge
