#include "smart/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

namespace smart {

namespace {

using Clock = std::chrono::steady_clock;

void drain(int fd, std::string& sink) {
  char buf[4096];
  for (;;) {
    ssize_t n = read(fd, buf, sizeof buf);
    if (n > 0) {
      sink.append(buf, static_cast<size_t>(n));
    } else {
      break;  // EOF or EAGAIN
    }
  }
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, int timeout_ms,
                          const std::string& workdir) {
  ProcessResult result;
  if (argv.empty()) {
    result.spawn_failed = true;
    result.spawn_error = "empty argv";
    return result;
  }

  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    result.spawn_failed = true;
    result.spawn_error = std::strerror(errno);
    return result;
  }

  pid_t pid = fork();
  if (pid < 0) {
    result.spawn_failed = true;
    result.spawn_error = std::strerror(errno);
    return result;
  }

  if (pid == 0) {
    setpgid(0, 0);  // own process group so the parent can kill the whole tree
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    if (!workdir.empty() && chdir(workdir.c_str()) != 0) _exit(127);

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    // Only reached when exec fails.
    const char* msg = "exec failed\n";
    ssize_t ignored = write(STDERR_FILENO, msg, std::strlen(msg));
    (void)ignored;
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  bool out_open = true, err_open = true;

  while (out_open || err_open) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
    int rc = poll(fds, nfds, static_cast<int>(std::min<long long>(remaining, 100)));
    if (rc < 0 && errno != EINTR) break;
    for (nfds_t i = 0; i < nfds; ++i) {
      if (fds[i].revents & (POLLIN | POLLHUP)) {
        bool is_out = fds[i].fd == out_pipe[0];
        char buf[4096];
        ssize_t n;
        while ((n = read(fds[i].fd, buf, sizeof buf)) > 0) {
          (is_out ? result.out : result.err).append(buf, static_cast<size_t>(n));
        }
        if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
          (is_out ? out_open : err_open) = false;
        }
      }
    }
  }

  int status = 0;
  waitpid(pid, &status, 0);
  drain(out_pipe[0], result.out);
  drain(err_pipe[0], result.err);
  close(out_pipe[0]);
  close(err_pipe[0]);

  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = -WTERMSIG(status);
  }
  return result;
}

}  // namespace smart
