#include "propsum/stdio_process.h"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "propsum/errors.h"

namespace propsum {

LineProcess::LineProcess(std::string command) : command_(std::move(command)) { start(); }

LineProcess::~LineProcess() { stop(); }

void LineProcess::start() {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw BackendFailure(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BackendFailure(std::string("pipe: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) throw BackendFailure(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  // A dead child must surface as an error, not SIGPIPE.
  ::signal(SIGPIPE, SIG_IGN);
}

void LineProcess::stop() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string LineProcess::exchange(const std::string& line) {
  if (to_child_ < 0) throw BackendFailure("generator process '" + command_ + "' is not running");
  std::string payload = line + "\n";
  std::size_t sent = 0;
  while (sent < payload.size()) {
    ssize_t n = ::write(to_child_, payload.data() + sent, payload.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendFailure("write to '" + command_ + "' failed: " + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  while (true) {
    std::size_t nl = pending_.find('\n');
    if (nl != std::string::npos) {
      std::string out = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      if (!out.empty() && out.back() == '\r') out.pop_back();
      return out;
    }
    char buffer[4096];
    ssize_t n = ::read(from_child_, buffer, sizeof(buffer));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendFailure("read from '" + command_ + "' failed: " + std::strerror(errno));
    }
    if (n == 0) throw BackendFailure("generator process '" + command_ + "' closed its output");
    pending_.append(buffer, static_cast<std::size_t>(n));
  }
}

}  // namespace propsum
