#ifndef PROPSUM_STDIO_PROCESS_H_
#define PROPSUM_STDIO_PROCESS_H_

#include <sys/types.h>

#include <string>

namespace propsum {

// A child process (`/bin/sh -c command`) spoken to one line at a time over
// its stdin/stdout. Not thread-safe; callers serialize access.
class LineProcess {
 public:
  explicit LineProcess(std::string command);
  ~LineProcess();
  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  // Sends `line` plus '\n' and returns the next output line without its
  // terminator. Throws BackendFailure if the child has exited or closed
  // its output.
  std::string exchange(const std::string& line);

  const std::string& command() const { return command_; }

 private:
  void start();
  void stop();

  std::string command_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
};

}  // namespace propsum

#endif  // PROPSUM_STDIO_PROCESS_H_
