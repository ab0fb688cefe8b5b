#pragma once

#include <sys/types.h>

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

namespace teql {

/// A `/bin/sh -c` child with line-oriented stdout. Lines are delivered on a
/// reader thread; `on_eof` fires once when stdout closes. The child's stderr
/// is inherited.
class Subprocess {
 public:
  using LineHandler = std::function<void(std::string line)>;
  using EofHandler = std::function<void()>;

  Subprocess(const std::string& command, LineHandler on_line, EofHandler on_eof = {});
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  /// Writes `line` plus a newline. Returns false once the pipe is broken.
  bool write_line(std::string_view line);
  void close_stdin();
  /// Blocks until stdout reaches EOF or `timeout` expires. Returns true on EOF.
  bool wait_output(std::chrono::milliseconds timeout);
  void kill();

  pid_t pid() const { return pid_; }

 private:
  void read_loop();
  void reap();

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::mutex write_mu_;
  std::mutex state_mu_;
  std::condition_variable eof_cv_;
  bool eof_ = false;
  bool reaped_ = false;
  LineHandler on_line_;
  EofHandler on_eof_;
  std::thread reader_;
};

}  // namespace teql
