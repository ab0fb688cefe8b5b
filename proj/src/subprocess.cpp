#include "teql/subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "teql/util.hpp"

extern char** environ;

namespace teql {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

Subprocess::Subprocess(const std::string& command, LineHandler on_line, EofHandler on_eof)
    : on_line_(std::move(on_line)), on_eof_(std::move(on_eof)) {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw TransportError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw TransportError(std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
  const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw TransportError("cannot start '" + command + "': " + std::strerror(rc));
  }
  stdin_fd_ = in_pipe[1];
  stdout_fd_ = out_pipe[0];
  reader_ = std::thread([this] { read_loop(); });
}

Subprocess::~Subprocess() {
  close_stdin();
  // Give a well-behaved child a moment to exit on EOF before killing it.
  for (int i = 0; i < 50 && !reaped_; ++i) {
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      reaped_ = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  kill();
  if (reader_.joinable()) reader_.join();
  close_fd(stdout_fd_);
}

bool Subprocess::write_line(std::string_view line) {
  std::lock_guard lock(write_mu_);
  if (stdin_fd_ < 0) return false;
  std::string buf(line);
  buf.push_back('\n');
  std::size_t off = 0;
  while (off < buf.size()) {
    const ssize_t n = ::write(stdin_fd_, buf.data() + off, buf.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      close_fd(stdin_fd_);
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

void Subprocess::close_stdin() {
  std::lock_guard lock(write_mu_);
  close_fd(stdin_fd_);
}

bool Subprocess::wait_output(std::chrono::milliseconds timeout) {
  std::unique_lock lock(state_mu_);
  return eof_cv_.wait_for(lock, timeout, [this] { return eof_; });
}

void Subprocess::kill() {
  if (!reaped_ && pid_ > 0) {
    ::kill(pid_, SIGKILL);
    reap();
  }
}

void Subprocess::reap() {
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  reaped_ = true;
}

void Subprocess::read_loop() {
  std::string pending;
  char buf[8192];
  for (;;) {
    const ssize_t n = ::read(stdout_fd_, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    pending.append(buf, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t nl; (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string line = pending.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (on_line_) on_line_(std::move(line));
    }
    pending.erase(0, start);
  }
  if (!pending.empty() && on_line_) on_line_(std::move(pending));
  if (on_eof_) on_eof_();
  {
    std::lock_guard lock(state_mu_);
    eof_ = true;
  }
  eof_cv_.notify_all();
}

}  // namespace teql
