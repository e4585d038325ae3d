#include "booom/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <limits>

#include "booom/errors.hpp"
#include "booom/matrix_io.hpp"

extern char** environ;

namespace booom {

namespace {

using Clock = std::chrono::steady_clock;

// Writing into a pipe whose reader died must surface as EPIPE, not kill the
// whole process.
std::once_flag sigpipe_once;
void ignore_sigpipe() {
  std::call_once(sigpipe_once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* Worker slot: one child process and its two pipes                        */
/* ---------------------------------------------------------------------- */

struct ExternalObjective::Slot {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;         // bytes read but not yet consumed
  int consecutive_failures = 0;

  ~Slot() { shutdown(); }

  // Launch the child with stdin/stdout attached to fresh pipes. Throws
  // std::runtime_error with a diagnostic when the spawn fails.
  void spawn(const ExternalObjectiveSpec& spec) {
    shutdown();
    buffer.clear();

    int in_pipe[2];   // parent writes -> child stdin
    int out_pipe[2];  // child stdout -> parent reads
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
      throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
    }
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
      const int saved = errno;
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      throw std::runtime_error(std::string("pipe: ") + std::strerror(saved));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    std::vector<char*> argv;
    argv.reserve(spec.command.size() + 1);
    for (const std::string& word : spec.command) {
      argv.push_back(const_cast<char*>(word.c_str()));
    }
    argv.push_back(nullptr);

    pid_t child = -1;
    const int rc =
        ::posix_spawnp(&child, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      throw std::runtime_error("cannot spawn '" + spec.command.front() +
                               "': " + std::strerror(rc));
    }
    pid = child;
    to_child = in_pipe[1];
    from_child = out_pipe[0];
  }

  // Close the pipes and make sure the child is gone.
  void shutdown() {
    close_fd(to_child);
    close_fd(from_child);
    if (pid > 0) {
      ::kill(pid, SIGKILL);
      int status = 0;
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      pid = -1;
    }
  }

  // Reap a child that already exited on its own.
  void reap() {
    close_fd(to_child);
    close_fd(from_child);
    if (pid > 0) {
      int status = 0;
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      pid = -1;
    }
  }

  bool write_all(const std::string& data) {
    size_t done = 0;
    while (done < data.size()) {
      const ssize_t n = ::write(to_child, data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      done += static_cast<size_t>(n);
    }
    return true;
  }

  enum class ReadStatus { line, eof, timeout };

  // Pull bytes until one full line is buffered or the deadline passes.
  ReadStatus read_line(Clock::time_point deadline, std::string& line) {
    while (true) {
      const auto newline = buffer.find('\n');
      if (newline != std::string::npos) {
        line = buffer.substr(0, newline);
        buffer.erase(0, newline + 1);
        return ReadStatus::line;
      }
      const auto remaining = deadline - Clock::now();
      if (remaining <= Clock::duration::zero()) return ReadStatus::timeout;
      const int remaining_ms = static_cast<int>(std::min<long long>(
          std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count() + 1,
          60 * 60 * 1000));
      struct pollfd pfd;
      pfd.fd = from_child;
      pfd.events = POLLIN;
      const int ready = ::poll(&pfd, 1, remaining_ms);
      if (ready < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::eof;
      }
      if (ready == 0) return ReadStatus::timeout;
      char chunk[512];
      const ssize_t n = ::read(from_child, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::eof;
      }
      if (n == 0) return ReadStatus::eof;
      buffer.append(chunk, static_cast<size_t>(n));
    }
  }
};

/* ---------------------------------------------------------------------- */
/* Spec validation                                                         */
/* ---------------------------------------------------------------------- */

void ExternalObjectiveSpec::validate() const {
  if (command.empty()) throw ConfigError("external objective: empty command");
  if (protocol != "line-text") {
    throw ConfigError("external objective: unsupported protocol '" + protocol +
                      "' (only line-text)");
  }
  if (!(timeout_seconds > 0.0)) {
    throw ConfigError("external objective: timeout must be positive");
  }
  if (max_restarts < 0) {
    throw ConfigError("external objective: max_restarts must be >= 0");
  }
}

/* ---------------------------------------------------------------------- */
/* Objective implementation                                                */
/* ---------------------------------------------------------------------- */

ExternalObjective::ExternalObjective(ExternalObjectiveSpec spec, int p, int d, int workers)
    : spec_(std::move(spec)), p_(p), d_(d) {
  spec_.validate();
  if (p_ < 1 || d_ < 1 || d_ > p_) {
    throw std::invalid_argument("external objective: dimensions must satisfy 1 <= d <= p");
  }
  if (workers < 1) {
    throw std::invalid_argument("external objective: workers must be >= 1");
  }
  ignore_sigpipe();
  for (int w = 0; w < workers; ++w) {
    auto slot = std::make_unique<Slot>();
    try {
      slot->spawn(spec_);
    } catch (const std::runtime_error& e) {
      throw ConfigError(std::string("external objective: ") + e.what());
    }
    idle_.push_back(std::move(slot));
  }
}

ExternalObjective::~ExternalObjective() = default;

std::string ExternalObjective::name() const { return "external"; }
int ExternalObjective::rows() const { return p_; }
int ExternalObjective::cols() const { return d_; }

std::vector<std::string> ExternalObjective::incidents() const {
  std::lock_guard<std::mutex> lock(pool_mutex_);
  return incidents_;
}

std::unique_ptr<ExternalObjective::Slot> ExternalObjective::checkout() const {
  std::unique_lock<std::mutex> lock(pool_mutex_);
  pool_cv_.wait(lock, [&] { return !idle_.empty(); });
  std::unique_ptr<Slot> slot = std::move(idle_.back());
  idle_.pop_back();
  return slot;
}

void ExternalObjective::restore(std::unique_ptr<Slot> slot) const {
  {
    std::lock_guard<std::mutex> lock(pool_mutex_);
    idle_.push_back(std::move(slot));
  }
  pool_cv_.notify_one();
}

void ExternalObjective::record(const std::string& incident) const {
  std::lock_guard<std::mutex> lock(pool_mutex_);
  incidents_.push_back(incident);
}

double ExternalObjective::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  std::unique_ptr<Slot> slot = checkout();
  double value = std::numeric_limits<double>::quiet_NaN();
  try {
    // Replace the child after a crash, timeout, or garbled reply; give up
    // once a slot fails more than max_restarts times in a row.
    const auto fail_and_restart = [&](const std::string& what) {
      slot->shutdown();
      slot->consecutive_failures += 1;
      record("external objective: " + what + " (failure " +
             std::to_string(slot->consecutive_failures) + ", restart budget " +
             std::to_string(spec_.max_restarts) + ")");
      if (slot->consecutive_failures > spec_.max_restarts) {
        throw NumericalError("external objective: " + what + " and the restart budget (" +
                             std::to_string(spec_.max_restarts) + ") is exhausted");
      }
      try {
        slot->spawn(spec_);
      } catch (const std::runtime_error& e) {
        // Leave the slot dead; the next evaluation retries and the failure
        // counter keeps growing toward the budget.
        record(std::string("external objective: respawn failed: ") + e.what());
      }
    };

    if (slot->pid < 0) {
      fail_and_restart("child not running");
      restore(std::move(slot));
      return value;
    }

    const std::string request = matrix_to_text(q.matrix()) + "\n";
    if (!slot->write_all(request)) {
      slot->reap();
      fail_and_restart("child closed its input (crash while writing request)");
      restore(std::move(slot));
      return value;
    }

    const auto deadline =
        Clock::now() + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(spec_.timeout_seconds));
    std::string line;
    const Slot::ReadStatus status = slot->read_line(deadline, line);
    if (status == Slot::ReadStatus::eof) {
      slot->reap();
      fail_and_restart("child exited before replying");
      restore(std::move(slot));
      return value;
    }
    if (status == Slot::ReadStatus::timeout) {
      fail_and_restart("reply timed out after " + format_double(spec_.timeout_seconds) +
                       " s");
      restore(std::move(slot));
      return value;
    }

    const std::string token = trim(line);
    errno = 0;
    char* end = nullptr;
    const double parsed = token.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : std::strtod(token.c_str(), &end);
    const bool well_formed = !token.empty() && end == token.c_str() + token.size();
    if (!well_formed || !slot->buffer.empty()) {
      fail_and_restart("malformed reply '" + trim(line) + "'");
    } else if (!std::isfinite(parsed)) {
      // A well-formed non-finite reply is the child's way of failing one
      // candidate; the stream is still in sync, so keep the child alive.
      slot->consecutive_failures = 0;
      record("external objective: non-finite reply '" + token + "' treated as a failed candidate");
    } else {
      slot->consecutive_failures = 0;
      value = parsed;
    }
  } catch (...) {
    restore(std::move(slot));
    throw;
  }
  restore(std::move(slot));
  return value;
}

}  // namespace booom
