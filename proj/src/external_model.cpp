#include "stshap/external_model.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <system_error>

#include "stshap/errors.hpp"

namespace stshap {

namespace {

bool write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, n);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

ExternalProcessModel::ExternalProcessModel(std::string command,
                                           std::size_t feature_count, Task task)
    : command_(std::move(command)), feature_count_(feature_count), task_(task) {
  check_feature_count(feature_count);
  // A child that dies mid-batch must surface as ModelError, not SIGPIPE.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw std::system_error(errno, std::generic_category(), "pipe");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw std::system_error(errno, std::generic_category(), "pipe");
  }
  child_ = ::fork();
  if (child_ < 0) {
    throw std::system_error(errno, std::generic_category(), "fork");
  }
  if (child_ == 0) {
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
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
}

ExternalProcessModel::~ExternalProcessModel() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (child_ > 0) {
    int status = 0;
    ::waitpid(child_, &status, 0);
  }
}

std::size_t ExternalProcessModel::batches_sent() const {
  std::lock_guard lock(mutex_);
  return batch_index_;
}

bool ExternalProcessModel::read_line(std::string& line) const {
  for (;;) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      line = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      return true;
    }
    char buf[65536];
    const ssize_t n = ::read(from_child_, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

std::string ExternalProcessModel::describe_exit() const {
  int status = 0;
  const pid_t done = ::waitpid(child_, &status, WNOHANG);
  if (done == child_) {
    if (WIFEXITED(status)) {
      return "model process exited with status " + std::to_string(WEXITSTATUS(status));
    }
    if (WIFSIGNALED(status)) {
      return "model process killed by signal " + std::to_string(WTERMSIG(status));
    }
  }
  return "model process closed its output";
}

std::vector<double> ExternalProcessModel::predict(const RowMatrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != feature_count_) {
    throw std::invalid_argument("external model: wrong feature count");
  }
  if (rows.rows() == 0) return {};
  std::lock_guard lock(mutex_);
  const std::size_t batch = batch_index_++;
  if (broken_) throw ModelError(batch, "model process is no longer usable");

  std::string request;
  request.reserve(rows.rows() * rows.cols() * 24);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (c > 0) request.push_back(',');
      append_number(request, rows(r, c));
    }
    request.push_back('\n');
  }
  request.push_back('\n');
  if (!write_all(to_child_, request)) {
    broken_ = true;
    // Give the child a moment to be reaped so the exit status is reported.
    ::usleep(20000);
    throw ModelError(batch, "cannot write request: " + describe_exit());
  }

  std::vector<double> out;
  out.reserve(rows.rows());
  std::string line;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    if (!read_line(line)) {
      broken_ = true;
      ::usleep(20000);
      throw ModelError(batch, "reply ended after " + std::to_string(r) + " of " +
                                  std::to_string(rows.rows()) + " predictions (" +
                                  describe_exit() + ")");
    }
    const std::string_view field = trim(line);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      broken_ = true;
      throw ModelError(batch, "malformed prediction on reply line " +
                                  std::to_string(r + 1) + ": \"" + line + "\"");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace stshap
