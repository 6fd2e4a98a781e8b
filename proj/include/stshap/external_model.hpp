#pragma once

#include <sys/types.h>

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "stshap/value_function.hpp"

namespace stshap {

// Bridges to a model running in a child process.
//
// The command is started once through /bin/sh. Each batch is written to the
// child's stdin as CSV rows (one instance per line, 17 significant digits)
// followed by an empty line. The child must answer with exactly one decimal
// prediction per input row on stdout. Any other reply, or the child exiting,
// raises ModelError carrying the batch index. Batches are serialized: one
// in-flight batch per process.
class ExternalProcessModel final : public Model {
 public:
  ExternalProcessModel(std::string command, std::size_t feature_count,
                       Task task = Task::regression);
  ~ExternalProcessModel() override;

  ExternalProcessModel(const ExternalProcessModel&) = delete;
  ExternalProcessModel& operator=(const ExternalProcessModel&) = delete;

  std::size_t feature_count() const override { return feature_count_; }
  Task task() const override { return task_; }
  std::vector<double> predict(const RowMatrix& rows) const override;

  std::size_t batches_sent() const;

 private:
  bool read_line(std::string& line) const;
  std::string describe_exit() const;

  std::string command_;
  std::size_t feature_count_;
  Task task_;
  pid_t child_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::string pending_;
  mutable std::size_t batch_index_ = 0;
  mutable bool broken_ = false;
  mutable std::mutex mutex_;
};

}  // namespace stshap
