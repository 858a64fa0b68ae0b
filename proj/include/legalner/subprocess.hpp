#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace legalner {

/// Child process with line-oriented pipes on stdin and stdout. Stderr is
/// inherited. The child is killed and reaped on destruction.
class LineProcess {
 public:
  explicit LineProcess(const std::vector<std::string>& argv);
  ~LineProcess();
  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  /// Throws AdapterError when the child has exited or the pipe is closed.
  void write_line(const std::string& line);
  /// Throws AdapterError on EOF or timeout.
  std::string read_line(std::chrono::milliseconds timeout);

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace legalner
