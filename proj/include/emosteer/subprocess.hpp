#pragma once

#include <string>
#include <vector>

namespace emosteer {

/// A child process spoken to over stdin/stdout, one line at a time.
/// POSIX-only (fork/exec). The child is terminated on destruction.
class LineProtocolProcess {
public:
    explicit LineProtocolProcess(const std::vector<std::string>& argv);
    ~LineProtocolProcess();

    LineProtocolProcess(const LineProtocolProcess&) = delete;
    LineProtocolProcess& operator=(const LineProtocolProcess&) = delete;

    /// Writes `line` (newline appended) and reads one reply line.
    /// Throws BackendError if the child is gone or the pipe breaks.
    std::string exchange(const std::string& line);

private:
    void close_pipes();

    int pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    std::string buffer_;
};

} // namespace emosteer
