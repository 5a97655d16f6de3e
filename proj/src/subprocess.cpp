#include "emosteer/subprocess.hpp"

#include "emosteer/errors.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <cstring>

namespace emosteer {

LineProtocolProcess::LineProtocolProcess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw ConfigError("worker command must not be empty");

    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw BackendError("failed to create worker pipes");
    }

    const pid_t pid = fork();
    if (pid < 0) throw BackendError("failed to fork worker process");

    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);

        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }

    close(to_child[0]);
    close(from_child[1]);
    pid_ = pid;
    stdin_fd_ = to_child[1];
    stdout_fd_ = from_child[0];
}

LineProtocolProcess::~LineProtocolProcess() {
    close_pipes();
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == 0) {
            kill(pid_, SIGTERM);
            waitpid(pid_, &status, 0);
        }
    }
}

void LineProtocolProcess::close_pipes() {
    if (stdin_fd_ >= 0) {
        close(stdin_fd_);
        stdin_fd_ = -1;
    }
    if (stdout_fd_ >= 0) {
        close(stdout_fd_);
        stdout_fd_ = -1;
    }
}

std::string LineProtocolProcess::exchange(const std::string& line) {
    if (stdin_fd_ < 0 || stdout_fd_ < 0) throw BackendError("worker process is not running");

    std::string payload = line;
    payload.push_back('\n');
    std::size_t written = 0;
    while (written < payload.size()) {
        const ssize_t n = write(stdin_fd_, payload.data() + written, payload.size() - written);
        if (n <= 0) {
            close_pipes();
            throw BackendError("worker process closed its input");
        }
        written += static_cast<std::size_t>(n);
    }

    while (true) {
        if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
            std::string reply = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            if (!reply.empty() && reply.back() == '\r') reply.pop_back();
            return reply;
        }
        char chunk[4096];
        const ssize_t n = read(stdout_fd_, chunk, sizeof(chunk));
        if (n <= 0) {
            close_pipes();
            throw BackendError("worker process exited without replying");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

} // namespace emosteer
