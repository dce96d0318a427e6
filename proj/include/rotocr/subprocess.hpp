#pragma once

#include <string>
#include <sys/types.h>

namespace rotocr {

/// Child process started via /bin/sh -c with piped stdin/stdout; stderr is
/// inherited. Line-oriented I/O only.
class ChildProcess {
public:
    explicit ChildProcess(const std::string& command);
    ~ChildProcess();

    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    /// Appends '\n'. Throws Error(Backend) if the child has gone away.
    void write_line(const std::string& line);

    /// Blocks up to `timeout_seconds` for a full line (without '\n').
    /// Throws Error(Backend) on timeout, EOF or child exit.
    std::string read_line(double timeout_seconds);

    bool running();
    pid_t pid() const noexcept { return pid_; }

private:
    std::string exit_description();

    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool reaped_ = false;
    int status_ = 0;
};

}  // namespace rotocr
