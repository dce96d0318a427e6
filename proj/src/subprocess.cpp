#include "rotocr/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "rotocr/error.hpp"

extern char** environ;

namespace rotocr {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::Backend, what); }

std::string errno_text() { return std::strerror(errno); }

}  // namespace

ChildProcess::ChildProcess(const std::string& command) {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) fail("pipe: " + errno_text());
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        fail("pipe: " + errno_text());
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (rc != 0) {
        close(in_pipe[1]);
        close(out_pipe[0]);
        fail("cannot start backend '" + command + "': " + std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

ChildProcess::~ChildProcess() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (reaped_ || pid_ <= 0) return;
    // EOF on stdin asks the child to finish; give it a moment, then kill.
    for (int i = 0; i < 50; ++i) {
        if (waitpid(pid_, &status_, WNOHANG) == pid_) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status_, 0);
}

bool ChildProcess::running() {
    if (reaped_) return false;
    if (waitpid(pid_, &status_, WNOHANG) == pid_) {
        reaped_ = true;
        return false;
    }
    return true;
}

std::string ChildProcess::exit_description() {
    if (!reaped_) {
        // The child closed stdout; wait briefly for its exit status.
        for (int i = 0; i < 100 && running(); ++i) {
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    }
    if (!reaped_) return "backend closed its output";
    if (WIFEXITED(status_)) return "backend exited with status " + std::to_string(WEXITSTATUS(status_));
    if (WIFSIGNALED(status_)) return "backend killed by signal " + std::to_string(WTERMSIG(status_));
    return "backend terminated";
}

void ChildProcess::write_line(const std::string& line) {
    const std::string data = line + "\n";
    // Keep a dead reader from raising SIGPIPE in this thread.
    sigset_t pipe_set;
    sigset_t old_set;
    sigemptyset(&pipe_set);
    sigaddset(&pipe_set, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);

    std::size_t done = 0;
    int write_errno = 0;
    while (done < data.size()) {
        const ssize_t n = write(to_child_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            write_errno = errno;
            break;
        }
        done += static_cast<std::size_t>(n);
    }
    if (write_errno == EPIPE) {
        timespec zero{};
        sigtimedwait(&pipe_set, nullptr, &zero);
    }
    pthread_sigmask(SIG_SETMASK, &old_set, nullptr);

    if (write_errno == EPIPE) fail(exit_description());
    if (write_errno != 0) fail(std::string("write to backend failed: ") + std::strerror(write_errno));
}

std::string ChildProcess::read_line(double timeout_seconds) {
    using clock = std::chrono::steady_clock;
    const auto deadline =
        clock::now() + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(timeout_seconds));
    for (;;) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
        if (remaining.count() <= 0) {
            fail("backend response timed out after " + std::to_string(timeout_seconds) + " s");
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1 << 30)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            fail("poll on backend failed: " + errno_text());
        }
        if (rc == 0) continue;
        char chunk[4096];
        const ssize_t n = read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("read from backend failed: " + errno_text());
        }
        if (n == 0) fail(exit_description());
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace rotocr
