#include "subprocess.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace jitdp::detail {

namespace {

[[noreturn]] void throw_errno(const char* what) {
    throw std::runtime_error(std::string(what) + ": " + std::strerror(errno));
}

void set_cloexec(int fd) {
    int flags = fcntl(fd, F_GETFD);
    if (flags >= 0) fcntl(fd, F_SETFD, flags | FD_CLOEXEC);
}

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv) {
    if (argv.empty()) throw std::runtime_error("run_process: empty argv");

    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0) throw_errno("pipe");
    if (pipe(err_pipe) != 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        throw_errno("pipe");
    }
    set_cloexec(out_pipe[0]);
    set_cloexec(err_pipe[0]);

    const pid_t pid = fork();
    if (pid < 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        throw_errno("fork");
    }

    if (pid == 0) {
        // Child.
        int devnull = open("/dev/null", O_RDONLY);
        if (devnull >= 0) dup2(devnull, STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);

        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        const char* msg = "exec failed: ";
        (void)!write(STDERR_FILENO, msg, std::strlen(msg));
        (void)!write(STDERR_FILENO, argv[0].c_str(), argv[0].size());
        (void)!write(STDERR_FILENO, "\n", 1);
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    ProcessResult result;
    struct Stream {
        int fd;
        std::string* sink;
        bool open;
    };
    Stream streams[2] = {{out_pipe[0], &result.out, true}, {err_pipe[0], &result.err, true}};

    char buf[8192];
    while (streams[0].open || streams[1].open) {
        pollfd fds[2];
        nfds_t n = 0;
        for (auto& s : streams) {
            if (s.open) {
                fds[n].fd = s.fd;
                fds[n].events = POLLIN;
                ++n;
            }
        }
        if (poll(fds, n, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (nfds_t i = 0; i < n; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            for (auto& s : streams) {
                if (!s.open || s.fd != fds[i].fd) continue;
                const ssize_t got = read(s.fd, buf, sizeof(buf));
                if (got > 0) {
                    s.sink->append(buf, static_cast<std::size_t>(got));
                } else if (got == 0 || (got < 0 && errno != EINTR)) {
                    close(s.fd);
                    s.open = false;
                }
            }
        }
    }
    for (auto& s : streams) {
        if (s.open) close(s.fd);
    }

    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw_errno("waitpid");
    }
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = -WTERMSIG(status);
    }
    return result;
}

} // namespace jitdp::detail
