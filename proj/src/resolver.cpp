#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>
#include <csignal>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "corrfilt/operators.hpp"
#include "corrfilt/resolver.hpp"

namespace corrfilt {

namespace {

std::string temp_dir() {
    if (const char* env = std::getenv("CORRFILT_TMP"); env && *env) return env;
    if (const char* env = std::getenv("TMPDIR"); env && *env) return env;
    return "/tmp";
}

std::string unique_stem() {
    static std::atomic<unsigned> counter{0};
    return "corrfilt_" + std::to_string(getpid()) + "_" +
           std::to_string(counter.fetch_add(1));
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

std::string read_excerpt(const std::string& path, size_t limit = 400) {
    std::ifstream in(path);
    std::string s((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
    if (s.size() > limit) s = s.substr(0, limit) + "...";
    return s;
}

struct TempFiles {
    std::vector<std::string> paths;
    ~TempFiles() {
        for (const auto& p : paths) std::remove(p.c_str());
    }
};

// Runs the command through /bin/sh with stderr sent to err_path, killing it
// after the deadline. Returns the exit status, or -1 on timeout.
int run_with_timeout(const std::string& cmd, const std::string& err_path,
                     double timeout_s) {
    const pid_t pid = fork();
    if (pid < 0) throw IoError("resolver: fork failed");
    if (pid == 0) {
        setpgid(0, 0);
        if (!std::freopen(err_path.c_str(), "w", stderr)) _exit(126);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    const auto deadline =
        std::chrono::steady_clock::now() +
        std::chrono::milliseconds(static_cast<long>(timeout_s * 1000.0));
    int status = 0;
    for (;;) {
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw IoError("resolver: waitpid failed");
        if (std::chrono::steady_clock::now() > deadline) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            return -1;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

} // namespace

Image resolve_external(const Image& y_corrected, int alpha,
                       const ResolverSpec& spec) {
    if (spec.kind != ResolverSpec::Kind::external)
        throw std::invalid_argument("resolve_external: spec.kind is not external");
    for (const char* ph : {"{in}", "{out}", "{scale}"})
        if (spec.command_template.find(ph) == std::string::npos)
            throw std::invalid_argument(
                std::string("resolver command template is missing placeholder ") + ph);

    const std::string stem = temp_dir() + "/" + unique_stem();
    const std::string in_path = stem + "_in.pnm";
    const std::string out_path = stem + "_out.pnm";
    const std::string err_path = stem + "_err.txt";
    TempFiles cleanup;
    cleanup.paths = {in_path, out_path, err_path};

    save_image(y_corrected, in_path);

    std::string cmd = spec.command_template;
    replace_all(cmd, "{in}", in_path);
    replace_all(cmd, "{out}", out_path);
    replace_all(cmd, "{scale}", std::to_string(alpha));

    const int status = run_with_timeout(cmd, err_path, spec.timeout_seconds);
    if (status == -1)
        throw IoError("external resolver timed out after " +
                      std::to_string(spec.timeout_seconds) + " s: " +
                      spec.command_template);
    if (status != 0)
        throw IoError("external resolver exited with code " +
                      std::to_string(status) + "; stderr: " +
                      read_excerpt(err_path));

    Image out = load_image(out_path);
    return out;
}

Image super_resolve(const Image& y, const CorrectionFilter& h, int alpha,
                    const ResolverSpec& spec) {
    const Image corrected = apply_correction(y, h);
    Image out;
    if (spec.kind == ResolverSpec::Kind::builtin_linear) {
        out = pseudo_inverse_reconstruct(corrected, alpha, spec.builtin_epsilon);
    } else {
        out = resolve_external(corrected, alpha, spec);
    }
    if (out.height() != alpha * y.height() || out.width() != alpha * y.width())
        throw IoError("resolver produced wrong output dimensions: got " +
                      std::to_string(out.width()) + "x" +
                      std::to_string(out.height()) + ", expected " +
                      std::to_string(alpha * y.width()) + "x" +
                      std::to_string(alpha * y.height()));
    return out;
}

} // namespace corrfilt
