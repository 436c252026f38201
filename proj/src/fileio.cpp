#include "affect/fileio.hpp"

#include "affect/core.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <string>
#include <sys/stat.h>
#include <unistd.h>

namespace affect {

namespace {

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const { return fd_; }

private:
    int fd_;
};

[[noreturn]] void fail(const std::string& what, const std::filesystem::path& path) {
    throw IoError(what + " " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

void append_durable(const std::filesystem::path& path, std::string_view data, std::string_view header) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    Fd fd(::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
    if (fd.get() < 0) fail("cannot open", path);

    struct stat st {};
    if (::fstat(fd.get(), &st) != 0) fail("cannot stat", path);
    std::string buffer;
    if (st.st_size == 0 && !header.empty()) buffer.append(header);
    buffer.append(data);

    std::size_t written = 0;
    while (written < buffer.size()) {
        const auto n = ::write(fd.get(), buffer.data() + written, buffer.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("cannot write", path);
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd.get()) != 0) fail("cannot fsync", path);
}

std::size_t truncate_torn_tail(const std::filesystem::path& path) {
    Fd fd(::open(path.c_str(), O_RDWR | O_CLOEXEC));
    if (fd.get() < 0) {
        if (errno == ENOENT) return 0;
        fail("cannot open", path);
    }
    struct stat st {};
    if (::fstat(fd.get(), &st) != 0) fail("cannot stat", path);
    const auto size = static_cast<std::size_t>(st.st_size);
    if (size == 0) return 0;

    // Scan backwards for the last newline.
    constexpr std::size_t kChunk = 4096;
    std::string buf;
    std::size_t end = size;
    while (end > 0) {
        const std::size_t begin = end > kChunk ? end - kChunk : 0;
        buf.resize(end - begin);
        if (::pread(fd.get(), buf.data(), buf.size(), static_cast<off_t>(begin)) !=
            static_cast<ssize_t>(buf.size())) {
            fail("cannot read", path);
        }
        const auto pos = buf.rfind('\n');
        if (pos != std::string::npos) {
            const std::size_t keep = begin + pos + 1;
            if (keep == size) return 0;
            if (::ftruncate(fd.get(), static_cast<off_t>(keep)) != 0) fail("cannot truncate", path);
            ::fsync(fd.get());
            return size - keep;
        }
        end = begin;
    }
    if (::ftruncate(fd.get(), 0) != 0) fail("cannot truncate", path);
    ::fsync(fd.get());
    return size;
}

}  // namespace affect
