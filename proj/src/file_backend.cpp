#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <string_view>

#include "stablebench/bench.hpp"

namespace stablebench {

namespace {

std::string os_error(std::string_view what, const std::string& path, int err) {
  return std::string(what) + " '" + path + "': " + std::strerror(err);
}

bool direct_disabled_by_env() {
  const char* v = std::getenv("STABLEBENCH_NO_DIRECT");
  return v != nullptr && std::string_view(v) == "1";
}

}  // namespace

FileBackend::FileBackend(FileBackendOptions options)
    : options_(std::move(options)), origin_(std::chrono::steady_clock::now()) {
  if (options_.directory.empty()) {
    throw ConfigError("benchmark directory is empty");
  }
  struct stat st{};
  if (::stat(options_.directory.c_str(), &st) != 0) {
    throw IoError(os_error("cannot stat benchmark directory", options_.directory, errno));
  }
  if (!S_ISDIR(st.st_mode)) {
    throw ConfigError("benchmark path '" + options_.directory + "' is not a directory");
  }
  if (options_.label.empty()) options_.label = options_.directory;
#ifdef O_DIRECT
  direct_ = options_.bypass_cache;
#endif
  if (options_.bypass_cache && (!direct_ || direct_disabled_by_env())) {
    direct_ = false;
    fell_back_ = true;
  }
}

FileBackend::~FileBackend() { finish(); }

int FileBackend::open_target(bool direct, bool truncate) {
  int flags = O_WRONLY | O_CREAT | O_CLOEXEC;
  if (truncate) flags |= O_TRUNC;
  if (options_.sync_per_write) flags |= O_SYNC;
#ifdef O_DIRECT
  if (direct) flags |= O_DIRECT;
#else
  (void)direct;
#endif
  return ::open(path_.c_str(), flags, 0644);
}

void FileBackend::switch_to_fallback() {
  direct_ = false;
  fell_back_ = true;
}

void FileBackend::prepare(std::uint64_t, int run_index, BufferSize buffer) {
  finish();
  path_ = options_.directory + "/stablebench." + std::to_string(::getpid()) + "." +
          std::to_string(run_index) + "." + buffer.label() + ".dat";
  offset_ = 0;

  fd_ = open_target(direct_, true);
  if (fd_ < 0 && direct_ && errno == EINVAL) {
    switch_to_fallback();
    fd_ = open_target(false, true);
  }
  if (fd_ < 0) {
    const int err = errno;
    path_.clear();
    throw IoError(os_error("cannot create benchmark file", options_.directory, err));
  }
}

double FileBackend::timed_write(std::span<const std::byte> data) {
  if (fd_ < 0) {
    throw IoError("timed_write called without an open benchmark file");
  }
  auto start = std::chrono::steady_clock::now();
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::pwrite(fd_, data.data() + done, data.size() - done,
                               static_cast<off_t>(offset_ + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EINVAL && direct_) {
        // Alignment rejected by this file system: reopen buffered and redo
        // the write from scratch so the retry is timed on its own.
        ::close(fd_);
        switch_to_fallback();
        fd_ = open_target(false, false);
        if (fd_ < 0) throw IoError(os_error("cannot reopen benchmark file", path_, errno));
        done = 0;
        start = std::chrono::steady_clock::now();
        continue;
      }
      throw IoError(os_error("write failed on", path_, errno));
    }
    done += static_cast<std::size_t>(n);
  }
  if (options_.sync_per_write && ::fsync(fd_) != 0) {
    throw IoError(os_error("fsync failed on", path_, errno));
  }
  const auto stop = std::chrono::steady_clock::now();
  offset_ += data.size();
  return std::chrono::duration<double, std::micro>(stop - start).count();
}

void FileBackend::finish() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (!path_.empty()) {
    ::unlink(path_.c_str());
    path_.clear();
  }
}

double FileBackend::now_us() {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - origin_)
      .count();
}

std::string FileBackend::id() const {
  return fell_back_ ? options_.label + "+flush-fallback" : options_.label;
}

}  // namespace stablebench
