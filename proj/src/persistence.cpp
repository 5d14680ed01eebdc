#include "nbch/persistence.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace nbch {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode), &std::fclose);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  return f;
}

void put(std::FILE* f, const void* p, std::size_t n) {
  if (std::fwrite(p, 1, n, f) != n)
    throw std::runtime_error("checkpoint: short write");
}

void get(std::FILE* f, void* p, std::size_t n) {
  if (std::fread(p, 1, n, f) != n)
    throw std::runtime_error("checkpoint: truncated file");
}

class LockFile {
 public:
  explicit LockFile(std::string path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0)
      throw std::runtime_error("append_record: lock file exists: " + path_);
  }
  ~LockFile() {
    ::close(fd_);
    ::unlink(path_.c_str());
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  std::string path_;
  int fd_;
};

}  // namespace

void save_checkpoint(const State& state, const std::string& path) {
  require_same_grid(state.xi, state.theta);
  require_same_grid(state.xi, state.psi);
  const GridSpec& g = state.xi.grid();
  FilePtr f = open_file(path, "wb");
  put(f.get(), "NBCH", 4);
  const std::uint32_t version = 1;
  put(f.get(), &version, sizeof version);
  const std::uint64_t nx = g.nx, ny = g.ny;
  put(f.get(), &nx, sizeof nx);
  put(f.get(), &ny, sizeof ny);
  const double header[3] = {g.L, g.Y, state.t};
  put(f.get(), header, sizeof header);
  const std::size_t bytes = g.size() * sizeof(double);
  put(f.get(), state.xi.data(), bytes);
  put(f.get(), state.theta.data(), bytes);
  put(f.get(), state.psi.data(), bytes);
  if (std::fflush(f.get()) != 0)
    throw std::runtime_error("checkpoint: flush failed for " + path);
}

State load_checkpoint(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  char magic[4];
  get(f.get(), magic, 4);
  if (std::memcmp(magic, "NBCH", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  std::uint32_t version;
  get(f.get(), &version, sizeof version);
  if (version != 1)
    throw std::runtime_error("checkpoint: unsupported version in " + path);
  std::uint64_t nx, ny;
  get(f.get(), &nx, sizeof nx);
  get(f.get(), &ny, sizeof ny);
  double header[3];
  get(f.get(), header, sizeof header);
  if (nx > (1u << 20) || ny > (1u << 20))
    throw std::runtime_error("checkpoint: implausible dimensions in " + path);
  GridSpec g = make_grid(header[0], header[1], static_cast<std::size_t>(nx),
                         static_cast<std::size_t>(ny));
  State s = make_state(g);
  s.t = header[2];
  const std::size_t bytes = g.size() * sizeof(double);
  get(f.get(), s.xi.data(), bytes);
  get(f.get(), s.theta.data(), bytes);
  get(f.get(), s.psi.data(), bytes);
  char extra;
  if (std::fread(&extra, 1, 1, f.get()) != 0)
    throw std::runtime_error("checkpoint: trailing bytes in " + path);
  return s;
}

State load_checkpoint(const std::string& path, const GridSpec& expect) {
  State s = load_checkpoint(path);
  if (!(s.xi.grid() == expect))
    throw std::runtime_error("checkpoint: grid mismatch in " + path);
  return s;
}

void append_record(const DiagRecord& record, const std::string& csv_path) {
  std::vector<double> ks;
  ks.reserve(record.tail.size());
  for (const auto& [k, mass] : record.tail) ks.push_back(k);
  const std::string header = csv_header(ks);

  LockFile lock(csv_path + ".lock");
  bool need_header = true;
  {
    std::ifstream in(csv_path);
    std::string first;
    if (in && std::getline(in, first) && !first.empty()) {
      if (first != header)
        throw std::runtime_error("append_record: header mismatch in " + csv_path);
      need_header = false;
    }
  }
  std::ofstream out(csv_path, std::ios::app);
  if (!out)
    throw std::runtime_error("append_record: cannot open " + csv_path);
  if (need_header) out << header << '\n';
  out << csv_row(record) << '\n';
  out.flush();
  if (!out)
    throw std::runtime_error("append_record: write failed for " + csv_path);
}

}  // namespace nbch
