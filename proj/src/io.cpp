#include "kzmps/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kzmps {

namespace {

constexpr std::uint32_t kStateMagic = 0x4b5a5053;  // "KZPS"
constexpr std::uint32_t kStateVersion = 1;
constexpr std::uint32_t kCheckpointMagic = 0x4b5a4350;  // "KZCP"

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot read: truncated file");
}

void put_mat(std::ostream& os, const Mat& m) {
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(Complex) * m.size()));
}

void get_mat(std::istream& is, Mat& m, int rows, int cols) {
  m.resize(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(Complex) * m.size()));
  if (!is) throw std::runtime_error("snapshot read: truncated file");
}

void write_state_body(std::ostream& os, const CanonicalUMPS& psi) {
  put<std::uint32_t>(os, psi.d);
  put<std::uint32_t>(os, psi.chi);
  put<double>(os, psi.time);
  for (const auto& m : psi.AL) put_mat(os, m);
  for (const auto& m : psi.AR) put_mat(os, m);
  put_mat(os, psi.C);
}

CanonicalUMPS read_state_body(std::istream& is) {
  CanonicalUMPS psi;
  std::uint32_t d = 0, chi = 0;
  get(is, d);
  get(is, chi);
  get(is, psi.time);
  if (d < 1 || chi < 1 || d > 4096 || chi > 65536)
    throw std::runtime_error("snapshot read: implausible dimensions");
  psi.d = static_cast<int>(d);
  psi.chi = static_cast<int>(chi);
  psi.AL.resize(d);
  psi.AR.resize(d);
  for (auto& m : psi.AL) get_mat(is, m, chi, chi);
  for (auto& m : psi.AR) get_mat(is, m, chi, chi);
  get_mat(is, psi.C, chi, chi);
  return psi;
}

}  // namespace

void save_state(const CanonicalUMPS& psi, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_state: cannot open " + path);
  put(os, kStateMagic);
  put(os, kStateVersion);
  write_state_body(os, psi);
  if (!os) throw std::runtime_error("save_state: write failed for " + path);
}

CanonicalUMPS load_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_state: cannot open " + path);
  std::uint32_t magic = 0, version = 0;
  get(is, magic);
  get(is, version);
  if (magic != kStateMagic || version != kStateVersion)
    throw std::runtime_error("load_state: bad magic/version in " + path);
  return read_state_body(is);
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  put(os, kCheckpointMagic);
  put(os, kStateVersion);
  put(os, cp.t);
  put(os, cp.step);
  put(os, cp.config_hash);
  write_state_body(os, cp.state);
  if (!os) throw std::runtime_error("save_checkpoint: write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::uint32_t magic = 0, version = 0;
  get(is, magic);
  get(is, version);
  if (magic != kCheckpointMagic || version != kStateVersion)
    throw std::runtime_error("load_checkpoint: bad magic/version in " + path);
  Checkpoint cp;
  get(is, cp.t);
  get(is, cp.step);
  get(is, cp.config_hash);
  cp.state = read_state_body(is);
  return cp;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& comments) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  for (const auto& c : comments) os << "# " << c << "\n";
  for (size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  char buf[32];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << buf << (i + 1 < row.size() ? "," : "\n");
    }
  }
  if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace kzmps
