#include <cstdint>
#include <cstring>
#include <fstream>

#include "qscat/resolvent.hpp"

namespace qscat {

namespace {

constexpr char kMagic[4] = {'Q', 'S', 'K', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

// Flat little-endian cache: magic, version, dims, h, lo, E_k, target
// count, targets, entries.
void KernelMatrix::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config_error("KernelMatrix::save: cannot open " + path);
  os.write(kMagic, 4);
  put(os, kVersion);
  for (int d = 0; d < 3; ++d) put(os, std::int32_t(source.n[size_t(d)]));
  put(os, source.h);
  for (int d = 0; d < 3; ++d) put(os, source.lo[size_t(d)]);
  put(os, E_k);
  put(os, std::uint64_t(targets.size()));
  for (const Vec3& t : targets)
    for (int d = 0; d < 3; ++d) put(os, t[size_t(d)]);
  os.write(reinterpret_cast<const char*>(entries.data()),
           std::streamsize(entries.size() * sizeof(cplx)));
  if (!os) throw config_error("KernelMatrix::save: short write to " + path);
}

KernelMatrix KernelMatrix::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("KernelMatrix::load: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  std::uint32_t version = 0;
  get(is, version);
  if (!is || std::memcmp(magic, kMagic, 4) != 0 || version != kVersion)
    throw config_error("KernelMatrix::load: bad header in " + path);
  std::array<int, 3> n{};
  for (int d = 0; d < 3; ++d) {
    std::int32_t v = 0;
    get(is, v);
    n[size_t(d)] = v;
  }
  double h = 0.0;
  get(is, h);
  Vec3 lo{};
  for (int d = 0; d < 3; ++d) get(is, lo[size_t(d)]);
  KernelMatrix m;
  m.source = Grid3(n, h, lo);
  get(is, m.E_k);
  std::uint64_t nt = 0;
  get(is, nt);
  m.targets.resize(size_t(nt));
  for (Vec3& t : m.targets)
    for (int d = 0; d < 3; ++d) get(is, t[size_t(d)]);
  m.entries.resize(size_t(nt) * size_t(m.source.size()));
  is.read(reinterpret_cast<char*>(m.entries.data()),
          std::streamsize(m.entries.size() * sizeof(cplx)));
  if (!is) throw config_error("KernelMatrix::load: truncated file " + path);
  return m;
}

}  // namespace qscat
