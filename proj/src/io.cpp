#include "gmcflow/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace gmcflow {

static_assert(std::endian::native == std::endian::little,
              "TGF1 writer assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'T', 'G', 'F', '1'};

void write_header(std::ofstream& out, const TorusGrid& g, std::uint8_t kind) {
  out.write(kMagic, 4);
  std::uint8_t dim = static_cast<std::uint8_t>(g.dim);
  std::uint32_t n = static_cast<std::uint32_t>(g.n);
  out.write(reinterpret_cast<const char*>(&dim), 1);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&kind), 1);
}

TorusGrid read_header(std::ifstream& in, const std::string& path, std::uint8_t expect_kind) {
  char magic[4];
  std::uint8_t dim = 0, kind = 0;
  std::uint32_t n = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&dim), 1);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&kind), 1);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("TGF1: bad magic in " + path);
  if (kind != expect_kind) throw std::runtime_error("TGF1: unexpected payload kind in " + path);
  return TorusGrid(dim, static_cast<int>(n));
}

}  // namespace

void write_field(const std::string& path, const GridField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("TGF1: cannot open " + path + " for writing");
  write_header(out, f.grid, 0);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(double) * f.values.size()));
  if (!out) throw std::runtime_error("TGF1: short write to " + path);
}

void write_field(const std::string& path, const SpectralField& F) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("TGF1: cannot open " + path + " for writing");
  write_header(out, F.grid, 1);
  out.write(reinterpret_cast<const char*>(F.coeffs.data()),
            static_cast<std::streamsize>(2 * sizeof(double) * F.coeffs.size()));
  if (!out) throw std::runtime_error("TGF1: short write to " + path);
}

GridField read_grid_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("TGF1: cannot open " + path);
  TorusGrid g = read_header(in, path, 0);
  GridField f(g);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(sizeof(double) * f.values.size()));
  if (!in) throw std::runtime_error("TGF1: truncated payload in " + path);
  return f;
}

SpectralField read_spectral_field(const std::string& path, bool hermitian) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("TGF1: cannot open " + path);
  TorusGrid g = read_header(in, path, 1);
  SpectralField F(g, hermitian);
  in.read(reinterpret_cast<char*>(F.coeffs.data()),
          static_cast<std::streamsize>(2 * sizeof(double) * F.coeffs.size()));
  if (!in) throw std::runtime_error("TGF1: truncated payload in " + path);
  return F;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checksum: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

}  // namespace gmcflow
