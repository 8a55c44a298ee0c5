#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hlab/grid.hpp"

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; add byte swapping for this host");

namespace hlab {

namespace {

constexpr char kMagic[4] = {'H', 'L', 'A', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated header in " + path);
  return v;
}

}  // namespace

void write_field(const std::string& path, const Field& f, int split) {
  if (split < 0 || 2 * split > f.rank()) throw InvalidArgument("split must lie in [0, rank/2]");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().n()));
  put<double>(out, f.grid().length());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.rank()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(split));
  // std::complex<double> is layout-compatible with double[2].
  out.write(reinterpret_cast<const char*>(f.data().data()),
            static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  if (!out) throw FormatError("write failed for " + path);
}

Field read_field(const std::string& path, int* split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic in " + path);
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) throw FormatError("unsupported field version in " + path);
  const auto dim = get<std::uint32_t>(in, path);
  const auto n = get<std::uint32_t>(in, path);
  const auto length = get<double>(in, path);
  const auto rank = get<std::uint32_t>(in, path);
  const auto sp = get<std::uint8_t>(in, path);
  if (rank > 64 || dim > 3 || n > (1u << 20)) throw FormatError("implausible shape in " + path);
  GridSpec grid = GridSpec::make(static_cast<int>(dim), static_cast<int>(n), length);
  if (2 * sp > rank) throw FormatError("split exceeds rank in " + path);
  Field f(grid, static_cast<int>(rank));
  in.read(reinterpret_cast<char*>(f.data().data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  if (!in) throw FormatError("truncated data in " + path);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in " + path);
  if (split != nullptr) *split = sp;
  return f;
}

}  // namespace hlab
