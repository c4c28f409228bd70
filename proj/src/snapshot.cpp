#include "medianflow/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace medianflow {

static_assert(std::endian::native == std::endian::little, "MFLD I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw SnapshotError("truncated MFLD snapshot");
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralField& f) {
  const auto& g = f.grid();
  std::vector<std::size_t> rows;
  for (std::size_t idx : g.active_index())
    if (idx <= g.conjugate_index(idx)) rows.push_back(idx);
  os.write("MFLD", 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, std::uint32_t(g.n()));
  put<std::uint32_t>(os, std::uint32_t(rows.size()));
  for (std::size_t idx : rows) {
    Wavenumber k = g.wavenumber(idx);
    put<std::int32_t>(os, k.k1);
    put<std::int32_t>(os, k.k2);
    put<double>(os, f.at(idx).real());
    put<double>(os, f.at(idx).imag());
  }
  if (!os) throw SnapshotError("failed writing MFLD snapshot");
}

void write_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("cannot open " + path + " for writing");
  write_snapshot(os, f);
}

SpectralField read_snapshot(std::istream& is, const WaveGrid& grid) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "MFLD", 4) != 0) throw SnapshotError("not an MFLD snapshot");
  auto version = get<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw SnapshotError("unsupported MFLD version " + std::to_string(version));
  auto n = get<std::uint32_t>(is);
  if (int(n) != grid.n())
    throw SnapshotError("snapshot grid n=" + std::to_string(n) + " does not match " + std::to_string(grid.n()));
  auto count = get<std::uint32_t>(is);
  SpectralField f(grid);
  for (std::uint32_t r = 0; r < count; ++r) {
    Wavenumber k{get<std::int32_t>(is), get<std::int32_t>(is)};
    double re = get<double>(is);
    double im = get<double>(is);
    if (!grid.is_active(k))
      throw SnapshotError("snapshot mode (" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ") is not active");
    f.set(k, {re, im});
  }
  return f;
}

SpectralField read_snapshot(const std::string& path, const WaveGrid& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("cannot open " + path);
  return read_snapshot(is, grid);
}

}  // namespace medianflow
