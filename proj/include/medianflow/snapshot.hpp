#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "medianflow/field.hpp"

namespace medianflow {

// MFLD snapshot: "MFLD", version u32, n u32, count u32, then count records
// (k1 i32, k2 i32, re f64, im f64), little-endian, one record per +-k pair.

inline constexpr std::uint32_t kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_snapshot(std::ostream& os, const SpectralField& f);
void write_snapshot(const std::string& path, const SpectralField& f);
/// Reads into `grid`; the stored n must match and every record must be active.
SpectralField read_snapshot(std::istream& is, const WaveGrid& grid);
SpectralField read_snapshot(const std::string& path, const WaveGrid& grid);

}  // namespace medianflow
