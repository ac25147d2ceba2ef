// Field snapshots: raw little-endian float64 payload (row-major, x fastest)
// next to a JSON header carrying the grid, time, model and seed metadata.
// write_snapshot("dir/t5") produces dir/t5.json and dir/t5.raw.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "fracpf/spectral.hpp"
#include "fracpf/version.hpp"

namespace fracpf {

struct SnapshotHeader {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  double time = 0.0;
  std::string model;  // "fch", "fmbe_slope", "fmbe_noslope", "fac"
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::string rng_algorithm;
  int format_version = snapshot_format_version;

  friend bool operator==(const SnapshotHeader&, const SnapshotHeader&) = default;
};

void write_snapshot(const std::filesystem::path& base, const SnapshotHeader& header,
                    const Field& field);

// Throws IoError on missing/short files or a header that does not match the
// payload (dimensions, format version).
std::pair<SnapshotHeader, Field> read_snapshot(const std::filesystem::path& base);

}  // namespace fracpf
