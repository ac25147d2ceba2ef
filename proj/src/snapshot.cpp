#include "fracpf/snapshot.hpp"

#include <fstream>

#include "json.hpp"

#include "fracpf/errors.hpp"

namespace fracpf {

namespace {

std::filesystem::path json_path(const std::filesystem::path& base) {
  auto p = base;
  p += ".json";
  return p;
}

std::filesystem::path raw_path(const std::filesystem::path& base) {
  auto p = base;
  p += ".raw";
  return p;
}

}  // namespace

void write_snapshot(const std::filesystem::path& base, const SnapshotHeader& header,
                    const Field& field) {
  if (header.nx != field.grid.nx || header.ny != field.grid.ny) {
    throw IoError("snapshot header dimensions do not match the field");
  }
  nlohmann::ordered_json j;
  j["format_version"] = header.format_version;
  j["nx"] = header.nx;
  j["ny"] = header.ny;
  j["lx"] = header.lx;
  j["ly"] = header.ly;
  j["time"] = header.time;
  j["model"] = header.model;
  j["alpha"] = header.alpha;
  j["seed"] = header.seed;
  j["rng_algorithm"] = header.rng_algorithm;

  std::ofstream jf(json_path(base));
  if (!jf) throw IoError("cannot write " + json_path(base).string());
  jf << j.dump(2) << '\n';
  if (!jf.flush()) throw IoError("write failed for " + json_path(base).string());

  std::ofstream rf(raw_path(base), std::ios::binary);
  if (!rf) throw IoError("cannot write " + raw_path(base).string());
  rf.write(reinterpret_cast<const char*>(field.data.data()),
           static_cast<std::streamsize>(field.data.size() * sizeof(double)));
  if (!rf.flush()) throw IoError("write failed for " + raw_path(base).string());
}

std::pair<SnapshotHeader, Field> read_snapshot(const std::filesystem::path& base) {
  std::ifstream jf(json_path(base));
  if (!jf) throw IoError("cannot open " + json_path(base).string());
  nlohmann::json j;
  try {
    jf >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed snapshot header " + json_path(base).string() + ": " + e.what());
  }

  SnapshotHeader h;
  try {
    h.format_version = j.at("format_version").get<int>();
    h.nx = j.at("nx").get<int>();
    h.ny = j.at("ny").get<int>();
    h.lx = j.at("lx").get<double>();
    h.ly = j.at("ly").get<double>();
    h.time = j.at("time").get<double>();
    h.model = j.at("model").get<std::string>();
    h.alpha = j.at("alpha").get<double>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.rng_algorithm = j.at("rng_algorithm").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("incomplete snapshot header " + json_path(base).string() + ": " + e.what());
  }
  if (h.format_version != snapshot_format_version) {
    throw IoError("unsupported snapshot format version " + std::to_string(h.format_version) +
                  " in " + json_path(base).string());
  }
  if (h.nx < 4 || h.ny < 4 || h.nx % 2 != 0 || h.ny % 2 != 0 || h.lx <= 0.0 || h.ly <= 0.0) {
    throw IoError("invalid grid in snapshot header " + json_path(base).string());
  }

  Field f(Grid(h.nx, h.ny, h.lx, h.ly));
  std::ifstream rf(raw_path(base), std::ios::binary);
  if (!rf) throw IoError("cannot open " + raw_path(base).string());
  const auto expect = static_cast<std::streamsize>(f.data.size() * sizeof(double));
  rf.read(reinterpret_cast<char*>(f.data.data()), expect);
  if (rf.gcount() != expect) {
    throw IoError("snapshot payload " + raw_path(base).string() + " is shorter than " +
                  std::to_string(h.nx) + "x" + std::to_string(h.ny) + " float64");
  }
  char extra;
  if (rf.read(&extra, 1), rf.gcount() != 0) {
    throw IoError("snapshot payload " + raw_path(base).string() +
                  " is larger than the header promises");
  }
  return {std::move(h), std::move(f)};
}

}  // namespace fracpf
