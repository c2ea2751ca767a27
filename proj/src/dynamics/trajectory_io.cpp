#include "sep/dynamics/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace sep::dynamics {

namespace {

static_assert(std::endian::native == std::endian::little, "trajectory format assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

std::vector<Run> rle_encode(std::span<const Symbol> values) {
  std::vector<Run> runs;
  for (Symbol s : values) {
    if (!runs.empty() && runs.back().first == s) ++runs.back().second;
    else runs.emplace_back(s, 1u);
  }
  return runs;
}

std::vector<Symbol> rle_decode(std::span<const Run> runs) {
  std::vector<Symbol> v;
  for (const auto& [s, n] : runs) v.insert(v.end(), n, s);
  return v;
}

TrajectoryWriter::TrajectoryWriter(const std::string& path, const std::string& header_json)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open trajectory file " + path);
  put(out_, kTrajectoryFormatVersion);
  put(out_, static_cast<std::uint32_t>(header_json.size()));
  out_.write(header_json.data(), static_cast<std::streamsize>(header_json.size()));
}

void TrajectoryWriter::write(std::uint32_t replica, double time, std::span<const Symbol> values) {
  const auto runs = rle_encode(values);
  put(out_, replica);
  put(out_, time);
  put(out_, static_cast<std::uint32_t>(runs.size()));
  for (const auto& [s, n] : runs) {
    put(out_, s);
    put(out_, n);
  }
  out_.flush();
  if (!out_) throw std::runtime_error("trajectory write failed");
}

TrajectoryFile read_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trajectory file " + path);
  TrajectoryFile f{};
  std::uint32_t len = 0;
  if (!get(in, f.version) || !get(in, len)) throw std::runtime_error("truncated trajectory header");
  if (f.version != kTrajectoryFormatVersion) throw std::runtime_error("unsupported trajectory format version");
  f.header_json.resize(len);
  if (!in.read(f.header_json.data(), len)) throw std::runtime_error("truncated trajectory header");
  TrajectoryRecord rec{};
  while (get(in, rec.replica)) {
    std::uint32_t nruns = 0;
    if (!get(in, rec.time) || !get(in, nruns)) throw std::runtime_error("truncated trajectory record");
    std::vector<Run> runs(nruns);
    for (auto& [s, n] : runs)
      if (!get(in, s) || !get(in, n)) throw std::runtime_error("truncated trajectory record");
    rec.values = rle_decode(runs);
    f.records.push_back(rec);
  }
  return f;
}

}  // namespace sep::dynamics
