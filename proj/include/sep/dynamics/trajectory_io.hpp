#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sep/core/config.hpp"

namespace sep::dynamics {

// Append-only binary snapshot stream, little-endian:
//
//   u8  format version (kTrajectoryFormatVersion)
//   u32 header length, then that many bytes of UTF-8 JSON (resolved run config)
//   records until EOF:
//     u32 replica id
//     f64 time
//     u32 run count, then per run: i8 symbol, u32 run length
//
// Symbols are the simulator site codes (see encode_state).
inline constexpr std::uint8_t kTrajectoryFormatVersion = 1;

using Run = std::pair<Symbol, std::uint32_t>;

std::vector<Run> rle_encode(std::span<const Symbol> values);
std::vector<Symbol> rle_decode(std::span<const Run> runs);

class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::string& path, const std::string& header_json);
  void write(std::uint32_t replica, double time, std::span<const Symbol> values);

 private:
  std::ofstream out_;
};

struct TrajectoryRecord {
  std::uint32_t replica;
  double time;
  std::vector<Symbol> values;
};

struct TrajectoryFile {
  std::uint8_t version;
  std::string header_json;
  std::vector<TrajectoryRecord> records;
};

TrajectoryFile read_trajectory(const std::string& path);

}  // namespace sep::dynamics
