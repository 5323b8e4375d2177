#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "passconn/tracking.hpp"

namespace passconn::bench {

struct Config {
  std::string phantom = "slab";                 // "bar" or "slab"
  std::vector<double> resolutions{2.0, 1.0, 0.5};  // source voxel sizes in mm, coarse to fine
  std::int64_t k = 20;
  std::int64_t k_star = 20000;
  int repeat = 3;
  int threads = 1;
  EndpointMode endpoint_mode = EndpointMode::both;
  TrackParams track{0.5, 1000, 5.0, 0.0, 1};
};

// One CSV row per (resolution, algorithm, repeat).
struct Record {
  double resolution_mm = 0.0;
  std::string algorithm;
  int repeat = 0;
  double wall_seconds = 0.0;
  std::size_t n_source_voxels = 0;
  std::int64_t k = 0;
  std::int64_t k_star = 0;
  std::int64_t generated = 0;
  std::int64_t attempts = 0;
  double mean_passthrough = 0.0;  // proposed only; mean source voxels crossed per streamline
  int threads = 1;
  std::string cpu_model;
};

// Fixed column order of the report.
inline constexpr const char* csv_header =
    "resolution_mm,algorithm,repeat,wall_seconds,n_source_voxels,k,kstar,generated,attempts,mean_passthrough,threads,"
    "cpu_model";

std::vector<Record> run(const Config& config, const std::function<void(const Record&)>& progress = {});
void write_csv(const std::vector<Record>& records, const std::filesystem::path& path);

// Fastest repeat per (resolution, algorithm).
struct Summary {
  double resolution_mm = 0.0;
  std::size_t n_source_voxels = 0;
  double traditional_seconds = 0.0;
  double proposed_seconds = 0.0;
  double mean_passthrough = 0.0;
  double speedup() const { return traditional_seconds / proposed_seconds; }
};
std::vector<Summary> summarize(const std::vector<Record>& records);

std::string cpu_model();

}  // namespace passconn::bench
