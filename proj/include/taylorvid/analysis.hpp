#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "taylorvid/frames.hpp"
#include "taylorvid/taylor.hpp"

namespace taylorvid {

// --- compression ------------------------------------------------------------

/// before / after; > 1 means the Taylor artifact is smaller.
double compression_ratio(std::uint64_t before_bytes, std::uint64_t after_bytes);

struct SizePair {
  std::string label;
  std::uint64_t before = 0;
  std::uint64_t after = 0;
};

struct CompressionItem {
  std::string label;
  std::string action;
  std::uint64_t before = 0;
  std::uint64_t after = 0;
  double ratio = 0.0;
};

struct ActionSummary {
  std::string action;
  std::size_t count = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
};

struct CompressionReport {
  std::vector<CompressionItem> items;
  std::uint64_t total_before = 0;
  std::uint64_t total_after = 0;
  /// total_before / total_after, never a mean of per-item ratios.
  double aggregate_ratio = 0.0;
  std::vector<ActionSummary> actions;  // sorted by action name
};

/// Action of "ride_bike/clip_03" is "ride_bike"; a label with no directory
/// part is its own action.
std::string action_of(const std::string& label);

CompressionReport aggregate_report(std::span<const SizePair> items);

/// Byte size of a file, or the recursive sum over regular files of a directory.
std::uint64_t artifact_size(const std::filesystem::path& path);

struct ManifestEntry {
  std::string label;
  std::filesystem::path before;
  std::filesystem::path after;
};

/// Lines of `label,before_path,after_path`; relative paths resolve against
/// `base_dir`. Blank lines and lines starting with '#' are skipped, as is a
/// leading `label,before,after` header.
std::vector<ManifestEntry> read_manifest(std::istream& in, const std::filesystem::path& base_dir);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
std::vector<SizePair> measure_manifest(std::span<const ManifestEntry> entries);

nlohmann::json to_json(const CompressionReport& report);

// --- timing -----------------------------------------------------------------

struct PathTiming {
  KernelPath path = KernelPath::Fast;
  unsigned threads = 1;
  /// Median over repeats of (run wall time / frames produced).
  double ms_per_frame = 0.0;
  /// Median absolute deviation of the per-repeat values.
  double mad_ms = 0.0;
  std::vector<double> samples_ms;
};

struct TimingEntry {
  TaylorConfig config;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t frames = 0;  // Taylor frames per run
  std::vector<PathTiming> timings;

  const PathTiming* find(KernelPath path, unsigned threads = 1) const;
};

struct TimingReport {
  std::vector<TimingEntry> entries;
};

struct BenchOptions {
  int repeats = 5;
  int warmup = 2;
  bool include_reference = true;
  /// Also time the fast path with this many workers (0 = hardware); 1 disables.
  unsigned parallel_threads = 1;
};

std::string_view path_name(KernelPath path) noexcept;

TimingReport bench_taylor(const GrayVideo& video, std::span<const TaylorConfig> configs,
                          const BenchOptions& opts = {});

nlohmann::json to_json(const TimingReport& report);

}  // namespace taylorvid
