#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "taylorvid/taylor.hpp"
#include "taylorvid/video_io.hpp"

namespace taylorvid {

/// 𝒯 frames of J×C joint coordinates, optionally with per-joint confidence.
struct SkeletonSequence {
  std::size_t joints = 0;
  std::size_t coords = 0;
  std::size_t frames = 0;
  std::vector<double> values;                     // [frame][joint][coord]
  std::optional<std::vector<double>> confidence;  // [frame][joint]

  std::size_t frame_size() const noexcept { return joints * coords; }
  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(values).subspan(t * frame_size(), frame_size());
  }
  /// Throws InvalidInput on inconsistent sizes, non-finite coordinates or
  /// confidence outside [0,1].
  void validate() const;
};

enum class CoordinateScaling {
  Raw,
  /// Min-max rescale each coordinate axis to [0,1] over all joints and frames.
  Normalized,
};

struct SkeletonConfig {
  int block_len = 4;
  int n_terms = 1;
  int step = 1;
  std::vector<Channel> channels{Channel::Displacement};
  CoordinateScaling scaling = CoordinateScaling::Raw;
};

struct TaylorSkeletonSequence {
  SkeletonConfig config;
  std::size_t joints = 0;
  std::size_t coords = 0;
  std::size_t frames = 0;
  std::vector<double> values;                     // [frame][channel][joint][coord]
  std::optional<std::vector<double>> confidence;  // [frame][joint], from each block's first frame

  std::size_t num_channels() const noexcept { return config.channels.size(); }
  double at(std::size_t frame, std::size_t channel, std::size_t joint, std::size_t coord) const {
    return values[((frame * num_channels() + channel) * joints + joint) * coords + coord];
  }
};

TaylorSkeletonSequence skeleton_taylor(const SkeletonSequence& seq, const SkeletonConfig& cfg = {},
                                       unsigned threads = 1);

/// Single-channel result reshaped into the input schema (𝒯 replaced by N).
SkeletonSequence as_sequence(const TaylorSkeletonSequence& tss);

/// TLV1 with H = J, W = C and one channel per requested concept.
TlvFile to_tlv(const TaylorSkeletonSequence& tss);

// CSV: header `J=<int>,C=<int>[,CONF=1]`, then one line per frame holding J·C
// coordinates (joint-major) followed by J confidences when CONF=1.
SkeletonSequence read_skeleton_csv(std::istream& in);
SkeletonSequence read_skeleton_csv(const std::filesystem::path& path);
void write_skeleton_csv(std::ostream& out, const SkeletonSequence& seq);
void write_skeleton_csv(const std::filesystem::path& path, const SkeletonSequence& seq);

}  // namespace taylorvid
