#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "taylorvid/frames.hpp"

namespace taylorvid {

inline constexpr int kMinBlockLength = 4;
inline constexpr int kMaxTerms = 20;
inline constexpr std::size_t kNumChannels = 3;

enum class Channel : std::size_t { Displacement = 0, Velocity = 1, Acceleration = 2 };

struct TaylorConfig {
  int block_len = 4;
  int n_terms = 1;
  int step = 1;
  bool gray_augment = false;

  /// Largest term count a block of `block_len` frames can feed.
  static constexpr int max_terms_for(int block_len) noexcept { return block_len - 3; }

  /// Throws InvalidConfig naming the violated constraint.
  void validate() const;

  friend bool operator==(const TaylorConfig&, const TaylorConfig&) = default;
};

/// First map of each forward-difference order 1..n_terms+2 of a block.
class DifferenceStack {
public:
  DifferenceStack(std::size_t height, std::size_t width, std::vector<Plane> maps)
      : height_(height), width_(width), maps_(std::move(maps)) {}

  std::size_t orders() const noexcept { return maps_.size(); }
  /// `order` is 1-based: order 1 is F_2 - F_1.
  const Plane& order(std::size_t order) const { return maps_.at(order - 1); }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

private:
  std::size_t height_;
  std::size_t width_;
  std::vector<Plane> maps_;
};

/// H×W×3 signed motion map, stored [channel][row][col].
struct TaylorFrame {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  TaylorFrame() = default;
  TaylorFrame(std::size_t h, std::size_t w) : height(h), width(w), values(kNumChannels * h * w, 0.0) {}

  std::size_t plane_size() const noexcept { return height * width; }
  std::span<double> channel(Channel c) {
    return std::span<double>(values).subspan(static_cast<std::size_t>(c) * plane_size(), plane_size());
  }
  std::span<const double> channel(Channel c) const {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(c) * plane_size(), plane_size());
  }
  double at(Channel c, std::size_t row, std::size_t col) const {
    return values[static_cast<std::size_t>(c) * plane_size() + row * width + col];
  }
};

struct TaylorVideo {
  TaylorConfig config;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<TaylorFrame> frames;

  std::size_t size() const noexcept { return frames.size(); }
};

enum class KernelPath { Reference, Fast };

struct ExecOptions {
  KernelPath path = KernelPath::Fast;
  /// 0 picks the hardware concurrency; 1 runs sequentially.
  unsigned threads = 1;
};

/// Exact factorials 0!..20!.
const std::array<std::uint64_t, kMaxTerms + 1>& factorial_table() noexcept;

/// N = floor((frames - block_len) / step) + 1, or 0 when the video is too short.
std::size_t taylor_frame_count(std::size_t frames, int block_len, int step) noexcept;

std::vector<TemporalBlock> sliding_blocks(const FrameStack& frames, int block_len, int step);
std::vector<TemporalBlock> sliding_blocks(const GrayVideo& video, int block_len, int step);

DifferenceStack difference_stack(const TemporalBlock& block, int n_terms);

/// Literal per-frame form: average over τ of each channel's truncated series
/// expanded at the block's first frame.
TaylorFrame taylor_frame_reference(const TemporalBlock& block, int n_terms);

/// Tensor form: the τ-mean of each Hadamard power is taken once and shared by
/// all three channels.
TaylorFrame taylor_frame_fast(const TemporalBlock& block, int n_terms);

TaylorFrame gray_augment(const TaylorFrame& frame, std::span<const double> gray);
TaylorFrame gray_augment(const TaylorFrame& frame, const Plane& gray);

/// Range-agnostic driver used by both the video and skeleton paths. Output
/// order and values do not depend on `opts.threads`.
std::vector<TaylorFrame> taylor_frames(const FrameStack& frames, const TaylorConfig& cfg,
                                       const ExecOptions& opts = {});

TaylorVideo taylor_video(const GrayVideo& video, const TaylorConfig& cfg, const ExecOptions& opts = {});

}  // namespace taylorvid
