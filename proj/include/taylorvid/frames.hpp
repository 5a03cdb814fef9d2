#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace taylorvid {

/// A single H×W plane of doubles stored row-major.
struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), values(h * w, fill) {}

  std::size_t size() const noexcept { return values.size(); }
  double& at(std::size_t row, std::size_t col) { return values[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
};

/// Frame-major stack of H×W planes of doubles. No range restriction; the
/// kernel runs on this so that skeleton trajectories and gray videos share it.
class FrameStack {
public:
  FrameStack() = default;
  FrameStack(std::size_t frames, std::size_t height, std::size_t width);
  FrameStack(std::size_t frames, std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }

  std::span<const double> frame(std::size_t t) const;
  std::span<double> frame(std::size_t t);
  std::span<const double> data() const noexcept { return data_; }

  void push_frame(std::span<const double> plane);

private:
  std::size_t frames_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

/// Grayscale video with every intensity finite and in [0,1].
class GrayVideo {
public:
  /// Throws InvalidInput if any sample is outside [0,1] or non-finite, or if
  /// the stack is empty.
  explicit GrayVideo(FrameStack frames);

  std::size_t frames() const noexcept { return stack_.frames(); }
  std::size_t height() const noexcept { return stack_.height(); }
  std::size_t width() const noexcept { return stack_.width(); }
  std::span<const double> frame(std::size_t t) const { return stack_.frame(t); }
  const FrameStack& stack() const noexcept { return stack_; }

private:
  FrameStack stack_;
};

/// Non-owning view of T consecutive frames of a FrameStack.
class TemporalBlock {
public:
  TemporalBlock(std::span<const double> data, std::size_t length, std::size_t height, std::size_t width);

  std::size_t length() const noexcept { return length_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }
  std::span<const double> frame(std::size_t t) const { return data_.subspan(t * plane_size(), plane_size()); }
  std::span<const double> data() const noexcept { return data_; }

private:
  std::span<const double> data_;
  std::size_t length_;
  std::size_t height_;
  std::size_t width_;
};

}  // namespace taylorvid
