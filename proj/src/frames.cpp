#include "taylorvid/frames.hpp"

#include <cmath>
#include <string>

#include "taylorvid/error.hpp"

namespace taylorvid {

FrameStack::FrameStack(std::size_t frames, std::size_t height, std::size_t width)
    : frames_(frames), height_(height), width_(width), data_(frames * height * width, 0.0) {
  if (height == 0 || width == 0) throw Error(ErrorKind::InvalidInput, "frame dimensions must be positive");
}

FrameStack::FrameStack(std::size_t frames, std::size_t height, std::size_t width, std::vector<double> data)
    : frames_(frames), height_(height), width_(width), data_(std::move(data)) {
  if (height == 0 || width == 0) throw Error(ErrorKind::InvalidInput, "frame dimensions must be positive");
  if (data_.size() != frames * height * width) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(frames * height * width) +
                                              " samples, got " + std::to_string(data_.size()));
  }
}

std::span<const double> FrameStack::frame(std::size_t t) const {
  return std::span<const double>(data_).subspan(t * plane_size(), plane_size());
}

std::span<double> FrameStack::frame(std::size_t t) {
  return std::span<double>(data_).subspan(t * plane_size(), plane_size());
}

void FrameStack::push_frame(std::span<const double> plane) {
  if (plane.size() != plane_size()) {
    throw Error(ErrorKind::ShapeMismatch, "frame has " + std::to_string(plane.size()) + " samples, expected " +
                                              std::to_string(plane_size()));
  }
  data_.insert(data_.end(), plane.begin(), plane.end());
  ++frames_;
}

GrayVideo::GrayVideo(FrameStack frames) : stack_(std::move(frames)) {
  if (stack_.frames() == 0) throw Error(ErrorKind::InvalidInput, "video has no frames");
  const auto data = stack_.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = data[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorKind::InvalidInput,
                  "gray sample " + std::to_string(i) + " is " + std::to_string(v) + ", outside [0,1]");
    }
  }
}

TemporalBlock::TemporalBlock(std::span<const double> data, std::size_t length, std::size_t height,
                             std::size_t width)
    : data_(data), length_(length), height_(height), width_(width) {
  if (data.size() != length * height * width) throw Error(ErrorKind::ShapeMismatch, "block view size mismatch");
}

}  // namespace taylorvid
