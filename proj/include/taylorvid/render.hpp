#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "taylorvid/taylor.hpp"

namespace taylorvid {

enum class RenderMode { Magnitude, Signed };

inline constexpr double kDefaultGain = 4.0;

/// Interleaved H×W×3 bytes: displacement→R, velocity→G, acceleration→B.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> bytes;
};

/// magnitude: round(255·clip(|v|·gain, 0, 1)).
/// signed:    round(127.5·(clip(v·gain, -1, 1) + 1)), so 0 lands on 128.
std::uint8_t encode_sample(double v, RenderMode mode, double gain);
/// Inverse of the signed encoding.
double decode_signed(std::uint8_t b, double gain);

RgbImage render_taylor_frame(const TaylorFrame& frame, RenderMode mode, double gain);

std::string frame_filename(std::size_t index);

/// Writes `taylor_%06d.png` (1-based) for every frame; returns the paths.
std::vector<std::filesystem::path> write_png_sequence(const TaylorVideo& tv, const std::filesystem::path& outdir,
                                                      RenderMode mode, double gain);

}  // namespace taylorvid
