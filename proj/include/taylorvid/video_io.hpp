#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "taylorvid/frames.hpp"
#include "taylorvid/taylor.hpp"

namespace taylorvid {

/// Interleaved H×W×3 (R, G, B) samples in [0,1].
struct RgbFrame {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> rgb;
};

/// BT.601 luma. Gray input (R = G = B) maps to itself exactly.
double luma(double r, double g, double b) noexcept;
Plane rgb_to_gray(const RgbFrame& frame);

/// Decodes every image in `dir` (sorted by filename) and converts to gray.
GrayVideo read_image_sequence(const std::filesystem::path& dir);

// --- TGRY raw gray stream -------------------------------------------------

enum class RawDtype : std::uint8_t { U8 = 0, F32 = 1 };

GrayVideo read_raw_gray(std::istream& in);
GrayVideo read_raw_gray(const std::filesystem::path& path);
void write_raw_gray(std::ostream& out, const GrayVideo& video, RawDtype dtype);
void write_raw_gray(const std::filesystem::path& path, const GrayVideo& video, RawDtype dtype);

// --- TLV1 Taylor tensor file ----------------------------------------------

inline constexpr std::size_t kTlvHeaderSize = 36;
inline constexpr std::uint8_t kTlvFlagGrayAugmented = 0x01;

struct TlvHeader {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 3;
  std::uint32_t frames = 0;
  std::uint8_t dtype = 0;
  std::uint8_t flags = 0;
  std::uint32_t block_len = 0;
  std::uint32_t n_terms = 0;
  std::uint32_t step = 0;

  std::size_t payload_values() const noexcept {
    return static_cast<std::size_t>(frames) * channels * height * width;
  }
  friend bool operator==(const TlvHeader&, const TlvHeader&) = default;
};

/// Header plus f32 payload in [frame][channel][row][col] order.
struct TlvFile {
  TlvHeader header;
  std::vector<float> payload;
};

void write_tlv(std::ostream& out, const TlvFile& file);
void write_tlv(const std::filesystem::path& path, const TlvFile& file);
TlvFile read_tlv(std::istream& in);
TlvFile read_tlv(const std::filesystem::path& path);

TlvFile to_tlv(const TaylorVideo& tv);
/// Requires 3 channels. Values are widened from the stored f32.
TaylorVideo from_tlv(const TlvFile& file);

void write_taylor(const TaylorVideo& tv, const std::filesystem::path& path);
TaylorVideo read_taylor(const std::filesystem::path& path);

}  // namespace taylorvid
