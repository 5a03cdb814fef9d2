#include "taylorvid/video_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "taylorvid/error.hpp"

namespace taylorvid {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kTlvMagic{'T', 'L', 'V', '1'};
constexpr std::array<char, 4> kGrayMagic{'T', 'G', 'R', 'Y'};
constexpr std::size_t kGrayHeaderSize = 17;

// Little-endian byte writer/reader independent of host order.
class ByteWriter {
public:
  void put_bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void put_u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }
  const std::vector<char>& bytes() const noexcept { return buf_; }

private:
  std::vector<char> buf_;
};

class ByteReader {
public:
  explicit ByteReader(std::span<const char> bytes) : bytes_(bytes) {}

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes_[pos_++]); }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(u8()) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  void skip(std::size_t n) { pos_ += n; }

private:
  std::span<const char> bytes_;
  std::size_t pos_ = 0;
};

std::vector<char> slurp(std::istream& in) {
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void flush_bytes(std::ostream& out, const std::vector<char>& bytes) {
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed");
}

std::uint32_t to_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw Error(ErrorKind::InvalidInput, std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

bool is_image_file(const fs::path& p) {
  static constexpr std::array<std::string_view, 10> kExts{".png", ".jpg",  ".jpeg", ".bmp", ".tif",
                                                          ".tiff", ".pgm", ".ppm",  ".pnm", ".webp"};
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::find(kExts.begin(), kExts.end(), ext) != kExts.end();
}

RgbFrame decode_rgb(const fs::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR | cv::IMREAD_ANYDEPTH);
  if (bgr.empty()) throw Error(ErrorKind::DecodeError, "cannot decode " + path.string());
  double scale = 0.0;
  switch (bgr.depth()) {
    case CV_8U: scale = 1.0 / 255.0; break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    default: throw Error(ErrorKind::DecodeError, "unsupported sample depth in " + path.string());
  }
  cv::Mat converted;
  bgr.convertTo(converted, CV_64FC3, scale);

  RgbFrame frame;
  frame.height = static_cast<std::size_t>(converted.rows);
  frame.width = static_cast<std::size_t>(converted.cols);
  frame.rgb.resize(frame.height * frame.width * 3);
  for (int r = 0; r < converted.rows; ++r) {
    const auto* row = converted.ptr<cv::Vec3d>(r);
    for (int c = 0; c < converted.cols; ++c) {
      const std::size_t base = (static_cast<std::size_t>(r) * frame.width + static_cast<std::size_t>(c)) * 3;
      frame.rgb[base + 0] = row[c][2];
      frame.rgb[base + 1] = row[c][1];
      frame.rgb[base + 2] = row[c][0];
    }
  }
  return frame;
}

}  // namespace

double luma(double r, double g, double b) noexcept {
  if (r == g && g == b) return r;
  return std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0);
}

Plane rgb_to_gray(const RgbFrame& frame) {
  if (frame.rgb.size() != frame.height * frame.width * 3) {
    throw Error(ErrorKind::ShapeMismatch, "RGB frame buffer does not hold H*W*3 samples");
  }
  Plane gray(frame.height, frame.width);
  for (std::size_t p = 0; p < gray.size(); ++p) {
    gray.values[p] = luma(frame.rgb[3 * p], frame.rgb[3 * p + 1], frame.rgb[3 * p + 2]);
  }
  return gray;
}

GrayVideo read_image_sequence(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::IoError, dir.string() + " is not a readable directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw Error(ErrorKind::EmptyDirectory, "no images in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  std::optional<FrameStack> stack;
  for (const auto& file : files) {
    const Plane gray = rgb_to_gray(decode_rgb(file));
    if (!stack) {
      stack.emplace(0, gray.height, gray.width);
    } else if (gray.height != stack->height() || gray.width != stack->width()) {
      throw Error(ErrorKind::DimensionMismatch,
                  file.filename().string() + " is " + std::to_string(gray.height) + "x" + std::to_string(gray.width) +
                      ", expected " + std::to_string(stack->height()) + "x" + std::to_string(stack->width()));
    }
    stack->push_frame(gray.values);
  }
  return GrayVideo(std::move(*stack));
}

GrayVideo read_raw_gray(std::istream& in) {
  const std::vector<char> bytes = slurp(in);
  if (bytes.size() < 4 || !std::equal(kGrayMagic.begin(), kGrayMagic.end(), bytes.begin())) {
    throw Error(ErrorKind::BadMagic, "raw gray stream does not start with TGRY");
  }
  if (bytes.size() < kGrayHeaderSize) throw Error(ErrorKind::TruncatedPayload, "raw gray header is incomplete");
  ByteReader rd(bytes);
  rd.skip(4);
  const std::size_t height = rd.u32();
  const std::size_t width = rd.u32();
  const std::size_t frames = rd.u32();
  const std::uint8_t dtype = rd.u8();
  if (dtype > 1) throw Error(ErrorKind::UnsupportedDtype, "raw gray dtype code " + std::to_string(dtype));
  if (height == 0 || width == 0 || frames == 0) throw Error(ErrorKind::CorruptHeader, "raw gray has a zero dimension");

  const std::size_t count = height * width * frames;
  const std::size_t sample_size = dtype == 0 ? 1 : 4;
  if (rd.remaining() / sample_size < count) {
    throw Error(ErrorKind::TruncatedPayload, "raw gray payload holds " + std::to_string(rd.remaining() / sample_size) +
                                                 " samples, header claims " + std::to_string(count));
  }
  if (rd.remaining() != count * sample_size) throw Error(ErrorKind::CorruptHeader, "trailing bytes after raw gray payload");

  std::vector<double> data(count);
  for (auto& v : data) v = dtype == 0 ? static_cast<double>(rd.u8()) / 255.0 : static_cast<double>(rd.f32());
  return GrayVideo(FrameStack(frames, height, width, std::move(data)));
}

GrayVideo read_raw_gray(const fs::path& path) {
  auto in = open_in(path);
  return read_raw_gray(in);
}

void write_raw_gray(std::ostream& out, const GrayVideo& video, RawDtype dtype) {
  ByteWriter w;
  w.put_bytes(kGrayMagic.data(), kGrayMagic.size());
  w.put_u32(to_u32(video.height(), "height"));
  w.put_u32(to_u32(video.width(), "width"));
  w.put_u32(to_u32(video.frames(), "frame count"));
  w.put_u8(static_cast<std::uint8_t>(dtype));
  for (double v : video.stack().data()) {
    if (dtype == RawDtype::U8) {
      w.put_u8(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    } else {
      w.put_f32(static_cast<float>(v));
    }
  }
  flush_bytes(out, w.bytes());
}

void write_raw_gray(const fs::path& path, const GrayVideo& video, RawDtype dtype) {
  auto out = open_out(path);
  write_raw_gray(out, video, dtype);
}

void write_tlv(std::ostream& out, const TlvFile& file) {
  const TlvHeader& h = file.header;
  if (h.channels < 1 || h.channels > 3) throw Error(ErrorKind::InvalidInput, "TLV1 holds 1 to 3 channels");
  if (file.payload.size() != h.payload_values()) {
    throw Error(ErrorKind::ShapeMismatch, "payload has " + std::to_string(file.payload.size()) +
                                              " values, header implies " + std::to_string(h.payload_values()));
  }
  ByteWriter w;
  w.put_bytes(kTlvMagic.data(), kTlvMagic.size());
  w.put_u32(h.height);
  w.put_u32(h.width);
  w.put_u32(h.channels);
  w.put_u32(h.frames);
  w.put_u8(h.dtype);
  w.put_u8(h.flags);
  w.put_u16(0);
  w.put_u32(h.block_len);
  w.put_u32(h.n_terms);
  w.put_u32(h.step);
  for (float v : file.payload) w.put_f32(v);
  flush_bytes(out, w.bytes());
}

void write_tlv(const fs::path& path, const TlvFile& file) {
  auto out = open_out(path);
  write_tlv(out, file);
}

TlvFile read_tlv(std::istream& in) {
  const std::vector<char> bytes = slurp(in);
  if (bytes.size() < 4 || !std::equal(kTlvMagic.begin(), kTlvMagic.end(), bytes.begin())) {
    throw Error(ErrorKind::BadMagic, "file does not start with TLV1");
  }
  if (bytes.size() < kTlvHeaderSize) throw Error(ErrorKind::TruncatedPayload, "TLV1 header is incomplete");

  ByteReader rd(bytes);
  rd.skip(4);
  TlvFile file;
  TlvHeader& h = file.header;
  h.height = rd.u32();
  h.width = rd.u32();
  h.channels = rd.u32();
  h.frames = rd.u32();
  h.dtype = rd.u8();
  h.flags = rd.u8();
  const std::uint16_t reserved = rd.u16();
  h.block_len = rd.u32();
  h.n_terms = rd.u32();
  h.step = rd.u32();

  if (h.dtype != 0) throw Error(ErrorKind::UnsupportedDtype, "TLV1 dtype code " + std::to_string(h.dtype));
  if (h.channels < 1 || h.channels > 3) {
    throw Error(ErrorKind::CorruptHeader, "TLV1 channel count " + std::to_string(h.channels));
  }
  if (reserved != 0) throw Error(ErrorKind::CorruptHeader, "TLV1 reserved field is nonzero");

  const std::size_t expected = h.payload_values();
  const std::size_t available = rd.remaining() / sizeof(float);
  if (available < expected) {
    throw Error(ErrorKind::TruncatedPayload, "payload holds " + std::to_string(available) + " values, header claims " +
                                                 std::to_string(expected));
  }
  if (rd.remaining() != expected * sizeof(float)) throw Error(ErrorKind::CorruptHeader, "trailing bytes after payload");

  file.payload.resize(expected);
  for (auto& v : file.payload) v = rd.f32();
  return file;
}

TlvFile read_tlv(const fs::path& path) {
  auto in = open_in(path);
  return read_tlv(in);
}

TlvFile to_tlv(const TaylorVideo& tv) {
  TlvFile file;
  TlvHeader& h = file.header;
  h.height = to_u32(tv.height, "height");
  h.width = to_u32(tv.width, "width");
  h.channels = static_cast<std::uint32_t>(kNumChannels);
  h.frames = to_u32(tv.frames.size(), "frame count");
  h.flags = tv.config.gray_augment ? kTlvFlagGrayAugmented : 0;
  h.block_len = static_cast<std::uint32_t>(tv.config.block_len);
  h.n_terms = static_cast<std::uint32_t>(tv.config.n_terms);
  h.step = static_cast<std::uint32_t>(tv.config.step);

  file.payload.reserve(h.payload_values());
  for (const auto& frame : tv.frames) {
    if (frame.height != tv.height || frame.width != tv.width) {
      throw Error(ErrorKind::ShapeMismatch, "Taylor frame shape differs from video shape");
    }
    for (double v : frame.values) file.payload.push_back(static_cast<float>(v));
  }
  return file;
}

TaylorVideo from_tlv(const TlvFile& file) {
  const TlvHeader& h = file.header;
  if (h.channels != kNumChannels) {
    throw Error(ErrorKind::ShapeMismatch, "Taylor video needs 3 channels, file has " + std::to_string(h.channels));
  }
  TaylorVideo tv;
  tv.config.block_len = static_cast<int>(h.block_len);
  tv.config.n_terms = static_cast<int>(h.n_terms);
  tv.config.step = static_cast<int>(h.step);
  tv.config.gray_augment = (h.flags & kTlvFlagGrayAugmented) != 0;
  tv.height = h.height;
  tv.width = h.width;
  const std::size_t per_frame = kNumChannels * tv.height * tv.width;
  tv.frames.reserve(h.frames);
  for (std::size_t i = 0; i < h.frames; ++i) {
    TaylorFrame frame(tv.height, tv.width);
    for (std::size_t j = 0; j < per_frame; ++j) frame.values[j] = file.payload[i * per_frame + j];
    tv.frames.push_back(std::move(frame));
  }
  return tv;
}

void write_taylor(const TaylorVideo& tv, const fs::path& path) { write_tlv(path, to_tlv(tv)); }

TaylorVideo read_taylor(const fs::path& path) { return from_tlv(read_tlv(path)); }

}  // namespace taylorvid
