#include "taylorvid/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "taylorvid/error.hpp"

namespace taylorvid {

namespace fs = std::filesystem;

namespace {

void check_gain(double gain) {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw Error(ErrorKind::InvalidGain, "gain must be a positive finite number, got " + std::to_string(gain));
  }
}

}  // namespace

std::uint8_t encode_sample(double v, RenderMode mode, double gain) {
  if (mode == RenderMode::Magnitude) {
    const double level = std::clamp(std::abs(v) * gain, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * level));
  }
  const double level = std::clamp(v * gain, -1.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(127.5 * (level + 1.0)));
}

double decode_signed(std::uint8_t b, double gain) { return (static_cast<double>(b) / 127.5 - 1.0) / gain; }

RgbImage render_taylor_frame(const TaylorFrame& frame, RenderMode mode, double gain) {
  check_gain(gain);
  RgbImage img;
  img.height = frame.height;
  img.width = frame.width;
  img.bytes.resize(frame.plane_size() * 3);
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    const auto src = frame.channel(static_cast<Channel>(c));
    for (std::size_t p = 0; p < src.size(); ++p) {
      if (!std::isfinite(src[p])) throw Error(ErrorKind::InvalidInput, "Taylor frame holds a non-finite value");
      img.bytes[3 * p + c] = encode_sample(src[p], mode, gain);
    }
  }
  return img;
}

std::string frame_filename(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "taylor_%06zu.png", index);
  return name;
}

std::vector<fs::path> write_png_sequence(const TaylorVideo& tv, const fs::path& outdir, RenderMode mode,
                                         double gain) {
  check_gain(gain);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + outdir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  written.reserve(tv.frames.size());
  for (std::size_t i = 0; i < tv.frames.size(); ++i) {
    const RgbImage img = render_taylor_frame(tv.frames[i], mode, gain);
    cv::Mat bgr(static_cast<int>(img.height), static_cast<int>(img.width), CV_8UC3);
    for (std::size_t p = 0; p < img.height * img.width; ++p) {
      bgr.data[3 * p + 0] = img.bytes[3 * p + 2];
      bgr.data[3 * p + 1] = img.bytes[3 * p + 1];
      bgr.data[3 * p + 2] = img.bytes[3 * p + 0];
    }
    const fs::path path = outdir / frame_filename(i + 1);
    bool ok = false;
    try {
      ok = cv::imwrite(path.string(), bgr);
    } catch (const cv::Exception& e) {
      throw Error(ErrorKind::IoError, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace taylorvid
