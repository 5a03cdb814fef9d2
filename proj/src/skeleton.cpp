#include "taylorvid/skeleton.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "taylorvid/error.hpp"

namespace taylorvid {

namespace fs = std::filesystem;

namespace {

std::vector<double> rescale_axes(const SkeletonSequence& seq) {
  std::vector<double> out = seq.values;
  for (std::size_t c = 0; c < seq.coords; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = c; i < out.size(); i += seq.coords) {
      lo = std::min(lo, out[i]);
      hi = std::max(hi, out[i]);
    }
    const double range = hi - lo;
    for (std::size_t i = c; i < out.size(); i += seq.coords) out[i] = range > 0.0 ? (out[i] - lo) / range : 0.0;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename Number>
Number parse_number(std::string_view field, std::size_t line_no) {
  Number v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "' as a number");
  }
  return v;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void SkeletonSequence::validate() const {
  if (joints == 0 || coords == 0) throw Error(ErrorKind::InvalidInput, "skeleton needs at least one joint and coordinate");
  if (values.size() != frames * frame_size()) {
    throw Error(ErrorKind::ShapeMismatch, "skeleton holds " + std::to_string(values.size()) + " coordinates, expected " +
                                              std::to_string(frames * frame_size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "skeleton coordinate is not finite");
  }
  if (confidence) {
    if (confidence->size() != frames * joints) {
      throw Error(ErrorKind::ShapeMismatch, "confidence holds " + std::to_string(confidence->size()) +
                                                " values, expected " + std::to_string(frames * joints));
    }
    for (double v : *confidence) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidInput, "confidence outside [0,1]");
    }
  }
}

TaylorSkeletonSequence skeleton_taylor(const SkeletonSequence& seq, const SkeletonConfig& cfg, unsigned threads) {
  seq.validate();
  if (cfg.channels.empty() || cfg.channels.size() > kNumChannels) {
    throw Error(ErrorKind::InvalidConfig, "skeleton output needs 1 to 3 channels");
  }
  const TaylorConfig core{cfg.block_len, cfg.n_terms, cfg.step, false};
  core.validate();
  if (seq.frames < static_cast<std::size_t>(cfg.block_len)) {
    throw Error(ErrorKind::SequenceTooShort, "sequence has " + std::to_string(seq.frames) + " frames, window needs " +
                                                 std::to_string(cfg.block_len));
  }

  // Each (joint, coord) trajectory is one pixel of a J×C "video".
  FrameStack stack(seq.frames, seq.joints, seq.coords,
                   cfg.scaling == CoordinateScaling::Normalized ? rescale_axes(seq) : seq.values);
  const auto frames = taylor_frames(stack, core, ExecOptions{KernelPath::Fast, threads});

  TaylorSkeletonSequence out;
  out.config = cfg;
  out.joints = seq.joints;
  out.coords = seq.coords;
  out.frames = frames.size();
  out.values.reserve(out.frames * cfg.channels.size() * seq.frame_size());
  for (const auto& frame : frames) {
    for (Channel ch : cfg.channels) {
      const auto plane = frame.channel(ch);
      out.values.insert(out.values.end(), plane.begin(), plane.end());
    }
  }
  if (seq.confidence) {
    std::vector<double> conf;
    conf.reserve(out.frames * seq.joints);
    for (std::size_t i = 0; i < out.frames; ++i) {
      const std::size_t start = i * static_cast<std::size_t>(cfg.step);
      const auto first = seq.confidence->begin() + static_cast<std::ptrdiff_t>(start * seq.joints);
      conf.insert(conf.end(), first, first + static_cast<std::ptrdiff_t>(seq.joints));
    }
    out.confidence = std::move(conf);
  }
  return out;
}

SkeletonSequence as_sequence(const TaylorSkeletonSequence& tss) {
  if (tss.num_channels() != 1) {
    throw Error(ErrorKind::InvalidConfig, "CSV output carries one channel; use TLV1 for " +
                                              std::to_string(tss.num_channels()) + " channels");
  }
  SkeletonSequence seq;
  seq.joints = tss.joints;
  seq.coords = tss.coords;
  seq.frames = tss.frames;
  seq.values = tss.values;
  seq.confidence = tss.confidence;
  return seq;
}

TlvFile to_tlv(const TaylorSkeletonSequence& tss) {
  TlvFile file;
  file.header.height = static_cast<std::uint32_t>(tss.joints);
  file.header.width = static_cast<std::uint32_t>(tss.coords);
  file.header.channels = static_cast<std::uint32_t>(tss.num_channels());
  file.header.frames = static_cast<std::uint32_t>(tss.frames);
  file.header.block_len = static_cast<std::uint32_t>(tss.config.block_len);
  file.header.n_terms = static_cast<std::uint32_t>(tss.config.n_terms);
  file.header.step = static_cast<std::uint32_t>(tss.config.step);
  file.payload.assign(tss.values.begin(), tss.values.end());
  return file;
}

SkeletonSequence read_skeleton_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "skeleton CSV is empty");
  ++line_no;

  SkeletonSequence seq;
  bool has_conf = false;
  bool have_j = false, have_c = false;
  for (std::string_view field : split_commas(trim(line))) {
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, "header field '" + std::string(field) + "' lacks '='");
    const std::string_view key = trim(field.substr(0, eq));
    const std::string_view val = trim(field.substr(eq + 1));
    if (key == "J") {
      seq.joints = parse_number<std::size_t>(val, line_no);
      have_j = true;
    } else if (key == "C") {
      seq.coords = parse_number<std::size_t>(val, line_no);
      have_c = true;
    } else if (key == "CONF") {
      has_conf = parse_number<int>(val, line_no) != 0;
    } else {
      throw Error(ErrorKind::ParseError, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!have_j || !have_c || seq.joints == 0 || seq.coords == 0) {
    throw Error(ErrorKind::ParseError, "header must declare positive J and C");
  }

  const std::size_t n_coords = seq.frame_size();
  const std::size_t per_line = n_coords + (has_conf ? seq.joints : 0);
  std::vector<double> conf;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_commas(body);
    if (fields.size() != per_line) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                             " values, expected " + std::to_string(per_line));
    }
    for (std::size_t i = 0; i < n_coords; ++i) seq.values.push_back(parse_number<double>(fields[i], line_no));
    for (std::size_t i = n_coords; i < per_line; ++i) conf.push_back(parse_number<double>(fields[i], line_no));
    ++seq.frames;
  }
  if (has_conf) seq.confidence = std::move(conf);
  seq.validate();
  return seq;
}

SkeletonSequence read_skeleton_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for reading");
  return read_skeleton_csv(in);
}

void write_skeleton_csv(std::ostream& out, const SkeletonSequence& seq) {
  seq.validate();
  std::string text = "J=" + std::to_string(seq.joints) + ",C=" + std::to_string(seq.coords);
  if (seq.confidence) text += ",CONF=1";
  text += '\n';
  for (std::size_t t = 0; t < seq.frames; ++t) {
    const auto coords = seq.frame(t);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (i) text += ',';
      append_number(text, coords[i]);
    }
    if (seq.confidence) {
      for (std::size_t j = 0; j < seq.joints; ++j) {
        text += ',';
        append_number(text, (*seq.confidence)[t * seq.joints + j]);
      }
    }
    text += '\n';
  }
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed");
}

void write_skeleton_csv(const fs::path& path, const SkeletonSequence& seq) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  write_skeleton_csv(out, seq);
}

}  // namespace taylorvid
