#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "taylorvid/analysis.hpp"
#include "taylorvid/error.hpp"
#include "taylorvid/render.hpp"
#include "taylorvid/skeleton.hpp"
#include "taylorvid/taylor.hpp"
#include "taylorvid/video_io.hpp"

namespace taylorvid::cli {

namespace fs = std::filesystem;

namespace {

struct ConvertArgs {
  std::string input;
  std::string output;
  int window = 4;
  int terms = 1;
  int step = 1;
  bool gray_augment = false;
  unsigned threads = 0;
};

struct VizArgs {
  std::string input;
  std::string outdir;
  std::string mode = "magnitude";
  double gain = kDefaultGain;
};

struct SkeletonArgs {
  std::string input;
  std::string output;
  int window = 4;
  int terms = 1;
  int step = 1;
  std::string channels = "d";
  bool normalized = false;
  bool raw = false;
  unsigned threads = 1;
};

struct BenchArgs {
  std::string input;
  std::string synthetic;
  std::size_t frames = 0;
  int window = 0;
  std::vector<int> terms{1};
  int step = 1;
  int repeats = 5;
  int warmup = 2;
  unsigned threads = 1;
  bool no_reference = false;
  std::string output;
  bool json = false;
  std::uint64_t seed = 7;
};

struct StatsArgs {
  std::string pairs;
  std::string output;
  bool json = false;
};

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}

GrayVideo load_video(const std::string& input) {
  std::error_code ec;
  if (fs::is_directory(input, ec)) return read_image_sequence(input);
  return read_raw_gray(fs::path(input));
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "write to " + path + " failed");
}

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  const TaylorConfig cfg{a.window, a.terms, a.step, a.gray_augment};
  cfg.validate();
  const GrayVideo video = load_video(a.input);
  const auto start = std::chrono::steady_clock::now();
  const TaylorVideo tv = taylor_video(video, cfg, ExecOptions{KernelPath::Fast, a.threads});
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_taylor(tv, a.output);
  out << "N=" << tv.size() << " H=" << tv.height << " W=" << tv.width << " C=3 T=" << cfg.block_len
      << " terms=" << cfg.n_terms << " step=" << cfg.step << " gray_augment=" << (cfg.gray_augment ? 1 : 0)
      << " input_frames=" << video.frames() << " elapsed_ms=" << fmt_double(elapsed) << " output=" << a.output
      << '\n';
  return kExitOk;
}

int cmd_viz(const VizArgs& a, std::ostream& out) {
  if (!(a.gain > 0.0)) throw Error(ErrorKind::InvalidGain, "gain must be positive, got " + fmt_double(a.gain));
  const RenderMode mode = a.mode == "signed" ? RenderMode::Signed : RenderMode::Magnitude;
  const TaylorVideo tv = read_taylor(a.input);
  const auto written = write_png_sequence(tv, a.outdir, mode, a.gain);
  out << "frames=" << written.size() << " H=" << tv.height << " W=" << tv.width << " mode=" << a.mode
      << " gain=" << fmt_double(a.gain) << " outdir=" << a.outdir << '\n';
  return kExitOk;
}

std::vector<Channel> parse_channels(const std::string& spec) {
  std::vector<Channel> channels;
  for (char c : spec) {
    Channel ch;
    switch (c) {
      case 'd': ch = Channel::Displacement; break;
      case 'v': ch = Channel::Velocity; break;
      case 'a': ch = Channel::Acceleration; break;
      case ',': continue;
      default: throw Error(ErrorKind::InvalidConfig, std::string("unknown channel '") + c + "', expected d, v or a");
    }
    if (std::find(channels.begin(), channels.end(), ch) != channels.end()) {
      throw Error(ErrorKind::InvalidConfig, std::string("channel '") + c + "' listed twice");
    }
    channels.push_back(ch);
  }
  if (channels.empty()) throw Error(ErrorKind::InvalidConfig, "no channels selected");
  return channels;
}

int cmd_skeleton(const SkeletonArgs& a, std::ostream& out) {
  SkeletonConfig cfg;
  cfg.block_len = a.window;
  cfg.n_terms = a.terms;
  cfg.step = a.step;
  cfg.channels = parse_channels(a.channels);
  cfg.scaling = a.normalized ? CoordinateScaling::Normalized : CoordinateScaling::Raw;
  TaylorConfig{cfg.block_len, cfg.n_terms, cfg.step, false}.validate();

  const bool to_tlv_file = fs::path(a.output).extension() == ".tlv";
  if (!to_tlv_file && cfg.channels.size() != 1) {
    throw Error(ErrorKind::InvalidConfig, "CSV output carries one channel; write a .tlv file for several");
  }
  const SkeletonSequence seq = read_skeleton_csv(fs::path(a.input));
  const TaylorSkeletonSequence tss = skeleton_taylor(seq, cfg, a.threads);
  if (to_tlv_file) {
    write_tlv(fs::path(a.output), to_tlv(tss));
  } else {
    write_skeleton_csv(fs::path(a.output), as_sequence(tss));
  }
  out << "N=" << tss.frames << " J=" << tss.joints << " C=" << tss.coords << " channels=" << tss.num_channels()
      << " T=" << cfg.block_len << " terms=" << cfg.n_terms << " step=" << cfg.step
      << " scaling=" << (a.normalized ? "normalized" : "raw") << " input_frames=" << seq.frames
      << " output=" << a.output << '\n';
  return kExitOk;
}

GrayVideo synthetic_video(const std::string& dims, std::size_t frames, std::uint64_t seed) {
  std::size_t h = 0, w = 0;
  char x = 0;
  std::istringstream ss(dims);
  if (!(ss >> h >> x >> w) || x != 'x' || h == 0 || w == 0 || !ss.eof()) {
    throw Error(ErrorKind::InvalidConfig, "--synthetic expects HxW, got '" + dims + "'");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> data(frames * h * w);
  for (auto& v : data) v = uniform(rng);
  return GrayVideo(FrameStack(frames, h, w, std::move(data)));
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const int max_terms = *std::max_element(a.terms.begin(), a.terms.end());
  const int window = a.window > 0 ? a.window : max_terms + 3;
  std::vector<TaylorConfig> configs;
  for (int k : a.terms) {
    TaylorConfig cfg{window, k, a.step, false};
    cfg.validate();
    configs.push_back(cfg);
  }
  BenchOptions opts;
  opts.repeats = a.repeats;
  opts.warmup = a.warmup;
  opts.include_reference = !a.no_reference;
  opts.parallel_threads = a.threads;
  if (opts.repeats < 3) throw Error(ErrorKind::InvalidConfig, "repeats must be at least 3, got " + std::to_string(a.repeats));

  const std::size_t frames = a.frames > 0 ? a.frames : static_cast<std::size_t>(window) + 99;
  const GrayVideo video = a.input.empty() ? synthetic_video(a.synthetic.empty() ? "240x320" : a.synthetic, frames, a.seed)
                                          : load_video(a.input);
  const TimingReport report = bench_taylor(video, configs, opts);
  const nlohmann::json doc = to_json(report);
  if (!a.output.empty()) write_json(a.output, doc);
  if (a.json) {
    out << doc.dump() << '\n';
    return kExitOk;
  }
  out << "entries=" << report.entries.size() << " H=" << video.height() << " W=" << video.width()
      << " input_frames=" << video.frames() << " T=" << window;
  for (const auto& e : report.entries) {
    for (const auto& t : e.timings) {
      out << ' ' << path_name(t.path) << (t.threads != 1 ? "_mt" : "") << "_k" << e.config.n_terms
          << "_ms_per_frame=" << fmt_double(t.ms_per_frame);
    }
  }
  out << '\n';
  return kExitOk;
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  const auto entries = read_manifest(fs::path(a.pairs));
  const auto pairs = measure_manifest(entries);
  const CompressionReport report = aggregate_report(pairs);
  const nlohmann::json doc = to_json(report);
  if (!a.output.empty()) write_json(a.output, doc);
  if (a.json) {
    out << doc.dump() << '\n';
    return kExitOk;
  }
  out << "items=" << report.items.size() << " actions=" << report.actions.size()
      << " total_before=" << report.total_before << " total_after=" << report.total_after
      << " aggregate_ratio=" << fmt_double(report.aggregate_ratio) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Taylor video toolkit: motion maps from frame differences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "taylorvid 1.0.0");

  ConvertArgs convert;
  auto* c = app.add_subcommand("convert", "Convert an image sequence or TGRY stream into a TLV1 Taylor video");
  c->add_option("--input", convert.input, "Directory of frames or TGRY file")->required();
  c->add_option("--output", convert.output, "Output TLV1 file")->required();
  c->add_option("--window", convert.window, "Frames per temporal block (T)")->capture_default_str();
  c->add_option("--terms", convert.terms, "Taylor terms per channel")->capture_default_str();
  c->add_option("--step", convert.step, "Sliding-window stride")->capture_default_str();
  c->add_flag("--gray-augment", convert.gray_augment, "Add each block's first gray frame to every channel");
  c->add_option("--threads", convert.threads, "Worker threads (0 = all cores, 1 = sequential)")->capture_default_str();

  VizArgs viz;
  auto* v = app.add_subcommand("viz", "Render a TLV1 Taylor video as PNG frames");
  v->add_option("--input", viz.input, "TLV1 file")->required();
  v->add_option("--outdir", viz.outdir, "Output directory")->required();
  v->add_option("--mode", viz.mode, "magnitude or signed")
      ->check(CLI::IsMember({"magnitude", "signed"}))
      ->capture_default_str();
  v->add_option("--gain", viz.gain, "Scale applied before clipping")->capture_default_str();

  SkeletonArgs skel;
  auto* s = app.add_subcommand("skeleton", "Convert a skeleton CSV into a Taylor skeleton sequence");
  s->add_option("--input", skel.input, "Skeleton CSV")->required();
  s->add_option("--output", skel.output, "Output .csv or .tlv")->required();
  s->add_option("--window", skel.window, "Frames per temporal block (T)")->capture_default_str();
  s->add_option("--terms", skel.terms, "Taylor terms")->capture_default_str();
  s->add_option("--step", skel.step, "Sliding-window stride")->capture_default_str();
  s->add_option("--channels", skel.channels, "Concepts to emit, subset of d,v,a")->capture_default_str();
  auto* norm = s->add_flag("--normalized", skel.normalized, "Rescale each coordinate axis to [0,1] first");
  auto* raw = s->add_flag("--raw", skel.raw, "Use coordinates as given (default)");
  norm->excludes(raw);
  s->add_option("--threads", skel.threads, "Worker threads")->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Time reference and fast kernels per Taylor frame");
  auto* b_in = b->add_option("--input", bench.input, "Directory of frames or TGRY file");
  auto* b_syn = b->add_option("--synthetic", bench.synthetic, "Random video of HxW pixels (default 240x320)");
  b_in->excludes(b_syn);
  b->add_option("--frames", bench.frames, "Synthetic frame count (default: window + 99)");
  b->add_option("--window", bench.window, "Frames per block (default: max terms + 3)");
  b->add_option("--terms", bench.terms, "Comma list of term counts")->delimiter(',')->capture_default_str();
  b->add_option("--step", bench.step, "Sliding-window stride")->capture_default_str();
  b->add_option("--repeats", bench.repeats, "Timed repeats (>= 3)")->capture_default_str();
  b->add_option("--warmup", bench.warmup, "Discarded warm-up runs")->capture_default_str();
  b->add_option("--threads", bench.threads, "Also time the fast path with this many workers")->capture_default_str();
  b->add_flag("--no-reference", bench.no_reference, "Skip the reference kernel");
  b->add_option("--seed", bench.seed, "Synthetic video seed")->capture_default_str();
  b->add_option("--output", bench.output, "Write the JSON report here");
  b->add_flag("--json", bench.json, "Print the JSON report instead of the summary line");

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "Compression ratios from a label,before,after manifest");
  st->add_option("--pairs", stats.pairs, "Manifest CSV")->required();
  st->add_option("--output", stats.output, "Write the JSON report here");
  st->add_flag("--json", stats.json, "Print the JSON report instead of the summary line");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (c->parsed()) return cmd_convert(convert, out);
    if (v->parsed()) return cmd_viz(viz, out);
    if (s->parsed()) return cmd_skeleton(skel, out);
    if (b->parsed()) return cmd_bench(bench, out);
    if (st->parsed()) return cmd_stats(stats, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_config_error(e.kind()) ? kExitConfig : kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitConfig;
}

}  // namespace taylorvid::cli
