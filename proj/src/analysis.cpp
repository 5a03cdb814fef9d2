#include "taylorvid/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "taylorvid/error.hpp"

namespace taylorvid {

namespace fs = std::filesystem;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

PathTiming time_path(const GrayVideo& video, const TaylorConfig& cfg, const ExecOptions& exec, const BenchOptions& opts,
                     std::size_t frames) {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < opts.warmup; ++i) (void)taylor_frames(video.stack(), cfg, exec);

  PathTiming timing;
  timing.path = exec.path;
  timing.threads = exec.threads;
  for (int i = 0; i < opts.repeats; ++i) {
    const auto start = clock::now();
    const auto out = taylor_frames(video.stack(), cfg, exec);
    const auto stop = clock::now();
    const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
    timing.samples_ms.push_back(ms / static_cast<double>(frames));
  }
  timing.ms_per_frame = median(timing.samples_ms);
  std::vector<double> dev;
  for (double s : timing.samples_ms) dev.push_back(std::abs(s - timing.ms_per_frame));
  timing.mad_ms = median(std::move(dev));
  return timing;
}

}  // namespace

double compression_ratio(std::uint64_t before_bytes, std::uint64_t after_bytes) {
  if (after_bytes == 0) throw Error(ErrorKind::InvalidInput, "compressed size is zero");
  return static_cast<double>(before_bytes) / static_cast<double>(after_bytes);
}

std::string action_of(const std::string& label) {
  const fs::path parent = fs::path(label).parent_path();
  return parent.empty() ? label : parent.filename().string();
}

CompressionReport aggregate_report(std::span<const SizePair> items) {
  if (items.empty()) throw Error(ErrorKind::EmptyInput, "no items to aggregate");
  CompressionReport report;
  std::map<std::string, std::vector<double>> by_action;
  for (const auto& item : items) {
    CompressionItem row{item.label, action_of(item.label), item.before, item.after,
                        compression_ratio(item.before, item.after)};
    report.total_before += item.before;
    report.total_after += item.after;
    by_action[row.action].push_back(row.ratio);
    report.items.push_back(std::move(row));
  }
  report.aggregate_ratio = compression_ratio(report.total_before, report.total_after);
  for (const auto& [action, ratios] : by_action) {
    ActionSummary s;
    s.action = action;
    s.count = ratios.size();
    s.min_ratio = *std::min_element(ratios.begin(), ratios.end());
    s.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    double sum = 0.0;
    for (double r : ratios) sum += r;
    s.mean_ratio = sum / static_cast<double>(ratios.size());
    report.actions.push_back(std::move(s));
  }
  return report;
}

std::uint64_t artifact_size(const fs::path& path) {
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return fs::file_size(path);
  if (!fs::is_directory(path, ec)) throw Error(ErrorKind::IoError, "cannot stat " + path.string());
  std::uint64_t total = 0;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (entry.is_regular_file()) total += entry.file_size();
  }
  return total;
}

std::vector<ManifestEntry> read_manifest(std::istream& in, const fs::path& base_dir) {
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) {
      throw Error(ErrorKind::ParseError, "manifest line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected 3");
    }
    if (entries.empty() && fields[0] == "label" && fields[1] == "before" && fields[2] == "after") continue;
    auto resolve = [&](const std::string& p) {
      fs::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    entries.push_back({fields[0], resolve(fields[1]), resolve(fields[2])});
  }
  if (entries.empty()) throw Error(ErrorKind::EmptyInput, "manifest lists no items");
  return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for reading");
  return read_manifest(in, path.parent_path());
}

std::vector<SizePair> measure_manifest(std::span<const ManifestEntry> entries) {
  std::vector<SizePair> pairs;
  pairs.reserve(entries.size());
  for (const auto& e : entries) pairs.push_back({e.label, artifact_size(e.before), artifact_size(e.after)});
  return pairs;
}

nlohmann::json to_json(const CompressionReport& report) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : report.items) {
    items.push_back({{"label", item.label},
                     {"action", item.action},
                     {"before_bytes", item.before},
                     {"after_bytes", item.after},
                     {"ratio", item.ratio}});
  }
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : report.actions) {
    actions.push_back({{"action", a.action},
                       {"count", a.count},
                       {"min_ratio", a.min_ratio},
                       {"max_ratio", a.max_ratio},
                       {"mean_ratio", a.mean_ratio}});
  }
  return {{"items", items},
          {"total_before_bytes", report.total_before},
          {"total_after_bytes", report.total_after},
          {"aggregate_ratio", report.aggregate_ratio},
          {"actions", actions}};
}

const PathTiming* TimingEntry::find(KernelPath path, unsigned threads) const {
  for (const auto& t : timings) {
    if (t.path == path && t.threads == threads) return &t;
  }
  return nullptr;
}

std::string_view path_name(KernelPath path) noexcept { return path == KernelPath::Reference ? "reference" : "fast"; }

TimingReport bench_taylor(const GrayVideo& video, std::span<const TaylorConfig> configs, const BenchOptions& opts) {
  if (opts.repeats < 3) {
    throw Error(ErrorKind::InvalidConfig, "repeats must be at least 3, got " + std::to_string(opts.repeats));
  }
  if (opts.warmup < 0) throw Error(ErrorKind::InvalidConfig, "warm-up count must be nonnegative");
  if (configs.empty()) throw Error(ErrorKind::EmptyInput, "no configurations to benchmark");
  for (const auto& cfg : configs) {
    cfg.validate();
    if (video.frames() < static_cast<std::size_t>(cfg.block_len)) {
      throw Error(ErrorKind::VideoTooShort, "video has " + std::to_string(video.frames()) + " frames, window needs " +
                                                std::to_string(cfg.block_len));
    }
  }

  TimingReport report;
  for (const auto& cfg : configs) {
    TimingEntry entry;
    entry.config = cfg;
    entry.height = video.height();
    entry.width = video.width();
    entry.frames = taylor_frame_count(video.frames(), cfg.block_len, cfg.step);
    if (opts.include_reference) {
      entry.timings.push_back(time_path(video, cfg, {KernelPath::Reference, 1}, opts, entry.frames));
    }
    entry.timings.push_back(time_path(video, cfg, {KernelPath::Fast, 1}, opts, entry.frames));
    if (opts.parallel_threads != 1) {
      entry.timings.push_back(time_path(video, cfg, {KernelPath::Fast, opts.parallel_threads}, opts, entry.frames));
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

nlohmann::json to_json(const TimingReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json timings = nlohmann::json::array();
    for (const auto& t : e.timings) {
      timings.push_back({{"path", path_name(t.path)},
                         {"threads", t.threads},
                         {"ms_per_frame", t.ms_per_frame},
                         {"mad_ms", t.mad_ms},
                         {"samples", t.samples_ms.size()}});
    }
    entries.push_back({{"n_terms", e.config.n_terms},
                       {"T", e.config.block_len},
                       {"step", e.config.step},
                       {"H", e.height},
                       {"W", e.width},
                       {"frames", e.frames},
                       {"timings", timings}});
  }
  return {{"entries", entries}};
}

}  // namespace taylorvid
