#include "taylorvid/taylor.hpp"

#include <algorithm>
#include <string>
#include <thread>

#include "taylorvid/error.hpp"

namespace taylorvid {

namespace {

constexpr std::array<std::uint64_t, kMaxTerms + 1> make_factorials() {
  std::array<std::uint64_t, kMaxTerms + 1> table{};
  table[0] = 1;
  for (std::size_t k = 1; k < table.size(); ++k) table[k] = table[k - 1] * k;
  return table;
}

constexpr auto kFactorials = make_factorials();
static_assert(kFactorials[20] == 2432902008176640000ULL);

void check_terms(const TemporalBlock& block, int n_terms) {
  if (n_terms < 1 || n_terms > kMaxTerms) {
    throw Error(ErrorKind::InvalidConfig, "terms must be in [1, " + std::to_string(kMaxTerms) + "], got " +
                                              std::to_string(n_terms));
  }
  if (block.length() < static_cast<std::size_t>(n_terms) + 3) {
    throw Error(ErrorKind::InsufficientFrames, "block of " + std::to_string(block.length()) +
                                                   " frames cannot feed " + std::to_string(n_terms) +
                                                   " terms (needs " + std::to_string(n_terms + 3) + ")");
  }
}

// Elementwise x^k by repeated multiplication; x^0 is all ones.
std::vector<double> hadamard_pow(std::span<const double> x, int k) {
  std::vector<double> out(x.size(), 1.0);
  for (int i = 0; i < k; ++i) {
    for (std::size_t p = 0; p < x.size(); ++p) out[p] *= x[p];
  }
  return out;
}

// Pixels are processed in tiles so every inner loop runs over contiguous
// samples of one frame. Per-pixel arithmetic order is the same as a scalar loop.
constexpr std::size_t kTile = 128;

void fast_kernel(const TemporalBlock& block, int n_terms, TaylorFrame& out) {
  const std::size_t T = block.length();
  const std::size_t plane = block.plane_size();
  const std::size_t orders = static_cast<std::size_t>(n_terms) + 2;
  const std::size_t terms = static_cast<std::size_t>(n_terms);
  const auto data = block.data();
  const double inv_T = 1.0 / static_cast<double>(T);

  std::array<double, kMaxTerms> inv_fact{};
  for (std::size_t k = 0; k < terms; ++k) inv_fact[k] = 1.0 / static_cast<double>(kFactorials[k]);

  std::vector<double> samples(T * kTile);
  std::vector<double> work(T * kTile);
  std::vector<double> offsets(T * kTile);
  std::vector<double> powers(T * kTile);
  std::vector<double> diffs((orders + 1) * kTile);
  std::vector<double> means(terms * kTile);
  std::array<double, kTile> sum{};

  auto d_out = out.channel(Channel::Displacement);
  auto v_out = out.channel(Channel::Velocity);
  auto a_out = out.channel(Channel::Acceleration);

  for (std::size_t p0 = 0; p0 < plane; p0 += kTile) {
    const std::size_t n = std::min(kTile, plane - p0);
    for (std::size_t t = 0; t < T; ++t) {
      std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(t * plane + p0), n, samples.begin() + t * kTile);
    }

    // Difference pyramid; keep only the head of each order.
    std::copy(samples.begin(), samples.end(), work.begin());
    for (std::size_t j = 1; j <= orders; ++j) {
      for (std::size_t t = 0; t + j < T; ++t) {
        double* cur = work.data() + t * kTile;
        const double* next = cur + kTile;
        for (std::size_t i = 0; i < n; ++i) cur[i] = next[i] - cur[i];
      }
      std::copy_n(work.begin(), n, diffs.begin() + j * kTile);
    }

    // mean_tau (F_tau - F_1)^k for k = 0..n_terms-1.
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < n; ++i) offsets[t * kTile + i] = samples[t * kTile + i] - samples[i];
    }
    std::fill(powers.begin(), powers.end(), 1.0);
    for (std::size_t k = 0; k < terms; ++k) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) sum[i] += powers[t * kTile + i];
      }
      for (std::size_t i = 0; i < n; ++i) means[k * kTile + i] = sum[i] * inv_T;
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) powers[t * kTile + i] *= offsets[t * kTile + i];
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      double md = 0.0, mv = 0.0, ma = 0.0;
      for (std::size_t k = 0; k < terms; ++k) {
        const double m = means[k * kTile + i];
        md += diffs[(k + 1) * kTile + i] * inv_fact[k] * m;
        mv += diffs[(k + 2) * kTile + i] * inv_fact[k] * m;
        ma += diffs[(k + 3) * kTile + i] * inv_fact[k] * m;
      }
      d_out[p0 + i] = md;
      v_out[p0 + i] = mv;
      a_out[p0 + i] = ma;
    }
  }
}

TaylorFrame compute_frame(const TemporalBlock& block, int n_terms, KernelPath path) {
  return path == KernelPath::Reference ? taylor_frame_reference(block, n_terms) : taylor_frame_fast(block, n_terms);
}

}  // namespace

void TaylorConfig::validate() const {
  if (n_terms < 1) throw Error(ErrorKind::InvalidConfig, "terms must be at least 1, got " + std::to_string(n_terms));
  if (n_terms > kMaxTerms) {
    throw Error(ErrorKind::InvalidConfig,
                "terms is capped at " + std::to_string(kMaxTerms) + ", got " + std::to_string(n_terms));
  }
  if (block_len < kMinBlockLength) {
    throw Error(ErrorKind::InvalidConfig, "window must be at least " + std::to_string(kMinBlockLength) +
                                              " frames, got " + std::to_string(block_len));
  }
  if (step < 1) throw Error(ErrorKind::InvalidConfig, "step must be at least 1, got " + std::to_string(step));
  if (block_len < n_terms + 3) {
    const int most = max_terms_for(block_len);
    throw Error(ErrorKind::InvalidConfig, "window " + std::to_string(block_len) + " supports at most " +
                                              std::to_string(most) + (most == 1 ? " term" : " terms") +
                                              ", requested " + std::to_string(n_terms));
  }
}

const std::array<std::uint64_t, kMaxTerms + 1>& factorial_table() noexcept { return kFactorials; }

std::size_t taylor_frame_count(std::size_t frames, int block_len, int step) noexcept {
  if (block_len < 1 || step < 1 || frames < static_cast<std::size_t>(block_len)) return 0;
  return (frames - static_cast<std::size_t>(block_len)) / static_cast<std::size_t>(step) + 1;
}

std::vector<TemporalBlock> sliding_blocks(const FrameStack& frames, int block_len, int step) {
  if (block_len < kMinBlockLength) {
    throw Error(ErrorKind::InvalidConfig, "window must be at least " + std::to_string(kMinBlockLength) +
                                              " frames, got " + std::to_string(block_len));
  }
  if (step < 1) throw Error(ErrorKind::InvalidConfig, "step must be at least 1, got " + std::to_string(step));
  if (frames.frames() < static_cast<std::size_t>(block_len)) {
    throw Error(ErrorKind::VideoTooShort, "video has " + std::to_string(frames.frames()) +
                                              " frames, window needs " + std::to_string(block_len));
  }
  const std::size_t n = taylor_frame_count(frames.frames(), block_len, step);
  const std::size_t plane = frames.plane_size();
  const std::size_t len = static_cast<std::size_t>(block_len);
  std::vector<TemporalBlock> blocks;
  blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = i * static_cast<std::size_t>(step);
    blocks.emplace_back(frames.data().subspan(start * plane, len * plane), len, frames.height(), frames.width());
  }
  return blocks;
}

std::vector<TemporalBlock> sliding_blocks(const GrayVideo& video, int block_len, int step) {
  return sliding_blocks(video.stack(), block_len, step);
}

DifferenceStack difference_stack(const TemporalBlock& block, int n_terms) {
  check_terms(block, n_terms);
  const std::size_t T = block.length();
  const std::size_t plane = block.plane_size();
  const std::size_t orders = static_cast<std::size_t>(n_terms) + 2;

  std::vector<double> work(block.data().begin(), block.data().end());
  std::vector<Plane> maps;
  maps.reserve(orders);
  for (std::size_t j = 1; j <= orders; ++j) {
    for (std::size_t t = 0; t + j < T; ++t) {
      double* cur = work.data() + t * plane;
      const double* next = cur + plane;
      for (std::size_t p = 0; p < plane; ++p) cur[p] = next[p] - cur[p];
    }
    Plane head(block.height(), block.width());
    std::copy_n(work.begin(), plane, head.values.begin());
    maps.push_back(std::move(head));
  }
  return DifferenceStack(block.height(), block.width(), std::move(maps));
}

TaylorFrame taylor_frame_reference(const TemporalBlock& block, int n_terms) {
  const DifferenceStack diffs = difference_stack(block, n_terms);
  const std::size_t T = block.length();
  const std::size_t plane = block.plane_size();
  const auto first = block.frame(0);

  TaylorFrame out(block.height(), block.width());
  std::vector<double> offset(plane);
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    std::vector<double> total(plane, 0.0);
    for (std::size_t tau = 0; tau < T; ++tau) {
      const auto frame = block.frame(tau);
      for (std::size_t p = 0; p < plane; ++p) offset[p] = frame[p] - first[p];

      // f_c(F_tau) truncated to n_terms.
      std::vector<double> expansion(plane, 0.0);
      for (int k = 0; k < n_terms; ++k) {
        const Plane& derivative = diffs.order(static_cast<std::size_t>(k) + 1 + c);
        const double fact = static_cast<double>(kFactorials[k]);
        const std::vector<double> power = hadamard_pow(offset, k);
        for (std::size_t p = 0; p < plane; ++p) expansion[p] += derivative.values[p] / fact * power[p];
      }
      for (std::size_t p = 0; p < plane; ++p) total[p] += expansion[p];
    }
    auto dst = out.channel(static_cast<Channel>(c));
    for (std::size_t p = 0; p < plane; ++p) dst[p] = total[p] / static_cast<double>(T);
  }
  return out;
}

TaylorFrame taylor_frame_fast(const TemporalBlock& block, int n_terms) {
  check_terms(block, n_terms);
  TaylorFrame out(block.height(), block.width());
  fast_kernel(block, n_terms, out);
  return out;
}

TaylorFrame gray_augment(const TaylorFrame& frame, std::span<const double> gray) {
  if (gray.size() != frame.plane_size()) {
    throw Error(ErrorKind::ShapeMismatch, "gray plane has " + std::to_string(gray.size()) +
                                              " samples, frame plane has " + std::to_string(frame.plane_size()));
  }
  TaylorFrame out = frame;
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    auto dst = out.channel(static_cast<Channel>(c));
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += gray[p];
  }
  return out;
}

TaylorFrame gray_augment(const TaylorFrame& frame, const Plane& gray) {
  if (gray.height != frame.height || gray.width != frame.width) {
    throw Error(ErrorKind::ShapeMismatch, "gray plane is " + std::to_string(gray.height) + "x" +
                                              std::to_string(gray.width) + ", frame is " +
                                              std::to_string(frame.height) + "x" + std::to_string(frame.width));
  }
  return gray_augment(frame, std::span<const double>(gray.values));
}

std::vector<TaylorFrame> taylor_frames(const FrameStack& frames, const TaylorConfig& cfg, const ExecOptions& opts) {
  cfg.validate();
  const auto blocks = sliding_blocks(frames, cfg.block_len, cfg.step);
  std::vector<TaylorFrame> out(blocks.size());

  auto run = [&](std::size_t i) {
    TaylorFrame frame = compute_frame(blocks[i], cfg.n_terms, opts.path);
    if (cfg.gray_augment) frame = gray_augment(frame, blocks[i].frame(0));
    out[i] = std::move(frame);
  };

  unsigned workers = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) run(i);
    return out;
  }

  // Each worker owns a disjoint strided set of output slots.
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < blocks.size(); i += workers) run(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

TaylorVideo taylor_video(const GrayVideo& video, const TaylorConfig& cfg, const ExecOptions& opts) {
  TaylorVideo tv;
  tv.config = cfg;
  tv.height = video.height();
  tv.width = video.width();
  tv.frames = taylor_frames(video.stack(), cfg, opts);
  return tv;
}

}  // namespace taylorvid
