#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle.hpp"
#include "taylorvid/error.hpp"
#include "taylorvid/taylor.hpp"

using namespace taylorvid;

namespace {

FrameStack trajectory_stack(std::vector<double> values) {
  const std::size_t n = values.size();
  return FrameStack(n, 1, 1, std::move(values));
}

TemporalBlock whole(const FrameStack& s) { return TemporalBlock(s.data(), s.frames(), s.height(), s.width()); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoError;
}

double max_abs_diff(const TaylorFrame& a, const TaylorFrame& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// Block F_tau = F_1 + (tau-1) * C.
FrameStack ramp_stack(std::mt19937_64& rng, std::size_t T, std::size_t h, std::size_t w, std::vector<double>& slope) {
  std::uniform_real_distribution<double> base(0.0, 0.5);
  std::uniform_real_distribution<double> rate(-0.05, 0.05);
  std::vector<double> first(h * w);
  slope.assign(h * w, 0.0);
  for (std::size_t p = 0; p < h * w; ++p) {
    first[p] = base(rng) + 0.25;
    slope[p] = rate(rng);
  }
  FrameStack s(T, h, w);
  for (std::size_t t = 0; t < T; ++t) {
    auto f = s.frame(t);
    for (std::size_t p = 0; p < h * w; ++p) f[p] = first[p] + static_cast<double>(t) * slope[p];
  }
  return s;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("factorials are exact up to 20") {
    const auto& f = factorial_table();
    CHECK(f[0] == 1);
    CHECK(f[1] == 1);
    CHECK(f[5] == 120);
    CHECK(f[20] == 2432902008176640000ULL);
  }

  TEST_CASE("window must cover terms plus three") {
    CHECK_NOTHROW(TaylorConfig{4, 1, 1, false}.validate());
    CHECK_NOTHROW(TaylorConfig{10, 7, 1, false}.validate());
    CHECK(kind_of([] { TaylorConfig{4, 2, 1, false}.validate(); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { TaylorConfig{3, 1, 1, false}.validate(); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { TaylorConfig{4, 0, 1, false}.validate(); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { TaylorConfig{4, 1, 0, false}.validate(); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { TaylorConfig{30, 21, 1, false}.validate(); }) == ErrorKind::InvalidConfig);
  }

  TEST_CASE("constraint message names the supported term count") {
    try {
      TaylorConfig{5, 3, 1, false}.validate();
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("window 5 supports at most 2 terms") != std::string::npos);
    }
  }

  TEST_CASE("frame count law") {
    CHECK(taylor_frame_count(19, 4, 1) == 16);
    CHECK(taylor_frame_count(20, 5, 1) == 16);
    CHECK(taylor_frame_count(4, 4, 1) == 1);
    CHECK(taylor_frame_count(10, 4, 3) == 3);
    CHECK(taylor_frame_count(3, 4, 1) == 0);
  }
}

TEST_SUITE("sliding_blocks") {
  TEST_CASE("counts match the frame count law") {
    CHECK(sliding_blocks(FrameStack(19, 2, 3), 4, 1).size() == 16);
    CHECK(sliding_blocks(FrameStack(20, 2, 3), 5, 1).size() == 16);
  }

  TEST_CASE("a window equal to the video yields one block holding everything") {
    const FrameStack s = trajectory_stack({0.0, 0.1, 0.3, 0.6});
    const auto blocks = sliding_blocks(s, 4, 1);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].data().data() == s.data().data());
    CHECK(blocks[0].length() == 4);
  }

  TEST_CASE("block i starts at frame i*step and trailing frames are dropped") {
    std::vector<double> v(11);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) / 10.0;
    const FrameStack s = trajectory_stack(v);
    const auto blocks = sliding_blocks(s, 4, 3);
    REQUIRE(blocks.size() == 3);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (std::size_t t = 0; t < 4; ++t) CHECK(blocks[i].frame(t)[0] == v[3 * i + t]);
    }
  }

  TEST_CASE("errors") {
    CHECK(kind_of([] { sliding_blocks(FrameStack(3, 1, 1), 4, 1); }) == ErrorKind::VideoTooShort);
    CHECK(kind_of([] { sliding_blocks(FrameStack(10, 1, 1), 3, 1); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { sliding_blocks(FrameStack(10, 1, 1), 4, 0); }) == ErrorKind::InvalidConfig);
  }
}

TEST_SUITE("difference_stack") {
  TEST_CASE("four-frame fixture") {
    const FrameStack s = trajectory_stack({0.0, 0.1, 0.3, 0.6});
    const auto d = difference_stack(whole(s), 1);
    REQUIRE(d.orders() == 3);
    CHECK(d.order(1).values[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.order(2).values[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::abs(d.order(3).values[0]) < 1e-12);
  }

  TEST_CASE("five-frame fixture with two terms") {
    const FrameStack s = trajectory_stack({0.0, 0.1, 0.3, 0.6, 1.0});
    const auto d = difference_stack(whole(s), 2);
    REQUIRE(d.orders() == 4);
    CHECK(std::abs(d.order(1).values[0] - 0.1) < 1e-12);
    CHECK(std::abs(d.order(2).values[0] - 0.1) < 1e-12);
    CHECK(std::abs(d.order(3).values[0]) < 1e-12);
    CHECK(std::abs(d.order(4).values[0]) < 1e-12);
  }

  TEST_CASE("constant block has all-zero maps") {
    const FrameStack s = trajectory_stack({0.4, 0.4, 0.4, 0.4});
    const auto d = difference_stack(whole(s), 1);
    for (std::size_t j = 1; j <= 3; ++j) CHECK(d.order(j).values[0] == 0.0);
  }

  TEST_CASE("first order is F2 - F1 and higher orders match the binomial form") {
    std::mt19937_64 rng(11);
    const FrameStack s = oracle::random_stack(rng, 9, 4, 5);
    const auto d = difference_stack(whole(s), 6);
    REQUIRE(d.orders() == 8);
    for (std::size_t p = 0; p < s.plane_size(); ++p) {
      CHECK(d.order(1).values[p] == s.frame(1)[p] - s.frame(0)[p]);
      const auto traj = oracle::trajectory(s, 0, 9, p);
      for (int j = 1; j <= 8; ++j) {
        CHECK(std::abs(d.order(static_cast<std::size_t>(j)).values[p] -
                       static_cast<double>(oracle::forward_difference(traj, j))) < 1e-12);
      }
    }
  }

  TEST_CASE("too few frames") {
    const FrameStack s = trajectory_stack({0.0, 0.1, 0.3, 0.6});
    CHECK(kind_of([&] { difference_stack(whole(s), 2); }) == ErrorKind::InsufficientFrames);
  }
}

TEST_SUITE("taylor_frame") {
  TEST_CASE("oracle reproduces the hand-derived fixtures") {
    const auto four = oracle::taylor_pixel({0.0L, 0.1L, 0.3L, 0.6L}, 1);
    CHECK(std::abs(static_cast<double>(four[0]) - 0.1) < 1e-15);
    CHECK(std::abs(static_cast<double>(four[1]) - 0.1) < 1e-15);
    CHECK(std::abs(static_cast<double>(four[2])) < 1e-15);
    const auto five = oracle::taylor_pixel({0.0L, 0.1L, 0.3L, 0.6L, 1.0L}, 2);
    CHECK(std::abs(static_cast<double>(five[0]) - 0.14) < 1e-15);
    CHECK(std::abs(static_cast<double>(five[1]) - 0.1) < 1e-15);
    CHECK(std::abs(static_cast<double>(five[2])) < 1e-15);
  }

  TEST_CASE("four-frame fixture on both paths") {
    const FrameStack s = trajectory_stack({0.0, 0.1, 0.3, 0.6});
    for (const auto& f : {taylor_frame_reference(whole(s), 1), taylor_frame_fast(whole(s), 1)}) {
      CHECK(std::abs(f.at(Channel::Displacement, 0, 0) - 0.1) < 1e-12);
      CHECK(std::abs(f.at(Channel::Velocity, 0, 0) - 0.1) < 1e-12);
      CHECK(std::abs(f.at(Channel::Acceleration, 0, 0)) < 1e-12);
    }
  }

  TEST_CASE("five-frame two-term fixture on both paths") {
    const FrameStack s = trajectory_stack({0.0, 0.1, 0.3, 0.6, 1.0});
    for (const auto& f : {taylor_frame_reference(whole(s), 2), taylor_frame_fast(whole(s), 2)}) {
      CHECK(std::abs(f.at(Channel::Displacement, 0, 0) - 0.14) < 1e-12);
      CHECK(std::abs(f.at(Channel::Velocity, 0, 0) - 0.1) < 1e-12);
      CHECK(std::abs(f.at(Channel::Acceleration, 0, 0)) < 1e-12);
    }
  }

  TEST_CASE("random 8x8 block, T=6, three terms: fast matches reference") {
    std::mt19937_64 rng(2024);
    const FrameStack s = oracle::random_stack(rng, 6, 8, 8);
    CHECK(max_abs_diff(taylor_frame_fast(whole(s), 3), taylor_frame_reference(whole(s), 3)) <= 1e-9);
  }

  TEST_CASE("both paths agree with the closed-form oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t T = 4 + rng() % 7;
      const int terms = 1 + static_cast<int>(rng() % (T - 3));
      const FrameStack s = oracle::random_stack(rng, T, 3, 4);
      const auto ref = taylor_frame_reference(whole(s), terms);
      const auto fast = taylor_frame_fast(whole(s), terms);
      for (std::size_t p = 0; p < s.plane_size(); ++p) {
        const auto want = oracle::taylor_pixel(oracle::trajectory(s, 0, T, p), terms);
        for (std::size_t c = 0; c < 3; ++c) {
          CHECK(std::abs(ref.channel(static_cast<Channel>(c))[p] - static_cast<double>(want[c])) < 1e-12);
          CHECK(std::abs(fast.channel(static_cast<Channel>(c))[p] - static_cast<double>(want[c])) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("static block is exactly zero for every valid term count") {
    std::mt19937_64 rng(3);
    const FrameStack one = oracle::random_stack(rng, 1, 5, 6);
    for (std::size_t T = 4; T <= 10; ++T) {
      FrameStack s(0, 5, 6);
      for (std::size_t t = 0; t < T; ++t) s.push_frame(one.frame(0));
      for (int k = 1; k <= static_cast<int>(T) - 3; ++k) {
        for (const auto& f : {taylor_frame_reference(whole(s), k), taylor_frame_fast(whole(s), k)}) {
          CHECK(std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; }));
        }
      }
    }
  }

  TEST_CASE("constant-velocity ramp gives (C, 0, 0)") {
    std::mt19937_64 rng(17);
    for (std::size_t T = 4; T <= 10; ++T) {
      std::vector<double> slope;
      const FrameStack s = ramp_stack(rng, T, 4, 4, slope);
      for (int k = 1; k <= static_cast<int>(T) - 3; ++k) {
        for (const auto& f : {taylor_frame_reference(whole(s), k), taylor_frame_fast(whole(s), k)}) {
          for (std::size_t p = 0; p < slope.size(); ++p) {
            CHECK(std::abs(f.channel(Channel::Displacement)[p] - slope[p]) <= 1e-12);
            CHECK(std::abs(f.channel(Channel::Velocity)[p]) <= 1e-12);
            CHECK(std::abs(f.channel(Channel::Acceleration)[p]) <= 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("one-term output scales exactly with power-of-two intensity scaling") {
    std::mt19937_64 rng(23);
    const FrameStack s = oracle::random_stack(rng, 7, 4, 4);
    for (double scale : {0.5, 0.25, 2.0}) {
      std::vector<double> scaled(s.data().begin(), s.data().end());
      for (auto& v : scaled) v *= scale;
      const FrameStack t(7, 4, 4, scaled);
      const auto base = taylor_frame_fast(whole(s), 1);
      const auto out = taylor_frame_fast(whole(t), 1);
      for (std::size_t i = 0; i < base.values.size(); ++i) CHECK(out.values[i] == base.values[i] * scale);
    }
  }

  TEST_CASE("one extra term adds exactly one series term per channel") {
    std::mt19937_64 rng(29);
    const std::size_t T = 9;
    const FrameStack s = oracle::random_stack(rng, T, 3, 3);
    const auto& fact = factorial_table();
    for (int k = 1; k + 1 <= static_cast<int>(T) - 3; ++k) {
      const auto lo = taylor_frame_fast(whole(s), k);
      const auto hi = taylor_frame_fast(whole(s), k + 1);
      for (std::size_t p = 0; p < s.plane_size(); ++p) {
        const auto traj = oracle::trajectory(s, 0, T, p);
        long double mean_pow = 0.0L;
        for (std::size_t tau = 0; tau < T; ++tau) mean_pow += std::pow(traj[tau] - traj[0], static_cast<long double>(k));
        mean_pow /= static_cast<long double>(T);
        for (int c = 0; c < 3; ++c) {
          const long double extra =
              oracle::forward_difference(traj, k + 1 + c) / static_cast<long double>(fact[k]) * mean_pow;
          const double got = hi.channel(static_cast<Channel>(c))[p] - lo.channel(static_cast<Channel>(c))[p];
          CHECK(std::abs(got - static_cast<double>(extra)) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("insufficient frames on both paths") {
    const FrameStack s = trajectory_stack({0.0, 0.1, 0.3, 0.6});
    CHECK(kind_of([&] { taylor_frame_reference(whole(s), 2); }) == ErrorKind::InsufficientFrames);
    CHECK(kind_of([&] { taylor_frame_fast(whole(s), 2); }) == ErrorKind::InsufficientFrames);
  }
}

TEST_SUITE("gray_augment") {
  TEST_CASE("zero frame plus gray equals gray in every channel") {
    Plane gray(2, 2);
    gray.values = {0.1, 0.2, 0.3, 0.4};
    const auto out = gray_augment(TaylorFrame(2, 2), gray);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto ch = out.channel(static_cast<Channel>(c));
      CHECK(std::equal(ch.begin(), ch.end(), gray.values.begin()));
    }
  }

  TEST_CASE("elementwise sum without clamping") {
    TaylorFrame f(1, 1);
    f.values = {0.1, 0.1, 0.0};
    Plane gray(1, 1, 0.5);
    const auto out = gray_augment(f, gray);
    CHECK(out.values[0] == doctest::Approx(0.6));
    CHECK(out.values[1] == doctest::Approx(0.6));
    CHECK(out.values[2] == 0.5);

    f.values = {0.9, -0.9, 0.0};
    const auto big = gray_augment(f, Plane(1, 1, 0.5));
    CHECK(big.values[0] == doctest::Approx(1.4));
    CHECK(big.values[1] == doctest::Approx(-0.4));
  }

  TEST_CASE("zeros are the identity") {
    TaylorFrame f(2, 3);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.01 * static_cast<double>(i) - 0.05;
    CHECK(gray_augment(f, Plane(2, 3)).values == f.values);
  }

  TEST_CASE("shape mismatch") {
    CHECK(kind_of([] { gray_augment(TaylorFrame(2, 2), Plane(2, 3)); }) == ErrorKind::ShapeMismatch);
  }
}

TEST_SUITE("taylor_video") {
  TEST_CASE("nineteen frames at T=4 give sixteen Taylor frames") {
    std::mt19937_64 rng(1);
    const GrayVideo video(oracle::random_stack(rng, 19, 6, 8));
    const auto tv = taylor_video(video, {4, 1, 1, false});
    CHECK(tv.size() == 16);
    CHECK(tv.height == 6);
    CHECK(tv.width == 8);
  }

  TEST_CASE("static video gives all-zero frames") {
    const GrayVideo video(FrameStack(10, 3, 3, std::vector<double>(90, 0.42)));
    const auto tv = taylor_video(video, {4, 1, 1, false});
    REQUIRE(tv.size() == 7);
    for (const auto& f : tv.frames) CHECK(std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; }));
  }

  TEST_CASE("1x1 five-frame video at T=4") {
    const GrayVideo video(trajectory_stack({0.0, 0.1, 0.3, 0.6, 1.0}));
    const auto tv = taylor_video(video, {4, 1, 1, false});
    REQUIRE(tv.size() == 2);
    const double want[2][3] = {{0.1, 0.1, 0.0}, {0.2, 0.1, 0.0}};
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(tv.frames[i].values[c] - want[i][c]) < 1e-12);
    }
  }

  TEST_CASE("frame i is the fast frame of block i") {
    std::mt19937_64 rng(8);
    const GrayVideo video(oracle::random_stack(rng, 15, 4, 3));
    const TaylorConfig cfg{6, 2, 2, false};
    const auto tv = taylor_video(video, cfg);
    const auto blocks = sliding_blocks(video, 6, 2);
    REQUIRE(tv.size() == blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) CHECK(tv.frames[i].values == taylor_frame_fast(blocks[i], 2).values);
  }

  TEST_CASE("gray augmentation adds each block's first frame") {
    std::mt19937_64 rng(9);
    const GrayVideo video(oracle::random_stack(rng, 8, 3, 3));
    const auto plain = taylor_video(video, {5, 2, 1, false});
    const auto aug = taylor_video(video, {5, 2, 1, true});
    REQUIRE(aug.size() == plain.size());
    CHECK(aug.config.gray_augment);
    for (std::size_t i = 0; i < aug.size(); ++i) {
      CHECK(aug.frames[i].values == gray_augment(plain.frames[i], video.frame(i)).values);
    }
  }

  TEST_CASE("parallel evaluation is bit-identical and ordered") {
    std::mt19937_64 rng(10);
    const GrayVideo video(oracle::random_stack(rng, 40, 9, 7));
    const TaylorConfig cfg{7, 4, 1, true};
    const auto seq = taylor_video(video, cfg, {KernelPath::Fast, 1});
    for (unsigned threads : {0u, 2u, 3u, 8u}) {
      const auto par = taylor_video(video, cfg, {KernelPath::Fast, threads});
      REQUIRE(par.size() == seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i) CHECK(par.frames[i].values == seq.frames[i].values);
    }
  }

  TEST_CASE("errors propagate") {
    const GrayVideo video(FrameStack(5, 1, 1, std::vector<double>(5, 0.0)));
    CHECK(kind_of([&] { taylor_video(video, {6, 1, 1, false}); }) == ErrorKind::VideoTooShort);
    CHECK(kind_of([&] { taylor_video(video, {4, 2, 1, false}); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([&] { taylor_video(video, {4, 1, 0, false}); }) == ErrorKind::InvalidConfig);
  }

  TEST_CASE("gray video rejects samples outside [0,1]") {
    CHECK(kind_of([] { GrayVideo(FrameStack(1, 1, 2, {0.5, 1.5})); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([] { GrayVideo(FrameStack(1, 1, 1, {std::nan("")})); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([] { GrayVideo(FrameStack(0, 1, 1)); }) == ErrorKind::InvalidInput);
  }
}
