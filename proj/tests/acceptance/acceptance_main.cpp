// Property-based acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsvqa/error.hpp"
#include "tsvqa/eval.hpp"
#include "tsvqa/metric.hpp"
#include "tsvqa/spectral.hpp"
#include "tsvqa/synth.hpp"
#include "tsvqa/video_io.hpp"

namespace {

using namespace tsvqa;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome dft_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const int shapes[][3] = {{4, 4, 2}, {5, 7, 3}, {8, 8, 4}, {16, 16, 8}};
  double worst = 0.0;
  for (const auto& s : shapes) {
    LumaTensor tensor;
    tensor.frames = oracle::random_frames(s[0], s[1], s[2], rng);
    const auto fast = dft3(tensor);
    const auto slow = oracle::direct_dft3(tensor.frames);
    double peak = 0.0;
    for (const auto& v : slow) peak = std::max(peak, std::abs(v));
    for (int l = 0; l < s[2]; ++l) {
      for (int h = 0; h < s[0]; ++h) {
        for (int k = 0; k < s[1]; ++k) {
          const auto ref = slow[(static_cast<std::size_t>(l) * s[0] + h) * s[1] + k];
          worst = std::max(worst, std::abs(fast(h, k, l) - ref) / peak);
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-9 && elapsed < 10.0,
          fmt("max relative error %.3g over 4 shapes, %.2f s", worst, elapsed)};
}

Outcome parseval() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> dim(2, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    LumaTensor tensor;
    tensor.frames = oracle::random_frames(dim(rng), dim(rng), dim(rng), rng, trial % 2 == 0);
    const auto spectrum = dft3(tensor);
    const auto psd = psd3(spectrum);
    const double mno = static_cast<double>(spectrum.size());
    double psd_sum = 0.0, spectral = 0.0, energy = 0.0;
    for (double v : psd.values()) psd_sum += v;
    for (const auto& v : spectrum.values()) spectral += std::norm(v);
    for (const auto& f : tensor.frames) {
      for (float v : f.values()) energy += static_cast<double>(v) * v;
    }
    const double mean_energy = energy / mno;
    worst = std::max(worst, std::abs(psd_sum * mno - spectral) / spectral);
    worst = std::max(worst, std::abs(psd_sum - mno * mean_energy) / (mno * mean_energy));
  }
  return {worst <= 1e-6, fmt("max relative deviation %.3g over 100 tensors", worst)};
}

Outcome identity() {
  const MetricConfig defaults;
  double worst = 0.0;
  int partial = 0;
  const int sizes[][3] = {{32, 32, 30}, {48, 32, 45}, {40, 24, 61}, {64, 64, 33}, {32, 48, 2},
                          {24, 24, 59}, {56, 40, 90}, {32, 32, 31}, {80, 48, 47}, {36, 28, 75}};
  for (int i = 0; i < 10; ++i) {
    const auto v = make_scene_sequence(sizes[i][0], sizes[i][1], sizes[i][2], 300 + i);
    const auto report = assess(v, v, defaults);
    if (report.tensors.back().depth() != static_cast<std::size_t>(defaults.tensor_len)) ++partial;
    worst = std::max(worst, std::abs(report.video_score - 1.0));
    for (double s : report.tensor_scores) worst = std::max(worst, std::abs(s - 1.0));
  }
  return {worst <= 1e-12 && partial > 0,
          fmt("max |score - 1| = %.3g over 10 videos (%d end in a partial tensor)", worst,
              partial)};
}

Outcome boundedness() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> half(6, 20);
  std::uniform_int_distribution<int> depth(2, 6);
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double zeta_lo = 1.0, zeta_hi = -1.0, score_lo = 1.0, score_hi = -1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = 2 * half(rng);
    const int cols = 2 * half(rng);
    const int o = depth(rng);
    auto ref = oracle::random_frames(rows, cols, o, rng);
    std::vector<LumaFrame> dist;
    switch (pick(rng)) {
      case 0: dist = oracle::random_frames(rows, cols, o, rng); break;
      case 1: dist = apply_distortion(ref, {DistortionKind::kGaussianNoise, 1 + 60 * unit(rng), rng()}); break;
      case 2: dist = apply_distortion(ref, {DistortionKind::kGaussianBlur, 0.3 + 4 * unit(rng), 0}); break;
      case 3: dist = apply_distortion(ref, {DistortionKind::kBlockQuantize, 2 + 100 * unit(rng), 0}); break;
      case 4:
        dist = ref;
        for (auto& f : dist) {
          for (auto& v : f.values()) v = 255.0f - v;
        }
        break;
      default: dist.assign(o, LumaFrame(rows, cols, static_cast<float>(255 * unit(rng)))); break;
    }
    if (trial % 7 == 0) std::swap(ref, dist);
    MetricConfig cfg;
    cfg.tensor_len = o;
    cfg.window_radius = 1 + static_cast<int>(rng() % 5);
    cfg.window_sigma = 0.5 + 2.5 * unit(rng);
    cfg.stability_c = std::pow(10.0, -12 + 12 * unit(rng));
    cfg.plane_normalization = static_cast<PlaneNormalization>(rng() % 3);
    cfg.padding = rng() % 2 ? Padding::kMirror : Padding::kValid;
    cfg.center_dc = rng() % 2;
    const auto window = gaussian_window(cfg.window_radius, cfg.window_sigma);
    const auto result = analyze_tensor_pair(ref, dist, cfg, window);
    for (double z : result.zeta.values.values()) {
      zeta_lo = std::min(zeta_lo, z);
      zeta_hi = std::max(zeta_hi, z);
    }
    score_lo = std::min(score_lo, result.score);
    score_hi = std::max(score_hi, result.score);
  }
  const double tol = 1e-9;
  const bool ok = zeta_lo >= -1 - tol && zeta_hi <= 1 + tol && score_lo >= -1 && score_hi <= 1;
  return {ok, fmt("zeta in [%.12f, %.12f], scores in [%.6f, %.6f] over 1000 pairs", zeta_lo,
                  zeta_hi, score_lo, score_hi)};
}

struct Family {
  DistortionKind kind;
  double levels[4];
};

const Family kFamilies[] = {
    {DistortionKind::kGaussianNoise, {2, 5, 10, 20}},
    {DistortionKind::kGaussianBlur, {0.5, 1, 2, 4}},
    {DistortionKind::kBlockQuantize, {4, 8, 16, 32}},
    {DistortionKind::kFrameFreeze, {2, 5, 10, 20}},
};

Outcome monotonicity() {
  const auto t0 = Clock::now();
  const MetricConfig cfg;
  int trials = 0, strict = 0;
  std::string misses;
  for (int s = 0; s < 5; ++s) {
    const auto ref = make_scene_sequence(128, 128, 30, 100 + s);
    for (const auto& fam : kFamilies) {
      double prev = std::numeric_limits<double>::infinity();
      bool ok = true;
      for (double level : fam.levels) {
        const auto dist = apply_distortion(ref, {fam.kind, level, 42u + s});
        const double score = assess(ref, dist, cfg).video_score;
        ok = ok && score < prev;
        prev = score;
      }
      ++trials;
      if (ok) {
        ++strict;
      } else {
        misses += std::string(" ") + std::string(to_string(fam.kind)) + "/scene" + std::to_string(s);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  const double rate = static_cast<double>(strict) / trials;
  return {rate >= 0.95 && elapsed < 300.0,
          fmt("%d/%d trials strictly decreasing (%.0f%%), %.1f s", strict, trials, 100 * rate,
              elapsed) +
              (misses.empty() ? "" : "; non-monotone:" + misses)};
}

Outcome beta_ranking() {
  MetricConfig cfg;
  cfg.tensor_len = 6;
  std::vector<std::vector<double>> fixtures;
  for (int s = 0; s < 3; ++s) {
    const auto ref = make_scene_sequence(64, 64, 24, 500 + s);
    for (const auto& fam : kFamilies) {
      for (double level : {fam.levels[0], fam.levels[3]}) {
        const auto dist = apply_distortion(ref, {fam.kind, level, 9u + s});
        fixtures.push_back(assess(ref, dist, cfg).tensor_scores);
      }
    }
  }
  std::vector<double> means;
  for (const auto& f : fixtures) {
    double m = 0.0;
    for (double v : f) m += v;
    means.push_back(m / f.size());
  }
  auto sorted = means;
  std::sort(sorted.begin(), sorted.end());
  const bool usable = sorted.front() >= 0.0 &&
                      std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  std::vector<std::vector<double>> ranks;
  for (double beta : {0.5, 1.0, 2.0}) {
    std::vector<double> scores;
    for (const auto& f : fixtures) scores.push_back(video_score(f, beta));
    ranks.push_back(fractional_ranks(scores));
  }
  const bool same = ranks[0] == ranks[1] && ranks[1] == ranks[2];
  return {usable && same, fmt("%zu fixtures, means in [%.4f, %.4f], ranks %s across beta", fixtures.size(),
                              sorted.front(), sorted.back(), same ? "identical" : "DIFFER")};
}

Outcome local_stats_oracle() {
  std::mt19937_64 rng(707);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracle::random_plane(32, 32, rng);
    const auto y = oracle::random_plane(32, 32, rng);
    const int radius = 1 + trial % 5;
    const double sigma = 0.8 + 0.3 * trial;
    const auto window = gaussian_window(radius, sigma);
    for (bool mirror : {true, false}) {
      const auto got = local_moments(x, y, window, mirror ? Padding::kMirror : Padding::kValid);
      const auto want = oracle::naive_moments(x, y, radius, sigma, mirror);
      const auto cmp = [&](const RealPlane& a, const RealPlane& b) {
        if (!a.same_shape(b)) {
          worst = std::numeric_limits<double>::infinity();
          return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
          worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
        }
      };
      cmp(got.mean_x, want.mean_x);
      cmp(got.mean_y, want.mean_y);
      cmp(got.sigma_x, want.sigma_x);
      cmp(got.sigma_y, want.sigma_y);
      cmp(got.covariance, want.covariance);
    }
  }
  return {worst <= 1e-12, fmt("max abs deviation %.3g (10 plane pairs, mirror and valid)", worst)};
}

Outcome edge_fixtures() {
  const MetricConfig cfg;
  const auto window = gaussian_window(cfg.window_radius, cfg.window_sigma);
  std::string detail;
  bool ok = true;
  for (bool motion : {false, true}) {
    const auto ref = make_edge_sequence(64, 64, motion);
    auto dist = ref;
    dist[1] = apply_distortion(std::span<const LumaFrame>(&ref[1], 1),
                               {DistortionKind::kGaussianNoise, 16.0, 2024})[0];
    const double clean = analyze_tensor_pair(ref, ref, cfg, window).score;
    const auto noisy = analyze_tensor_pair(ref, dist, cfg, window);
    const auto& z = noisy.zeta.values.values();
    const double below = static_cast<double>(std::count_if(z.begin(), z.end(), [](double v) {
                           return v < 0.9;
                         })) / z.size();
    ok = ok && clean == 1.0 && noisy.score < 1.0;
    if (!motion) ok = ok && below >= 0.10;
    detail += fmt("%s: clean %.17g, distorted %.6f, zeta<0.9 %.1f%%; ", motion ? "moving" : "static",
                  clean, noisy.score, 100 * below);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome correlation_fixtures() {
  struct Case {
    std::vector<double> x, y;
    double pcc, scc;
  };
  // Hand-computed. (1,2,3,4,5)/(2,1,4,3,6): Sxy = 10, Sxx = 10, Syy = 14.8, and
  // the rank differences (-1,1,-1,1,0) give 1 - 6*4/120.
  const std::vector<Case> cases{
      {{1, 2, 3}, {3, 2, 1}, -1.0, -1.0},
      {{1, 2, 3, 4, 5}, {2, 1, 4, 3, 6}, 10.0 / std::sqrt(148.0), 0.8},
      // Raw: Sxy = 3.5, Sxx = 2.75, Syy = 5. Ranks (1.5, 1.5, 3, 4): Sxy = 4.5, Sxx = 4.5.
      {{1, 1, 2, 3}, {1, 2, 3, 4}, 3.5 / std::sqrt(2.75 * 5.0), 4.5 / std::sqrt(4.5 * 5.0)},
      // x = (0, 0, 1, 1): Sxy = 2, Sxx = 1, Syy = 5; ranks (1.5,1.5,3.5,3.5) correlate the same way.
      {{0, 0, 1, 1}, {1, 2, 3, 4}, 2.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0)},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, std::abs(pearson(c.x, c.y) - c.pcc));
    worst = std::max(worst, std::abs(spearman(c.x, c.y) - c.scc));
  }
  const bool ties = fractional_ranks(std::vector<double>{1, 1, 2}) == std::vector<double>{1.5, 1.5, 3};
  return {worst <= 1e-12 && ties, fmt("max deviation %.3g over %zu fixtures, tie ranks %s", worst,
                                      cases.size(), ties ? "ok" : "wrong")};
}

Outcome performance() {
  const auto dir = fs::temp_directory_path() / "tsvqa_acceptance_perf";
  fs::create_directories(dir);
  {
    const auto ref = make_scene_sequence(1280, 720, 120, 77);
    write_yuv420(dir / "ref.yuv", ref);
    write_yuv420(dir / "dist.yuv",
                 apply_distortion(ref, {DistortionKind::kGaussianNoise, 5.0, 78}));
  }
  const auto t0 = Clock::now();
  const auto report = assess_files(dir / "ref.yuv", dir / "dist.yuv", 1280, 720, MetricConfig{});
  const double wall = seconds_since(t0);
  fs::remove_all(dir);
  const auto& t = report.timings;
  return {wall <= 60.0,
          fmt("120 frames 1280x720: %.2f s wall (read %.2f, transform %.2f, correlate %.2f, pool "
              "%.4f), score %.6f",
              wall, t.read_s, t.transform_s, t.correlate_s, t.pool_s, report.video_score)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"dft matches direct sum", dft_oracle},
      {"parseval identity", parseval},
      {"identity scores one", identity},
      {"zeta and scores bounded", boundedness},
      {"monotone in distortion level", monotonicity},
      {"ranking invariant under beta", beta_ranking},
      {"local stats match naive loops", local_stats_oracle},
      {"edge fixtures", edge_fixtures},
      {"correlation fixtures", correlation_fixtures},
      {"720p throughput", performance},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s -- %s\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
