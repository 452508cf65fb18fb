#include "tsvqa/metric.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "tsvqa/error.hpp"

namespace tsvqa {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int reflect(int i, int n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - i - 1;
  return i;
}

RealPlane mirror_pad(const RealPlane& plane, int radius) {
  const int rows = plane.rows();
  const int cols = plane.cols();
  RealPlane padded(rows + 2 * radius, cols + 2 * radius);
  for (int r = 0; r < padded.rows(); ++r) {
    const int sr = reflect(r - radius, rows);
    for (int c = 0; c < padded.cols(); ++c) padded(r, c) = plane(sr, reflect(c - radius, cols));
  }
  return padded;
}

void check_window_fits(const RealPlane& plane, const GaussianWindow& window) {
  if (plane.rows() < window.size() || plane.cols() < window.size()) {
    throw Error(ErrorCode::kPlaneTooSmall,
                std::to_string(plane.rows()) + "x" + std::to_string(plane.cols()) +
                    " plane is smaller than the " + std::to_string(window.size()) + "x" +
                    std::to_string(window.size()) + " window");
  }
}

// Plane the window slides over, plus the output size, for a padding mode.
struct SlidingSource {
  RealPlane padded;
  const RealPlane* plane = nullptr;
  int out_rows = 0;
  int out_cols = 0;

  const RealPlane& source() const { return plane != nullptr ? *plane : padded; }
};

SlidingSource sliding_source(const RealPlane& plane, int radius, Padding padding) {
  SlidingSource s;
  if (padding == Padding::kMirror) {
    s.padded = mirror_pad(plane, radius);
    s.out_rows = plane.rows();
    s.out_cols = plane.cols();
  } else {
    s.plane = &plane;
    s.out_rows = plane.rows() - 2 * radius;
    s.out_cols = plane.cols() - 2 * radius;
  }
  return s;
}

// Visits every output position with the weighted moments of both planes.
// Means first, then central moments about them, exactly as the sums are
// written; no E[x^2] - E[x]^2 shortcut.
template <typename Sink>
void pair_moments(const RealPlane& xs, const RealPlane& ys, const GaussianWindow& window,
                  int out_rows, int out_cols, int threads, Sink&& sink) {
  const int size = window.size();
  const double* w = window.weights.data();
  detail::parallel_for(static_cast<std::size_t>(out_rows), threads,
                       [&](std::size_t begin, std::size_t end) {
    for (int i = static_cast<int>(begin); i < static_cast<int>(end); ++i) {
      for (int j = 0; j < out_cols; ++j) {
        double mx = 0.0;
        double my = 0.0;
        for (int u = 0; u < size; ++u) {
          const double* xr = xs.row(i + u).data() + j;
          const double* yr = ys.row(i + u).data() + j;
          const double* wr = w + static_cast<std::size_t>(u) * size;
          for (int v = 0; v < size; ++v) {
            mx += wr[v] * xr[v];
            my += wr[v] * yr[v];
          }
        }
        double vx = 0.0;
        double vy = 0.0;
        double cxy = 0.0;
        for (int u = 0; u < size; ++u) {
          const double* xr = xs.row(i + u).data() + j;
          const double* yr = ys.row(i + u).data() + j;
          const double* wr = w + static_cast<std::size_t>(u) * size;
          for (int v = 0; v < size; ++v) {
            const double dx = xr[v] - mx;
            const double dy = yr[v] - my;
            vx += wr[v] * dx * dx;
            vy += wr[v] * dy * dy;
            cxy += wr[v] * dx * dy;
          }
        }
        sink(i, j, mx, my, vx, vy, cxy);
      }
    }
  });
}

}  // namespace

GaussianWindow gaussian_window(int radius, double sigma) {
  if (radius < 1) throw Error(ErrorCode::kInvalidArgument, "window radius must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "window sigma must be positive and finite");
  }
  GaussianWindow window{radius, sigma, {}};
  const int size = window.size();
  window.weights.resize(static_cast<std::size_t>(size) * size);
  const double denom = 2.0 * sigma * sigma;
  for (int u = -radius; u <= radius; ++u) {
    for (int v = -radius; v <= radius; ++v) {
      window.weights[static_cast<std::size_t>(u + radius) * size + (v + radius)] =
          std::exp(-static_cast<double>(u * u + v * v) / denom);
    }
  }
  const double total = std::accumulate(window.weights.begin(), window.weights.end(), 0.0);
  for (auto& w : window.weights) w /= total;
  return window;
}

std::string_view to_string(PlaneNormalization n) {
  switch (n) {
    case PlaneNormalization::kRefMax: return "ref-max";
    case PlaneNormalization::kNone: return "none";
    case PlaneNormalization::kLog10: return "log10";
  }
  return "?";
}

std::string_view to_string(Padding p) {
  return p == Padding::kMirror ? "mirror" : "valid";
}

std::optional<PlaneNormalization> parse_normalization(std::string_view text) {
  if (text == "ref-max") return PlaneNormalization::kRefMax;
  if (text == "none") return PlaneNormalization::kNone;
  if (text == "log10") return PlaneNormalization::kLog10;
  return std::nullopt;
}

std::optional<Padding> parse_padding(std::string_view text) {
  if (text == "mirror") return Padding::kMirror;
  if (text == "valid") return Padding::kValid;
  return std::nullopt;
}

void MetricConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (tensor_len < 2) throw Error(ErrorCode::kInvalidArgument, "tensor_len must be >= 2");
  if (window_radius < 1) throw Error(ErrorCode::kInvalidArgument, "window_radius must be >= 1");
  if (!positive(window_sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "window_sigma must be positive");
  }
  if (!positive(stability_c)) {
    throw Error(ErrorCode::kInvalidArgument, "stability_c must be positive");
  }
  if (!positive(beta)) throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
}

LocalStats local_stats(const RealPlane& plane, const GaussianWindow& window, Padding padding) {
  check_window_fits(plane, window);
  const auto src = sliding_source(plane, window.radius, padding);
  const RealPlane& xs = src.source();
  const int size = window.size();
  const double* w = window.weights.data();

  LocalStats stats{RealPlane(src.out_rows, src.out_cols), RealPlane(src.out_rows, src.out_cols)};
  for (int i = 0; i < src.out_rows; ++i) {
    for (int j = 0; j < src.out_cols; ++j) {
      double mean = 0.0;
      for (int u = 0; u < size; ++u) {
        const double* xr = xs.row(i + u).data() + j;
        for (int v = 0; v < size; ++v) mean += w[u * size + v] * xr[v];
      }
      double var = 0.0;
      for (int u = 0; u < size; ++u) {
        const double* xr = xs.row(i + u).data() + j;
        for (int v = 0; v < size; ++v) {
          const double d = xr[v] - mean;
          var += w[u * size + v] * d * d;
        }
      }
      stats.mean(i, j) = mean;
      stats.deviation(i, j) = std::sqrt(var);
    }
  }
  return stats;
}

LocalMoments local_moments(const RealPlane& x, const RealPlane& y, const GaussianWindow& window,
                           Padding padding, int threads) {
  if (!x.same_shape(y)) throw Error(ErrorCode::kDimensionMismatch, "planes differ in size");
  check_window_fits(x, window);
  const auto sx = sliding_source(x, window.radius, padding);
  const auto sy = sliding_source(y, window.radius, padding);
  const int rows = sx.out_rows;
  const int cols = sx.out_cols;

  LocalMoments m{RealPlane(rows, cols), RealPlane(rows, cols), RealPlane(rows, cols),
                 RealPlane(rows, cols), RealPlane(rows, cols)};
  pair_moments(sx.source(), sy.source(), window, rows, cols, threads,
               [&](int i, int j, double mx, double my, double vx, double vy, double cxy) {
                 m.mean_x(i, j) = mx;
                 m.mean_y(i, j) = my;
                 m.sigma_x(i, j) = std::sqrt(vx);
                 m.sigma_y(i, j) = std::sqrt(vy);
                 m.covariance(i, j) = cxy;
               });
  return m;
}

ZetaMap zeta_map(const TpsdPlane& reference, const TpsdPlane& distorted,
                 const GaussianWindow& window, double c, Padding padding, int threads) {
  if (!reference.values.same_shape(distorted.values)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "reference plane is " + std::to_string(reference.values.rows()) + "x" +
                    std::to_string(reference.values.cols()) + ", distorted plane is " +
                    std::to_string(distorted.values.rows()) + "x" +
                    std::to_string(distorted.values.cols()));
  }
  if (reference.dc_centered != distorted.dc_centered) {
    throw Error(ErrorCode::kCenteringMismatch, "only one of the planes is DC-centered");
  }
  check_window_fits(reference.values, window);

  const auto sx = sliding_source(reference.values, window.radius, padding);
  const auto sy = sliding_source(distorted.values, window.radius, padding);
  ZetaMap zeta{RealPlane(sx.out_rows, sx.out_cols)};
  pair_moments(sx.source(), sy.source(), window, sx.out_rows, sx.out_cols, threads,
               [&](int i, int j, double, double, double vx, double vy, double cxy) {
                 zeta.values(i, j) = (cxy + c) / (std::sqrt(vx) * std::sqrt(vy) + c);
               });
  return zeta;
}

double tensor_score(const ZetaMap& zeta) {
  if (zeta.values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty zeta map");
  double sum = 0.0;
  for (double v : zeta.values.values()) sum += v;
  return sum / static_cast<double>(zeta.values.size());
}

double video_score(std::span<const double> tensor_scores, double beta) {
  if (tensor_scores.empty()) throw Error(ErrorCode::kInvalidArgument, "no tensor scores to pool");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be positive and finite");
  }
  double sum = 0.0;
  for (double s : tensor_scores) sum += s;
  const double mean = sum / static_cast<double>(tensor_scores.size());
  if (mean < 0.0 && std::floor(beta) != beta) {
    throw Error(ErrorCode::kNegativeBase,
                "mean tensor score " + std::to_string(mean) +
                    " is negative and beta " + std::to_string(beta) + " is not an integer");
  }
  return std::pow(mean, beta);
}

void normalize_planes(TpsdPlane& reference, TpsdPlane& distorted, PlaneNormalization mode) {
  switch (mode) {
    case PlaneNormalization::kNone:
      return;
    case PlaneNormalization::kRefMax: {
      const auto ref = reference.values.values();
      const double peak = *std::max_element(ref.begin(), ref.end());
      if (!(peak > 0.0)) return;
      const double inv = 1.0 / peak;
      for (auto& v : reference.values.values()) v *= inv;
      for (auto& v : distorted.values.values()) v *= inv;
      return;
    }
    case PlaneNormalization::kLog10:
      for (auto& v : reference.values.values()) v = std::log10(1.0 + v);
      for (auto& v : distorted.values.values()) v = std::log10(1.0 + v);
      return;
  }
}

TensorPairResult analyze_tensor_pair(std::span<const LumaFrame> reference,
                                     std::span<const LumaFrame> distorted,
                                     const MetricConfig& config, const GaussianWindow& window,
                                     int threads, StageTimings* timings) {
  if (reference.size() != distorted.size()) {
    throw Error(ErrorCode::kFrameCountMismatch, "tensor depths differ");
  }
  auto start = Clock::now();
  TensorPairResult result;
  result.reference = tensor_tpsd(reference, config.center_dc);
  result.distorted = tensor_tpsd(distorted, config.center_dc);
  normalize_planes(result.reference, result.distorted, config.plane_normalization);
  if (timings != nullptr) timings->transform_s += seconds_since(start);

  start = Clock::now();
  result.zeta = zeta_map(result.reference, result.distorted, window, config.stability_c,
                         config.padding, threads);
  if (timings != nullptr) timings->correlate_s += seconds_since(start);

  start = Clock::now();
  result.score = tensor_score(result.zeta);
  if (timings != nullptr) timings->pool_s += seconds_since(start);
  return result;
}

QualityReport assess(std::span<const LumaFrame> reference, std::span<const LumaFrame> distorted,
                     const MetricConfig& config, std::optional<FrameRange> range, int threads) {
  config.validate();
  if (reference.size() != distorted.size()) {
    throw Error(ErrorCode::kFrameCountMismatch,
                "reference has " + std::to_string(reference.size()) +
                    " frames, distorted has " + std::to_string(distorted.size()));
  }
  if (reference.empty()) throw Error(ErrorCode::kEmptySelection, "no frames to assess");
  const auto& shape = reference.front();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (!reference[i].same_shape(shape) || !distorted[i].same_shape(shape)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "frame " + std::to_string(i) + " differs in size from frame 0");
    }
  }

  QualityReport report;
  report.config = config;
  report.descriptor = {shape.cols(), shape.rows(), reference.size()};
  report.tensors = tensor_spans(reference.size(), static_cast<std::size_t>(config.tensor_len),
                                range);
  const auto window = gaussian_window(config.window_radius, config.window_sigma);
  for (const auto& span : report.tensors) {
    const auto result = analyze_tensor_pair(reference.subspan(span.begin, span.depth()),
                                            distorted.subspan(span.begin, span.depth()), config,
                                            window, threads, &report.timings);
    report.tensor_scores.push_back(result.score);
  }
  const auto start = Clock::now();
  report.video_score = video_score(report.tensor_scores, config.beta);
  report.timings.pool_s += seconds_since(start);
  return report;
}

QualityReport assess_files(const std::filesystem::path& reference,
                           const std::filesystem::path& distorted, int width, int height,
                           const MetricConfig& config, std::optional<FrameRange> range,
                           int threads) {
  config.validate();
  auto start = Clock::now();
  Yuv420Reader ref_reader(reference, width, height);
  Yuv420Reader dist_reader(distorted, width, height);
  const auto& desc = ref_reader.descriptor();
  if (desc.frame_count != dist_reader.descriptor().frame_count) {
    throw Error(ErrorCode::kFrameCountMismatch,
                reference.string() + " has " + std::to_string(desc.frame_count) +
                    " frames, " + distorted.string() + " has " +
                    std::to_string(dist_reader.descriptor().frame_count));
  }

  QualityReport report;
  report.config = config;
  report.descriptor = desc;
  report.tensors = tensor_spans(desc.frame_count, static_cast<std::size_t>(config.tensor_len),
                                range);
  const auto window = gaussian_window(config.window_radius, config.window_sigma);
  report.timings.read_s += seconds_since(start);

  for (const auto& span : report.tensors) {
    start = Clock::now();
    const auto ref_frames = ref_reader.read(span.begin, span.depth());
    const auto dist_frames = dist_reader.read(span.begin, span.depth());
    report.timings.read_s += seconds_since(start);
    const auto result =
        analyze_tensor_pair(ref_frames, dist_frames, config, window, threads, &report.timings);
    report.tensor_scores.push_back(result.score);
  }
  start = Clock::now();
  report.video_score = video_score(report.tensor_scores, config.beta);
  report.timings.pool_s += seconds_since(start);
  return report;
}

}  // namespace tsvqa
