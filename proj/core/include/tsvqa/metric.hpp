#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tsvqa/plane.hpp"
#include "tsvqa/spectral.hpp"
#include "tsvqa/video_io.hpp"

namespace tsvqa {

// Normalized circular Gaussian weights on a (2r+1) x (2r+1) grid.
struct GaussianWindow {
  int radius = 0;
  double sigma = 0.0;
  std::vector<double> weights;  // row-major, size() x size()

  int size() const noexcept { return 2 * radius + 1; }
  // du, dv in [-radius, radius].
  double at(int du, int dv) const noexcept {
    return weights[static_cast<std::size_t>(du + radius) * size() + (dv + radius)];
  }
};

GaussianWindow gaussian_window(int radius, double sigma);

// How TPSD planes are brought to a common dynamic range before the
// stability constant is applied.
enum class PlaneNormalization {
  kRefMax,  // divide both planes by the largest reference entry
  kNone,
  kLog10,   // log10(1 + value)
};

enum class Padding {
  kMirror,  // symmetric reflection; the map keeps the plane size
  kValid,   // only positions where the window fits; the map shrinks by 2r
};

std::string_view to_string(PlaneNormalization n);
std::string_view to_string(Padding p);
std::optional<PlaneNormalization> parse_normalization(std::string_view text);
std::optional<Padding> parse_padding(std::string_view text);

struct MetricConfig {
  int tensor_len = 30;
  int window_radius = 5;
  double window_sigma = 1.5;
  double stability_c = 4.5e-4;
  double beta = 1.0;
  PlaneNormalization plane_normalization = PlaneNormalization::kLog10;
  bool center_dc = true;
  Padding padding = Padding::kMirror;

  // Throws kInvalidArgument on non-positive or non-finite fields.
  void validate() const;
};

struct LocalStats {
  RealPlane mean;
  RealPlane deviation;
};

// Weighted local mean and standard deviation of one plane.
LocalStats local_stats(const RealPlane& plane, const GaussianWindow& window, Padding padding);

struct LocalMoments {
  RealPlane mean_x;
  RealPlane mean_y;
  RealPlane sigma_x;
  RealPlane sigma_y;
  RealPlane covariance;
};

// Weighted local means, deviations and cross-covariance of a plane pair.
LocalMoments local_moments(const RealPlane& x, const RealPlane& y, const GaussianWindow& window,
                           Padding padding, int threads = 1);

struct ZetaMap {
  RealPlane values;
};

// Per-bin (cov + c) / (sigma_ref * sigma_dist + c).
ZetaMap zeta_map(const TpsdPlane& reference, const TpsdPlane& distorted,
                 const GaussianWindow& window, double c, Padding padding, int threads = 1);

double tensor_score(const ZetaMap& zeta);

// (mean of tensor_scores) ^ beta. A negative mean with non-integer beta
// throws kNegativeBase.
double video_score(std::span<const double> tensor_scores, double beta);

// Applies the configured normalization to both planes. kRefMax leaves the
// planes untouched when the reference is identically zero.
void normalize_planes(TpsdPlane& reference, TpsdPlane& distorted, PlaneNormalization mode);

struct StageTimings {
  double read_s = 0.0;
  double transform_s = 0.0;
  double correlate_s = 0.0;
  double pool_s = 0.0;

  double total_s() const noexcept { return read_s + transform_s + correlate_s + pool_s; }
};

struct TensorPairResult {
  TpsdPlane reference;  // normalized
  TpsdPlane distorted;  // normalized
  ZetaMap zeta;
  double score = 0.0;
};

// TPSD of both tensors, normalization, zeta map and tensor score.
TensorPairResult analyze_tensor_pair(std::span<const LumaFrame> reference,
                                     std::span<const LumaFrame> distorted,
                                     const MetricConfig& config, const GaussianWindow& window,
                                     int threads = 1, StageTimings* timings = nullptr);

struct QualityReport {
  std::vector<double> tensor_scores;
  std::vector<TensorSpan> tensors;
  double video_score = 0.0;
  MetricConfig config;
  VideoDescriptor descriptor;
  StageTimings timings;
};

QualityReport assess(std::span<const LumaFrame> reference, std::span<const LumaFrame> distorted,
                     const MetricConfig& config,
                     std::optional<FrameRange> range = std::nullopt, int threads = 1);

// Streams two YUV420 files tensor by tensor; only one tensor pair is held in
// memory at a time.
QualityReport assess_files(const std::filesystem::path& reference,
                           const std::filesystem::path& distorted, int width, int height,
                           const MetricConfig& config,
                           std::optional<FrameRange> range = std::nullopt, int threads = 1);

}  // namespace tsvqa
