#include "tsvqa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tsvqa/error.hpp"

namespace tsvqa {

namespace {

constexpr int kQuantBlock = 8;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

float clamp_round(double v) {
  return static_cast<float>(std::clamp(std::round(v), 0.0, 255.0));
}

// Reflects any index into [0, n) (period 2n), for kernels wider than the frame.
int reflect_index(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::vector<LumaFrame> add_noise(std::span<const LumaFrame> frames, double sigma,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<LumaFrame> out(frames.begin(), frames.end());
  for (auto& frame : out) {
    for (auto& v : frame.values()) v = clamp_round(v + sigma * normal(rng));
  }
  return out;
}

LumaFrame blur_frame(const LumaFrame& frame, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += kernel[i + radius];
  }
  for (auto& k : kernel) k /= total;

  const int rows = frame.rows();
  const int cols = frame.cols();
  Plane<double> horizontal(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * frame(r, reflect_index(c + i, cols));
      }
      horizontal(r, c) = acc;
    }
  }
  LumaFrame out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * horizontal(reflect_index(r + i, rows), c);
      }
      out(r, c) = clamp_round(acc);
    }
  }
  return out;
}

// Each 8x8 block keeps a quantized mean plus a quantized residual, so coarse
// steps flatten blocks the way a starved transform coder does. Every output
// is a multiple of step.
LumaFrame quantize_frame(const LumaFrame& frame, double step) {
  const auto q = [step](double v) { return step * std::round(v / step); };
  const double top = step * std::floor(255.0 / step);
  LumaFrame out(frame.rows(), frame.cols());
  for (int br = 0; br < frame.rows(); br += kQuantBlock) {
    for (int bc = 0; bc < frame.cols(); bc += kQuantBlock) {
      const int r_end = std::min(br + kQuantBlock, frame.rows());
      const int c_end = std::min(bc + kQuantBlock, frame.cols());
      double sum = 0.0;
      for (int r = br; r < r_end; ++r) {
        for (int c = bc; c < c_end; ++c) sum += frame(r, c);
      }
      const double mean = sum / ((r_end - br) * (c_end - bc));
      const double base = q(mean);
      for (int r = br; r < r_end; ++r) {
        for (int c = bc; c < c_end; ++c) {
          out(r, c) = static_cast<float>(std::clamp(base + q(frame(r, c) - mean), 0.0, top));
        }
      }
    }
  }
  return out;
}

std::vector<LumaFrame> freeze(std::span<const LumaFrame> frames, double level,
                              std::uint64_t seed) {
  std::vector<LumaFrame> out(frames.begin(), frames.end());
  const std::size_t n = frames.size();
  if (n < 2) return out;
  const auto length = static_cast<std::size_t>(std::max(1L, std::lround(level)));
  const std::size_t window = std::max<std::size_t>(1, n / 2);
  const std::size_t start = 1 + splitmix64(seed) % window;
  for (std::size_t i = start; i < std::min(n, start + length); ++i) out[i] = frames[start - 1];
  return out;
}

}  // namespace

std::string_view to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kGaussianNoise: return "gaussian-noise";
    case DistortionKind::kGaussianBlur: return "gaussian-blur";
    case DistortionKind::kBlockQuantize: return "block-quantize";
    case DistortionKind::kFrameFreeze: return "frame-freeze";
  }
  return "?";
}

std::optional<DistortionKind> parse_distortion_kind(std::string_view text) {
  for (auto kind : {DistortionKind::kGaussianNoise, DistortionKind::kGaussianBlur,
                    DistortionKind::kBlockQuantize, DistortionKind::kFrameFreeze}) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

std::vector<LumaFrame> make_edge_sequence(int width, int height, bool motion) {
  if (width < 16 || height < 16) {
    throw Error(ErrorCode::kInvalidArgument, "edge sequences need at least 16x16 frames");
  }
  const int thickness = std::max(1, height / 32);
  const int top = height / 4;
  LumaFrame frame0(height, width, kEdgeBackground);
  for (int r = top; r < top + thickness; ++r) {
    for (auto& v : frame0.row(r)) v = kEdgeLine;
  }
  if (!motion) return {frame0, frame0};

  const int shift = height / 8;
  LumaFrame frame1(height, width);
  for (int r = 0; r < height; ++r) {
    const auto src = frame0.row((r - shift + height) % height);
    std::copy(src.begin(), src.end(), frame1.row(r).begin());
  }
  return {std::move(frame0), std::move(frame1)};
}

std::vector<LumaFrame> make_scene_sequence(int width, int height, int frame_count,
                                           std::uint64_t seed) {
  if (width < 1 || height < 1 || frame_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "scene size and length must be positive");
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pi = std::numbers::pi;

  // Background gradient and a low-frequency grating.
  const double grad_angle = 2.0 * pi * unit(rng);
  const double grad_amp = 30.0 + 40.0 * unit(rng);
  const double grating_freq = 1.0 + 4.0 * unit(rng);
  const double grating_angle = 2.0 * pi * unit(rng);
  const double grating_amp = 10.0 + 20.0 * unit(rng);

  // Bilinearly upsampled random lattice for texture.
  const int cell = 4 + static_cast<int>(unit(rng) * 8);
  const int lattice_rows = height / cell + 3;
  const int lattice_cols = width / cell + 3;
  std::vector<double> lattice(static_cast<std::size_t>(lattice_rows) * lattice_cols);
  for (auto& v : lattice) v = unit(rng) - 0.5;
  const double texture_amp = 20.0 + 30.0 * unit(rng);

  struct Blob {
    double r, c, vr, vc, radius_r, radius_c, level;
  };
  std::vector<Blob> blobs(3 + static_cast<int>(unit(rng) * 3));
  for (auto& b : blobs) {
    b.r = unit(rng) * height;
    b.c = unit(rng) * width;
    b.vr = (unit(rng) - 0.5) * 0.08 * height;
    b.vc = (unit(rng) - 0.5) * 0.08 * width;
    b.radius_r = (0.05 + 0.12 * unit(rng)) * height;
    b.radius_c = (0.05 + 0.12 * unit(rng)) * width;
    b.level = unit(rng) < 0.5 ? -60.0 - 40.0 * unit(rng) : 60.0 + 40.0 * unit(rng);
  }
  const double swing_amp = 0.08 + 0.1 * unit(rng);
  const double swing_period = 8.0 + 16.0 * unit(rng);
  const double swing_phase = 2.0 * pi * unit(rng);
  const double pan_r = (unit(rng) - 0.5) * 1.5;
  const double pan_c = (unit(rng) - 0.5) * 1.5;

  const auto texture = [&](double r, double c) {
    const double lr = r / cell + 1.0;
    const double lc = c / cell + 1.0;
    int r0 = std::clamp(static_cast<int>(std::floor(lr)), 0, lattice_rows - 2);
    int c0 = std::clamp(static_cast<int>(std::floor(lc)), 0, lattice_cols - 2);
    const double fr = std::clamp(lr - r0, 0.0, 1.0);
    const double fc = std::clamp(lc - c0, 0.0, 1.0);
    const auto at = [&](int rr, int cc) {
      return lattice[static_cast<std::size_t>(rr) * lattice_cols + cc];
    };
    return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c0 + 1)) +
           fr * ((1 - fc) * at(r0 + 1, c0) + fc * at(r0 + 1, c0 + 1));
  };

  std::vector<LumaFrame> frames;
  frames.reserve(frame_count);
  for (int t = 0; t < frame_count; ++t) {
    const double gain = 1.0 + swing_amp * std::sin(2.0 * pi * t / swing_period + swing_phase);
    LumaFrame frame(height, width);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const double y = static_cast<double>(r) / height - 0.5;
        const double x = static_cast<double>(c) / width - 0.5;
        double v = 128.0 + grad_amp * (x * std::cos(grad_angle) + y * std::sin(grad_angle));
        v += grating_amp * std::sin(2.0 * pi * grating_freq *
                                    (x * std::cos(grating_angle) + y * std::sin(grating_angle)));
        v += texture_amp * texture(r + pan_r * t, c + pan_c * t);
        for (const auto& b : blobs) {
          const double dr = (r - (b.r + b.vr * t)) / b.radius_r;
          const double dc = (c - (b.c + b.vc * t)) / b.radius_c;
          if (dr * dr + dc * dc <= 1.0) v += b.level;
        }
        frame(r, c) = clamp_round(v * gain);
      }
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<LumaFrame> apply_distortion(std::span<const LumaFrame> frames,
                                        const DistortionSpec& spec) {
  if (frames.empty()) throw Error(ErrorCode::kInvalidArgument, "no frames to distort");
  if (!(spec.level > 0.0) || !std::isfinite(spec.level)) {
    throw Error(ErrorCode::kInvalidArgument, "distortion level must be positive");
  }
  switch (spec.kind) {
    case DistortionKind::kGaussianNoise:
      return add_noise(frames, spec.level, spec.seed);
    case DistortionKind::kGaussianBlur: {
      std::vector<LumaFrame> out;
      out.reserve(frames.size());
      for (const auto& f : frames) out.push_back(blur_frame(f, spec.level));
      return out;
    }
    case DistortionKind::kBlockQuantize: {
      std::vector<LumaFrame> out;
      out.reserve(frames.size());
      for (const auto& f : frames) out.push_back(quantize_frame(f, spec.level));
      return out;
    }
    case DistortionKind::kFrameFreeze:
      return freeze(frames, spec.level, spec.seed);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown distortion kind");
}

}  // namespace tsvqa
