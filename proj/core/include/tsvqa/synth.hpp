#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tsvqa/video_io.hpp"

namespace tsvqa {

enum class DistortionKind {
  kGaussianNoise,  // level: noise sigma in luma steps
  kGaussianBlur,   // level: blur sigma in pixels
  kBlockQuantize,  // level: quantizer step in luma steps
  kFrameFreeze,    // level: frozen frame count
};

std::string_view to_string(DistortionKind kind);
std::optional<DistortionKind> parse_distortion_kind(std::string_view text);

struct DistortionSpec {
  DistortionKind kind = DistortionKind::kGaussianNoise;
  double level = 1.0;
  std::uint64_t seed = 0;
};

inline constexpr float kEdgeBackground = 16.0f;
inline constexpr float kEdgeLine = 235.0f;

// Two frames holding one bright horizontal line on a dark background. With
// motion the line in frame 1 moves down by height/8 rows (circularly);
// without it frame 1 is a copy of frame 0.
std::vector<LumaFrame> make_edge_sequence(int width, int height, bool motion);

// Textured moving scene: gradient background, band-limited texture, a few
// objects drifting across the frame and a slow global brightness swing.
// Deterministic in seed; samples are integers in [0, 255].
std::vector<LumaFrame> make_scene_sequence(int width, int height, int frame_count,
                                           std::uint64_t seed);

// Deterministic in spec. Outputs are clamped to [0, 255]; noise and blur
// outputs are rounded to integers. For a fixed seed, higher levels reuse the
// same noise field and freeze position, so severity grows with level.
std::vector<LumaFrame> apply_distortion(std::span<const LumaFrame> frames,
                                        const DistortionSpec& spec);

}  // namespace tsvqa
