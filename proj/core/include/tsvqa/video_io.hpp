#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tsvqa/plane.hpp"

namespace tsvqa {

// Luma samples are stored as float: every 8-bit value and every synthetic
// distortion output is exactly representable, at half the memory of double.
using LumaFrame = Plane<float>;

struct VideoDescriptor {
  int width = 0;
  int height = 0;
  std::size_t frame_count = 0;

  std::size_t luma_bytes() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  // Luma plane plus two quarter-size chroma planes.
  std::size_t frame_bytes() const noexcept { return luma_bytes() * 3 / 2; }

  // Throws kInvalidArgument for non-positive sizes, kOddDimensions for odd ones.
  void validate() const;

  friend bool operator==(const VideoDescriptor&, const VideoDescriptor&) = default;
};

// Inclusive frame index range [first, last].
struct FrameRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t count() const noexcept { return last >= first ? last - first + 1 : 0; }

  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

// One group of consecutive luma frames, the unit of spectral analysis.
struct LumaTensor {
  std::vector<LumaFrame> frames;
  std::size_t index = 0;
  // Position of frames[0] in the source video.
  std::size_t first_frame = 0;

  std::size_t depth() const noexcept { return frames.size(); }
  int rows() const noexcept { return frames.empty() ? 0 : frames.front().rows(); }
  int cols() const noexcept { return frames.empty() ? 0 : frames.front().cols(); }
};

// [begin, end) frame indices of one tensor.
struct TensorSpan {
  std::size_t index = 0;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t depth() const noexcept { return end - begin; }
};

// Descriptor for a YUV420 file of the given frame size; frame_count is
// derived from the file length.
VideoDescriptor probe_yuv420(const std::filesystem::path& path, int width, int height);

// Decodes the luma planes of a whole in-memory YUV420 stream.
std::vector<LumaFrame> read_yuv420_luma(std::span<const std::uint8_t> bytes, int width,
                                        int height);
std::vector<LumaFrame> read_yuv420_luma(std::istream& in, int width, int height);
std::vector<LumaFrame> read_yuv420_luma(const std::filesystem::path& path, int width,
                                        int height,
                                        std::optional<FrameRange> range = std::nullopt);

// Writes frames as YUV420 with both chroma planes set to 128. Samples are
// rounded and clamped to [0, 255].
void write_yuv420(std::ostream& out, std::span<const LumaFrame> frames);
void write_yuv420(const std::filesystem::path& path, std::span<const LumaFrame> frames);

// Random-access luma reader over a YUV420 file. Reads are sequential per
// call; one reader must not be shared between threads.
class Yuv420Reader {
 public:
  Yuv420Reader(const std::filesystem::path& path, int width, int height);

  const VideoDescriptor& descriptor() const noexcept { return desc_; }

  // Frames [first, first + count).
  std::vector<LumaFrame> read(std::size_t first, std::size_t count);

 private:
  std::filesystem::path path_;
  VideoDescriptor desc_;
  std::ifstream file_;
  std::vector<std::uint8_t> scratch_;
};

// Splits the selected frames into consecutive non-overlapping tensors of
// tensor_len frames. A trailing group of two or more frames keeps its actual
// depth; a single trailing frame is dropped.
std::vector<TensorSpan> tensor_spans(std::size_t frame_count, std::size_t tensor_len,
                                     std::optional<FrameRange> range = std::nullopt);

std::vector<LumaTensor> group_tensors(std::span<const LumaFrame> frames, std::size_t tensor_len,
                                      std::optional<FrameRange> range = std::nullopt);

}  // namespace tsvqa
