#include "tsvqa/video_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include "tsvqa/error.hpp"

namespace tsvqa {

namespace {

std::string size_text(int width, int height) {
  return std::to_string(width) + "x" + std::to_string(height);
}

void check_stream_length(std::size_t length, const VideoDescriptor& desc) {
  if (length % desc.frame_bytes() != 0) {
    throw Error(ErrorCode::kTruncatedStream,
                "stream of " + std::to_string(length) + " bytes is not a whole number of " +
                    size_text(desc.width, desc.height) + " YUV420 frames (" +
                    std::to_string(desc.frame_bytes()) + " bytes each)");
  }
}

LumaFrame decode_luma(const std::uint8_t* src, int width, int height) {
  LumaFrame frame(height, width);
  std::transform(src, src + frame.size(), frame.data(),
                 [](std::uint8_t v) { return static_cast<float>(v); });
  return frame;
}

std::uint8_t to_byte(float v) {
  if (!(v > 0.0f)) return 0;
  if (v >= 255.0f) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

}  // namespace

void VideoDescriptor::validate() const {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame size must be positive, got " + size_text(width, height));
  }
  if (width % 2 != 0 || height % 2 != 0) {
    throw Error(ErrorCode::kOddDimensions,
                "YUV420 needs even width and height, got " + size_text(width, height));
  }
}

VideoDescriptor probe_yuv420(const std::filesystem::path& path, int width, int height) {
  VideoDescriptor desc{width, height, 0};
  desc.validate();
  std::error_code ec;
  const auto length = std::filesystem::file_size(path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError, "cannot stat " + path.string() + ": " + ec.message());
  }
  check_stream_length(static_cast<std::size_t>(length), desc);
  desc.frame_count = static_cast<std::size_t>(length) / desc.frame_bytes();
  return desc;
}

std::vector<LumaFrame> read_yuv420_luma(std::span<const std::uint8_t> bytes, int width,
                                        int height) {
  VideoDescriptor desc{width, height, 0};
  desc.validate();
  check_stream_length(bytes.size(), desc);
  desc.frame_count = bytes.size() / desc.frame_bytes();

  std::vector<LumaFrame> frames;
  frames.reserve(desc.frame_count);
  for (std::size_t f = 0; f < desc.frame_count; ++f) {
    frames.push_back(decode_luma(bytes.data() + f * desc.frame_bytes(), width, height));
  }
  return frames;
}

std::vector<LumaFrame> read_yuv420_luma(std::istream& in, int width, int height) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  return read_yuv420_luma(bytes, width, height);
}

std::vector<LumaFrame> read_yuv420_luma(const std::filesystem::path& path, int width,
                                        int height, std::optional<FrameRange> range) {
  Yuv420Reader reader(path, width, height);
  const std::size_t total = reader.descriptor().frame_count;
  if (!range) return reader.read(0, total);
  if (range->first > range->last || range->last >= total) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame range " + std::to_string(range->first) + ":" +
                    std::to_string(range->last) + " outside video of " +
                    std::to_string(total) + " frames");
  }
  return reader.read(range->first, range->count());
}

void write_yuv420(std::ostream& out, std::span<const LumaFrame> frames) {
  if (frames.empty()) return;
  VideoDescriptor desc{frames.front().cols(), frames.front().rows(), frames.size()};
  desc.validate();

  std::vector<std::uint8_t> buffer(desc.frame_bytes(), 128);
  for (const auto& frame : frames) {
    if (frame.cols() != desc.width || frame.rows() != desc.height) {
      throw Error(ErrorCode::kDimensionMismatch, "frames to write differ in size");
    }
    std::transform(frame.data(), frame.data() + frame.size(), buffer.begin(), to_byte);
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size()));
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed");
}

void write_yuv420(const std::filesystem::path& path, std::span<const LumaFrame> frames) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  write_yuv420(out, frames);
}

Yuv420Reader::Yuv420Reader(const std::filesystem::path& path, int width, int height)
    : path_(path), desc_(probe_yuv420(path, width, height)),
      file_(path, std::ios::binary) {
  if (!file_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
}

std::vector<LumaFrame> Yuv420Reader::read(std::size_t first, std::size_t count) {
  if (first + count > desc_.frame_count) {
    throw Error(ErrorCode::kInvalidArgument,
                "read of frames [" + std::to_string(first) + ", " +
                    std::to_string(first + count) + ") past end of " + path_.string());
  }
  std::vector<LumaFrame> frames;
  frames.reserve(count);
  scratch_.resize(desc_.luma_bytes());
  for (std::size_t f = first; f < first + count; ++f) {
    file_.seekg(static_cast<std::streamoff>(f * desc_.frame_bytes()));
    file_.read(reinterpret_cast<char*>(scratch_.data()),
               static_cast<std::streamsize>(scratch_.size()));
    if (!file_) {
      throw Error(ErrorCode::kIoError, "short read at frame " + std::to_string(f) + " of " +
                                           path_.string());
    }
    frames.push_back(decode_luma(scratch_.data(), desc_.width, desc_.height));
  }
  return frames;
}

std::vector<TensorSpan> tensor_spans(std::size_t frame_count, std::size_t tensor_len,
                                     std::optional<FrameRange> range) {
  if (tensor_len < 2) {
    throw Error(ErrorCode::kInvalidArgument, "tensor length must be at least 2 frames");
  }
  std::size_t begin = 0;
  std::size_t end = frame_count;
  if (range) {
    if (range->first > range->last || range->last >= frame_count) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frame range " + std::to_string(range->first) + ":" +
                      std::to_string(range->last) + " outside sequence of " +
                      std::to_string(frame_count) + " frames");
    }
    begin = range->first;
    end = range->last + 1;
  }
  if (end - begin < 2) {
    throw Error(ErrorCode::kEmptySelection,
                "selection holds " + std::to_string(end - begin) +
                    " frame(s); at least 2 are needed");
  }

  std::vector<TensorSpan> spans;
  for (std::size_t start = begin; start < end; start += tensor_len) {
    const std::size_t stop = std::min(start + tensor_len, end);
    if (stop - start < 2) break;
    spans.push_back({spans.size(), start, stop});
  }
  return spans;
}

std::vector<LumaTensor> group_tensors(std::span<const LumaFrame> frames, std::size_t tensor_len,
                                      std::optional<FrameRange> range) {
  const auto spans = tensor_spans(frames.size(), tensor_len, range);
  std::vector<LumaTensor> tensors;
  tensors.reserve(spans.size());
  for (const auto& span : spans) {
    LumaTensor tensor;
    tensor.index = span.index;
    tensor.first_frame = span.begin;
    tensor.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(span.begin),
                         frames.begin() + static_cast<std::ptrdiff_t>(span.end));
    for (const auto& f : tensor.frames) {
      if (!f.same_shape(tensor.frames.front())) {
        throw Error(ErrorCode::kDimensionMismatch, "frames within a tensor differ in size");
      }
    }
    tensors.push_back(std::move(tensor));
  }
  return tensors;
}

}  // namespace tsvqa
