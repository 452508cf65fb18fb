#include "tsvqa/spectral.hpp"

#include <fftw3.h>

#include <charconv>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include "tsvqa/error.hpp"

namespace tsvqa {

namespace {

// fftw_execute is reentrant; the planner is not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan plan) : plan_(plan) {
    if (plan_ == nullptr) throw Error(ErrorCode::kInvalidArgument, "FFTW could not create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

void check_tensor(std::span<const LumaFrame> frames) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a tensor needs at least 2 frames");
  }
  const auto& first = frames.front();
  if (first.rows() < 1 || first.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "empty frame");
  }
  for (const auto& f : frames) {
    if (!f.same_shape(first)) {
      throw Error(ErrorCode::kDimensionMismatch, "frames within a tensor differ in size");
    }
  }
}

}  // namespace

Spectrum3D dft3(const LumaTensor& tensor) {
  check_tensor(tensor.frames);
  const int rows = tensor.rows();
  const int cols = tensor.cols();
  const int depth = static_cast<int>(tensor.depth());
  const std::size_t n = static_cast<std::size_t>(rows) * cols * depth;

  auto in = fftw_buffer<fftw_complex>(n);
  auto out = fftw_buffer<fftw_complex>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_3d(depth, rows, cols, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  }

  std::size_t i = 0;
  for (const auto& frame : tensor.frames) {
    for (float v : frame.values()) {
      in[i][0] = v;
      in[i][1] = 0.0;
      ++i;
    }
  }
  plan->execute();

  Spectrum3D spectrum(rows, cols, depth);
  auto* dst = spectrum.data();
  for (std::size_t j = 0; j < n; ++j) dst[j] = {out[j][0], out[j][1]};
  return spectrum;
}

Psd3D psd3(const Spectrum3D& spectrum) {
  Psd3D psd(spectrum.rows(), spectrum.cols(), spectrum.depth());
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  auto src = spectrum.values();
  auto dst = psd.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::norm(src[i]) * scale;
  return psd;
}

TpsdPlane tpsd(const Psd3D& psd, bool center) {
  RealPlane plane(psd.rows(), psd.cols(), 0.0);
  for (int l = 0; l < psd.depth(); ++l) {
    for (int h = 0; h < psd.rows(); ++h) {
      for (int k = 0; k < psd.cols(); ++k) plane(h, k) += psd(h, k, l);
    }
  }
  if (center) return {center_dc(plane), true};
  return {std::move(plane), false};
}

TpsdPlane tensor_tpsd(std::span<const LumaFrame> frames, bool center) {
  check_tensor(frames);
  const int rows = frames.front().rows();
  const int cols = frames.front().cols();
  const int depth = static_cast<int>(frames.size());
  const int half_cols = cols / 2 + 1;
  const std::size_t frame_size = static_cast<std::size_t>(rows) * cols;
  const std::size_t half_size = static_cast<std::size_t>(rows) * half_cols;

  auto in = fftw_buffer<double>(frame_size * depth);
  auto out = fftw_buffer<fftw_complex>(half_size * depth);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_3d(depth, rows, cols, in.get(), out.get(), FFTW_ESTIMATE));
  }

  double* dst = in.get();
  for (const auto& frame : frames) {
    for (float v : frame.values()) *dst++ = v;
  }
  plan->execute();

  // Half plane k in [0, cols/2]; the rest follows from conjugate symmetry,
  // which makes the time-summed power point-symmetric in (h, k).
  const double scale = 1.0 / (static_cast<double>(frame_size) * depth);
  RealPlane plane(rows, cols, 0.0);
  for (int l = 0; l < depth; ++l) {
    const fftw_complex* slice = out.get() + static_cast<std::size_t>(l) * half_size;
    for (int h = 0; h < rows; ++h) {
      const fftw_complex* line = slice + static_cast<std::size_t>(h) * half_cols;
      auto row = plane.row(h);
      for (int k = 0; k < half_cols; ++k) {
        row[k] += (line[k][0] * line[k][0] + line[k][1] * line[k][1]) * scale;
      }
    }
  }
  for (int h = 0; h < rows; ++h) {
    const int mirror_h = (rows - h) % rows;
    for (int k = half_cols; k < cols; ++k) plane(h, k) = plane(mirror_h, cols - k);
  }

  if (center) return {center_dc(plane), true};
  return {std::move(plane), false};
}

RealPlane center_dc(const RealPlane& plane) {
  const int rows = plane.rows();
  const int cols = plane.cols();
  RealPlane shifted(rows, cols);
  const int dr = rows / 2;
  const int dc = cols / 2;
  for (int h = 0; h < rows; ++h) {
    const int th = (h + dr) % rows;
    for (int k = 0; k < cols; ++k) shifted(th, (k + dc) % cols) = plane(h, k);
  }
  return shifted;
}

void write_grid(std::ostream& out, const RealPlane& plane) {
  out << plane.rows() << ' ' << plane.cols() << '\n';
  char buf[32];
  for (int r = 0; r < plane.rows(); ++r) {
    auto row = plane.row(r);
    for (int c = 0; c < plane.cols(); ++c) {
      auto res = std::to_chars(buf, buf + sizeof(buf), row[c]);
      if (c > 0) out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "grid write failed");
}

RealPlane read_grid(std::istream& in) {
  int rows = 0;
  int cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw Error(ErrorCode::kInvalidArgument, "malformed grid header");
  }
  RealPlane plane(rows, cols);
  for (auto& v : plane.values()) {
    std::string token;
    if (!(in >> token)) throw Error(ErrorCode::kTruncatedStream, "grid ended early");
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad grid value '" + token + "'");
    }
  }
  return plane;
}

}  // namespace tsvqa
