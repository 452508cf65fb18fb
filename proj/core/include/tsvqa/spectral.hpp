#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "tsvqa/plane.hpp"
#include "tsvqa/video_io.hpp"

namespace tsvqa {

// rows x cols x depth array indexed (h, k, l): h over rows, k over columns,
// l over time. Stored frame-major so each temporal slice is contiguous.
template <typename T>
class Volume {
 public:
  Volume() = default;
  Volume(int rows, int cols, int depth)
      : rows_(rows), cols_(cols), depth_(depth),
        data_(static_cast<std::size_t>(rows) * cols * depth) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int h, int k, int l) noexcept { return data_[offset(h, k, l)]; }
  const T& operator()(int h, int k, int l) const noexcept { return data_[offset(h, k, l)]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

 private:
  std::size_t offset(int h, int k, int l) const noexcept {
    return (static_cast<std::size_t>(l) * rows_ + h) * cols_ + k;
  }

  int rows_ = 0;
  int cols_ = 0;
  int depth_ = 0;
  std::vector<T> data_;
};

using Spectrum3D = Volume<std::complex<double>>;
using Psd3D = Volume<double>;

// Time-aggregated power spectral density of one tensor.
struct TpsdPlane {
  RealPlane values;
  bool dc_centered = false;
};

// Forward, unnormalized 3D DFT:
//   X[h,k,l] = sum_{m,n,o} x[m,n,o] exp(-2 pi i (hm/M + kn/N + lo/O)).
Spectrum3D dft3(const LumaTensor& tensor);

// S[h,k,l] = |X[h,k,l]|^2 / (M N O).
Psd3D psd3(const Spectrum3D& spectrum);

// Sums the PSD over all temporal bins. With center_dc the zero-frequency bin
// is moved to (rows/2, cols/2).
TpsdPlane tpsd(const Psd3D& psd, bool center_dc);

// Same result as tpsd(psd3(dft3(frames)), center_dc), computed from a
// real-to-complex transform without materializing the full spectrum. This is
// the path the metric uses.
TpsdPlane tensor_tpsd(std::span<const LumaFrame> frames, bool center_dc);

// Circular shift moving index (0, 0) to (rows/2, cols/2).
RealPlane center_dc(const RealPlane& plane);

// Text grid: "rows cols" on the first line, then one line per row of
// space-separated values printed with round-trip precision.
void write_grid(std::ostream& out, const RealPlane& plane);
RealPlane read_grid(std::istream& in);

}  // namespace tsvqa
