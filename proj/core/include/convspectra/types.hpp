#pragma once

// Shared value types for convolutional-layer spectra.
//
// Kernel layout is [h, w, out, in]: element (p, q, c, d) is the weight that
// input channel d at spatial offset (p, q) contributes to output channel c.
// All core arithmetic is double precision.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace convspectra {

using Complex = std::complex<double>;

enum class ErrorCode {
  KernelLargerThanInput,
  NonFiniteEntry,
  InvalidShape,
  InvalidArgument,
  ShapeMismatch,
  ChannelCountNotOne,
  BadSupport,
  SizeGuard,
  NoConvergence,
  ImaginaryResidual,
  UnsupportedDtype,
  UnsupportedOrder,
  BadHeader,
  WrongRank,
  IoFailure,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct KernelShape {
  std::size_t k_h = 0;
  std::size_t k_w = 0;
  std::size_t m_out = 0;
  std::size_t m_in = 0;

  std::size_t size() const noexcept { return k_h * k_w * m_out * m_in; }
  friend bool operator==(const KernelShape&, const KernelShape&) = default;
};

/// Real 4D filter tensor, C-contiguous in [h, w, out, in] order.
class Kernel4D {
 public:
  Kernel4D() = default;
  /// Zero-filled kernel. Throws InvalidShape if any dimension is zero.
  explicit Kernel4D(KernelShape shape);
  /// Takes ownership of `data`; its length must equal shape.size().
  Kernel4D(KernelShape shape, std::vector<double> data);

  /// Kernel with a 1x1 support whose single tap is the identity mixing
  /// matrix (m channels in and out).
  static Kernel4D identity(std::size_t channels);

  const KernelShape& shape() const noexcept { return shape_; }
  std::size_t k_h() const noexcept { return shape_.k_h; }
  std::size_t k_w() const noexcept { return shape_.k_w; }
  std::size_t m_out() const noexcept { return shape_.m_out; }
  std::size_t m_in() const noexcept { return shape_.m_in; }

  std::size_t index(std::size_t p, std::size_t q, std::size_t c, std::size_t d) const noexcept {
    return ((p * shape_.k_w + q) * shape_.m_out + c) * shape_.m_in + d;
  }
  double operator()(std::size_t p, std::size_t q, std::size_t c, std::size_t d) const noexcept {
    return data_[index(p, q, c, d)];
  }
  double& operator()(std::size_t p, std::size_t q, std::size_t c, std::size_t d) noexcept {
    return data_[index(p, q, c, d)];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const Kernel4D&, const Kernel4D&) = default;

 private:
  KernelShape shape_{};
  std::vector<double> data_;
};

struct FeatureShape {
  std::size_t n_h = 0;
  std::size_t n_w = 0;

  std::size_t area() const noexcept { return n_h * n_w; }
  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

/// Multiset of singular values, sorted descending.
struct Spectrum {
  std::vector<double> values;

  std::size_t count() const noexcept { return values.size(); }
  double max() const noexcept { return values.empty() ? 0.0 : values.front(); }
};

/// Sorts descending and returns the result as a Spectrum.
Spectrum make_spectrum(std::vector<double> values);

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  std::span<const Complex> entries() const noexcept { return data_; }
  std::span<Complex> entries() noexcept { return data_; }

  /// Conjugate transpose.
  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  double max_abs() const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

/// Entrywise max-abs distance between two equally shaped matrices.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Per-layer spectrum plus the derived series used for plotting.
struct SpectrumReport {
  std::string layer_name;
  Spectrum spectrum;
  double operator_norm = 0.0;
  std::vector<double> ratios;                // values[i] / values[0], 0 when values[0] == 0
  std::vector<double> normalized_rank_axis;  // i / count
};

SpectrumReport make_report(std::string layer_name, Spectrum spectrum);

/// Throws KernelLargerThanInput or NonFiniteEntry.
void validate_pair(const Kernel4D& kernel, const FeatureShape& shape);

/// Kernel with i.i.d. standard normal entries from a seeded mt19937_64.
Kernel4D random_normal_kernel(KernelShape shape, std::uint64_t seed);

/// Embeds the kernel's support in the leading corner of an (n_h, n_w) grid.
Kernel4D zero_pad(const Kernel4D& kernel, const FeatureShape& shape);

}  // namespace convspectra
