#include "convspectra/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace convspectra {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::KernelLargerThanInput: return "KernelLargerThanInput";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ChannelCountNotOne: return "ChannelCountNotOne";
    case ErrorCode::BadSupport: return "BadSupport";
    case ErrorCode::SizeGuard: return "SizeGuard";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ImaginaryResidual: return "ImaginaryResidual";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::WrongRank: return "WrongRank";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

namespace {

void check_shape(const KernelShape& s) {
  if (s.k_h == 0 || s.k_w == 0 || s.m_out == 0 || s.m_in == 0) {
    std::ostringstream os;
    os << "kernel dimensions must be >= 1, got (" << s.k_h << ", " << s.k_w << ", " << s.m_out
       << ", " << s.m_in << ")";
    throw Error(ErrorCode::InvalidShape, os.str());
  }
}

}  // namespace

Kernel4D::Kernel4D(KernelShape shape) : shape_(shape) {
  check_shape(shape_);
  data_.assign(shape_.size(), 0.0);
}

Kernel4D::Kernel4D(KernelShape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "kernel payload has " + std::to_string(data_.size()) +
                                              " entries, shape needs " +
                                              std::to_string(shape_.size()));
  }
}

Kernel4D Kernel4D::identity(std::size_t channels) {
  Kernel4D k({1, 1, channels, channels});
  for (std::size_t c = 0; c < channels; ++c) k(0, 0, c, c) = 1.0;
  return k;
}

double Kernel4D::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double Kernel4D::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool Kernel4D::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Spectrum make_spectrum(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  return Spectrum{std::move(values)};
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeMismatch, "matrix payload size does not match rows * cols");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

double ComplexMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "matrix product inner dimension");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix difference shapes");
  ComplexMatrix out = a;
  auto o = out.entries();
  auto be = b.entries();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= be[i];
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

SpectrumReport make_report(std::string layer_name, Spectrum spectrum) {
  SpectrumReport report;
  report.layer_name = std::move(layer_name);
  report.operator_norm = spectrum.max();
  const std::size_t n = spectrum.count();
  report.ratios.resize(n);
  report.normalized_rank_axis.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.ratios[i] = report.operator_norm > 0.0 ? spectrum.values[i] / report.operator_norm : 0.0;
    report.normalized_rank_axis[i] = static_cast<double>(i) / static_cast<double>(n);
  }
  report.spectrum = std::move(spectrum);
  return report;
}

void validate_pair(const Kernel4D& kernel, const FeatureShape& shape) {
  if (shape.n_h == 0 || shape.n_w == 0) {
    throw Error(ErrorCode::InvalidShape, "input shape dimensions must be >= 1");
  }
  if (kernel.k_h() > shape.n_h || kernel.k_w() > shape.n_w) {
    std::ostringstream os;
    os << "kernel support " << kernel.k_h() << "x" << kernel.k_w() << " exceeds input shape "
       << shape.n_h << "x" << shape.n_w;
    throw Error(ErrorCode::KernelLargerThanInput, os.str());
  }
  if (!kernel.all_finite()) {
    throw Error(ErrorCode::NonFiniteEntry, "kernel contains NaN or infinite entries");
  }
}

Kernel4D random_normal_kernel(KernelShape shape, std::uint64_t seed) {
  Kernel4D k(shape);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : k.data()) x = normal(rng);
  return k;
}

Kernel4D zero_pad(const Kernel4D& kernel, const FeatureShape& shape) {
  validate_pair(kernel, shape);
  Kernel4D out({shape.n_h, shape.n_w, kernel.m_out(), kernel.m_in()});
  const std::size_t row = kernel.k_w() * kernel.m_out() * kernel.m_in();
  const std::size_t out_row = shape.n_w * kernel.m_out() * kernel.m_in();
  auto src = kernel.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < kernel.k_h(); ++p) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(p * row), row,
                dst.begin() + static_cast<std::ptrdiff_t>(p * out_row));
  }
  return out;
}

}  // namespace convspectra
