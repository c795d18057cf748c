#include "convspectra/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "convspectra/fourier.hpp"
#include "convspectra/svd.hpp"

namespace convspectra::oracle {

namespace {

void guard(std::size_t rows, std::size_t cols, const Limits& limits) {
  if (limits.force) return;
  if (rows > limits.max_dimension || cols > limits.max_dimension) {
    std::ostringstream os;
    os << "dense matrix would be " << rows << "x" << cols << ", above the oracle cap of "
       << limits.max_dimension << " (use force to override)";
    throw Error(ErrorCode::SizeGuard, os.str());
  }
}

// Writes the doubly block circulant matrix of channel pair (c, d) into
// `out` at block offset (row0, col0).
void place_doubly_block_circulant(const Kernel4D& padded, std::size_t c, std::size_t d,
                                  DenseMatrix& out, std::size_t row0, std::size_t col0) {
  const std::size_t nh = padded.k_h();
  const std::size_t nw = padded.k_w();
  for (std::size_t bj = 0; bj < nw; ++bj) {
    for (std::size_t bk = 0; bk < nw; ++bk) {
      const std::size_t q = (bk + nw - bj) % nw;
      for (std::size_t i = 0; i < nh; ++i) {
        for (std::size_t ii = 0; ii < nh; ++ii) {
          const std::size_t p = (ii + nh - i) % nh;
          out(row0 + bj * nh + i, col0 + bk * nh + ii) = padded(p, q, c, d);
        }
      }
    }
  }
}

}  // namespace

std::vector<double> DenseMatrix::apply(const std::vector<double>& x) const {
  if (x.size() != cols_) throw Error(ErrorCode::ShapeMismatch, "matrix-vector size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    const double* row = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

ComplexMatrix DenseMatrix::to_complex() const {
  return ComplexMatrix(rows_, cols_, std::vector<Complex>(data_.begin(), data_.end()));
}

std::vector<double> vec(const FeatureMap& x) {
  std::vector<double> out(x.data.size());
  const std::size_t area = x.n_h * x.n_w;
  for (std::size_t d = 0; d < x.channels; ++d)
    for (std::size_t i = 0; i < x.n_h; ++i)
      for (std::size_t j = 0; j < x.n_w; ++j) out[d * area + j * x.n_h + i] = x(d, i, j);
  return out;
}

DenseMatrix circulant(const std::vector<double>& row) {
  const std::size_t n = row.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "circulant of an empty row");
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row[(j + n - i) % n];
  return m;
}

DenseMatrix build_doubly_block_circulant(const Kernel4D& padded) {
  if (padded.m_out() != 1 || padded.m_in() != 1)
    throw Error(ErrorCode::ChannelCountNotOne, "doubly block circulant needs a single-channel filter");
  const std::size_t dim = padded.k_h() * padded.k_w();
  DenseMatrix a(dim, dim);
  place_doubly_block_circulant(padded, 0, 0, a, 0, 0);
  return a;
}

DenseMatrix build_full_matrix(const Kernel4D& kernel, const FeatureShape& shape, const Limits& limits) {
  validate_pair(kernel, shape);
  const std::size_t area = shape.area();
  const std::size_t rows = area * kernel.m_out();
  const std::size_t cols = area * kernel.m_in();
  guard(rows, cols, limits);

  const Kernel4D padded = zero_pad(kernel, shape);
  DenseMatrix m(rows, cols);
  for (std::size_t c = 0; c < kernel.m_out(); ++c)
    for (std::size_t d = 0; d < kernel.m_in(); ++d)
      place_doubly_block_circulant(padded, c, d, m, c * area, d * area);
  return m;
}

FeatureMap convolve_direct(const Kernel4D& kernel, const FeatureMap& x) {
  validate_pair(kernel, {x.n_h, x.n_w});
  if (x.channels != kernel.m_in() || x.data.size() != x.channels * x.n_h * x.n_w)
    throw Error(ErrorCode::ShapeMismatch, "input channel count does not match the kernel");

  FeatureMap y(kernel.m_out(), x.n_h, x.n_w);
  for (std::size_t c = 0; c < kernel.m_out(); ++c)
    for (std::size_t r = 0; r < x.n_h; ++r)
      for (std::size_t s = 0; s < x.n_w; ++s) {
        double acc = 0.0;
        for (std::size_t d = 0; d < kernel.m_in(); ++d)
          for (std::size_t p = 0; p < kernel.k_h(); ++p)
            for (std::size_t q = 0; q < kernel.k_w(); ++q)
              acc += x(d, (r + p) % x.n_h, (s + q) % x.n_w) * kernel(p, q, c, d);
        y(c, r, s) = acc;
      }
  return y;
}

StructureReport check_structure(const Kernel4D& padded, double tolerance, const Limits& limits) {
  const std::size_t nh = padded.k_h();
  const std::size_t nw = padded.k_w();
  guard(nh * nw, nh * nw, limits);

  const ComplexMatrix a = build_doubly_block_circulant(padded).to_complex();
  const ComplexMatrix at = a.transpose();

  // Q = (F_w kron F_h) / sqrt(n_h n_w), matching the column-stacked vec.
  const ComplexMatrix fh = build_f_matrix(nh);
  const ComplexMatrix fw = build_f_matrix(nw);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nh * nw));
  ComplexMatrix q(nh * nw, nh * nw);
  for (std::size_t j = 0; j < nw; ++j)
    for (std::size_t jj = 0; jj < nw; ++jj)
      for (std::size_t i = 0; i < nh; ++i)
        for (std::size_t ii = 0; ii < nh; ++ii) q(j * nh + i, jj * nh + ii) = fw(j, jj) * fh(i, ii) * scale;
  const ComplexMatrix qh = q.adjoint();

  StructureReport report;
  report.normal_residual = max_abs_diff(a * at, at * a);
  report.unitary_residual = max_abs_diff(q * qh, ComplexMatrix::identity(nh * nw));

  const ComplexMatrix d = qh * a * q;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (r == c)
        report.eigs.push_back(d(r, c));
      else
        report.off_diagonal_residual = std::max(report.off_diagonal_residual, std::abs(d(r, c)));
    }
  }
  report.is_normal = report.normal_residual <= tolerance;
  report.q_unitary = report.unitary_residual <= tolerance;
  report.q_diagonalizes = report.off_diagonal_residual <= tolerance;
  return report;
}

Spectrum dense_spectrum(const Kernel4D& kernel, const FeatureShape& shape, const Limits& limits,
                        DenseBackend backend) {
  return make_spectrum(dense_singular_values(build_full_matrix(kernel, shape, limits), backend));
}

double max_relative_deviation(const Spectrum& a, const Spectrum& b) {
  if (a.count() != b.count())
    throw Error(ErrorCode::ShapeMismatch, "spectra have different sizes: " + std::to_string(a.count()) +
                                              " vs " + std::to_string(b.count()));
  const double scale = std::max(a.max(), b.max());
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.count(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst / scale;
}

}  // namespace convspectra::oracle
