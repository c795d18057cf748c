#include "convspectra/fourier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "convspectra/parallel.hpp"

namespace convspectra {

namespace {

bool is_pow2(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

double sign_of(Direction d) noexcept { return d == Direction::Forward ? -1.0 : 1.0; }

// exp(sign * 2 pi i * k / n) with the exponent reduced mod n first, which
// keeps the angle small and the twiddles accurate for large k.
Complex root(double sign, std::size_t k, std::size_t n) {
  const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k % n) /
                       static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

// Bluestein: X_k = conj(w_k) * sum_j (x_j conj(w_j)) w_{k-j}, with
// w_j = exp(-sign * pi i j^2 / n). The sum is a linear convolution computed
// with a power-of-two FFT of length >= 2n - 1.
struct DftPlan::Bluestein {
  std::vector<Complex> chirp;          // conj(w_j), j < n
  std::vector<Complex> filter_fft;     // FFT of the wrapped w sequence
  std::unique_ptr<DftPlan> forward;
  std::unique_ptr<DftPlan> inverse;
};

DftPlan::DftPlan(std::size_t length, Direction direction) : length_(length), direction_(direction) {
  if (length == 0) throw Error(ErrorCode::InvalidArgument, "DFT length must be >= 1");
  const double sign = sign_of(direction);

  if (is_pow2(length)) {
    twiddles_.resize(length / 2);
    for (std::size_t k = 0; k < length / 2; ++k) twiddles_[k] = root(sign, k, length);
    bitrev_.resize(length);
    const int bits = std::countr_zero(length);
    for (std::size_t i = 0; i < length; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      bitrev_[i] = r;
    }
    return;
  }

  auto bs = std::make_unique<Bluestein>();
  const std::size_t m = std::bit_ceil(2 * length - 1);
  bs->forward = std::make_unique<DftPlan>(m, Direction::Forward);
  bs->inverse = std::make_unique<DftPlan>(m, Direction::Inverse);

  // j^2 mod 2n keeps the chirp angle exact for large j.
  const std::size_t two_n = 2 * length;
  bs->chirp.resize(length);
  std::vector<Complex> w(m, Complex{});
  for (std::size_t j = 0; j < length; ++j) {
    const std::size_t j2 = (j * j) % two_n;
    const Complex wj = root(-sign, j2, two_n);  // exp(-sign * pi i j^2 / n)
    bs->chirp[j] = std::conj(wj);
    w[j] = wj;
    if (j != 0) w[m - j] = wj;
  }
  bs->forward->execute(w);
  bs->filter_fft = std::move(w);
  bluestein_ = std::move(bs);
}

DftPlan::~DftPlan() = default;
DftPlan::DftPlan(DftPlan&&) noexcept = default;
DftPlan& DftPlan::operator=(DftPlan&&) noexcept = default;

void DftPlan::radix2(std::span<Complex> a) const {
  const std::size_t n = length_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = bitrev_[i];
    if (i < r) std::swap(a[i], a[r]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex t = twiddles_[k * step] * a[start + k + half];
        const Complex u = a[start + k];
        a[start + k] = u + t;
        a[start + k + half] = u - t;
      }
    }
  }
}

void DftPlan::execute(std::span<Complex> data) const {
  if (data.size() != length_) throw Error(ErrorCode::ShapeMismatch, "DFT input length mismatch");
  const std::size_t n = length_;

  if (!bluestein_) {
    radix2(data);
  } else {
    const auto& bs = *bluestein_;
    const std::size_t m = bs.filter_fft.size();
    std::vector<Complex> buf(m, Complex{});
    for (std::size_t j = 0; j < n; ++j) buf[j] = data[j] * bs.chirp[j];
    bs.forward->execute(buf);
    for (std::size_t k = 0; k < m; ++k) buf[k] *= bs.filter_fft[k];
    bs.inverse->execute(buf);
    for (std::size_t k = 0; k < n; ++k) data[k] = buf[k] * bs.chirp[k];
  }

  if (direction_ == Direction::Inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : data) z *= scale;
  }
}

namespace {

void dft2_inplace(Complex* grid, std::size_t n_h, std::size_t n_w, std::size_t stride,
                  const DftPlan& rows, const DftPlan& cols, std::vector<Complex>& scratch) {
  // rows: transform along w; cols: transform along h. `stride` is the
  // distance between consecutive grid cells in memory.
  scratch.resize(std::max(n_h, n_w));
  for (std::size_t p = 0; p < n_h; ++p) {
    std::span<Complex> line(scratch.data(), n_w);
    for (std::size_t q = 0; q < n_w; ++q) line[q] = grid[(p * n_w + q) * stride];
    rows.execute(line);
    for (std::size_t q = 0; q < n_w; ++q) grid[(p * n_w + q) * stride] = line[q];
  }
  for (std::size_t q = 0; q < n_w; ++q) {
    std::span<Complex> line(scratch.data(), n_h);
    for (std::size_t p = 0; p < n_h; ++p) line[p] = grid[(p * n_w + q) * stride];
    cols.execute(line);
    for (std::size_t p = 0; p < n_h; ++p) grid[(p * n_w + q) * stride] = line[p];
  }
}

ComplexTensor4 batch_transform(ComplexTensor4 out, Direction direction) {
  const auto& s = out.shape;
  const DftPlan rows(s.k_w, direction);
  const DftPlan cols(s.k_h, direction);
  const std::size_t pairs = s.m_out * s.m_in;
  parallel_for(pairs, [&](std::size_t pair) {
    std::vector<Complex> scratch;
    dft2_inplace(out.data.data() + pair, s.k_h, s.k_w, pairs, rows, cols, scratch);
  });
  return out;
}

}  // namespace

ComplexGrid dft2(const ComplexGrid& grid, Direction direction) {
  if (grid.n_h == 0 || grid.n_w == 0 || grid.data.size() != grid.n_h * grid.n_w)
    throw Error(ErrorCode::ShapeMismatch, "dft2 grid dimensions");
  ComplexGrid out = grid;
  const DftPlan rows(grid.n_w, direction);
  const DftPlan cols(grid.n_h, direction);
  std::vector<Complex> scratch;
  dft2_inplace(out.data.data(), grid.n_h, grid.n_w, 1, rows, cols, scratch);
  return out;
}

ComplexTensor4 batch_dft2_kernel(const Kernel4D& padded) {
  ComplexTensor4 t;
  t.shape = padded.shape();
  t.data.assign(padded.data().begin(), padded.data().end());
  return batch_transform(std::move(t), Direction::Forward);
}

ComplexTensor4 batch_idft2(const ComplexTensor4& bins) {
  return batch_transform(bins, Direction::Inverse);
}

ComplexMatrix build_f_matrix(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "F matrix size must be >= 1");
  ComplexMatrix f(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) f(i, j) = root(1.0, (i * j) % n, n);
  return f;
}

}  // namespace convspectra
