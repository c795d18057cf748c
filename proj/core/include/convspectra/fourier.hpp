#pragma once

// Discrete Fourier transforms over complex data.
//
// Forward transforms use the kernel exp(-2*pi*i*j*k/n); inverse transforms
// use exp(+2*pi*i*j*k/n) and carry the 1/n normalization. Power-of-two
// lengths run an iterative radix-2 FFT, other lengths go through
// Bluestein's chirp-z reduction to a power-of-two convolution.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "convspectra/types.hpp"

namespace convspectra {

enum class Direction { Forward, Inverse };

/// Precomputed 1D transform of a fixed length and direction. Immutable after
/// construction and safe to share between threads.
class DftPlan {
 public:
  DftPlan(std::size_t length, Direction direction);
  ~DftPlan();
  DftPlan(DftPlan&&) noexcept;
  DftPlan& operator=(DftPlan&&) noexcept;

  std::size_t length() const noexcept { return length_; }
  Direction direction() const noexcept { return direction_; }

  /// In-place transform of `data` (length() entries). Inverse plans scale
  /// by 1/length().
  void execute(std::span<Complex> data) const;

 private:
  struct Bluestein;

  void radix2(std::span<Complex> data) const;

  std::size_t length_;
  Direction direction_;
  std::vector<Complex> twiddles_;    // radix-2 twiddles, length_/2 entries
  std::vector<std::size_t> bitrev_;  // radix-2 permutation
  std::unique_ptr<Bluestein> bluestein_;
};

/// Row-major complex grid.
struct ComplexGrid {
  std::size_t n_h = 0;
  std::size_t n_w = 0;
  std::vector<Complex> data;

  Complex operator()(std::size_t u, std::size_t v) const noexcept { return data[u * n_w + v]; }
  Complex& operator()(std::size_t u, std::size_t v) noexcept { return data[u * n_w + v]; }
};

/// 2D transform: forward output[u, v] = sum_{p,q} e^{-2 pi i (u p / n_h + v q / n_w)} grid[p, q].
ComplexGrid dft2(const ComplexGrid& grid, Direction direction);

/// Complex tensor with the same [h, w, out, in] layout as Kernel4D.
struct ComplexTensor4 {
  KernelShape shape{};
  std::vector<Complex> data;

  std::size_t index(std::size_t u, std::size_t v, std::size_t c, std::size_t d) const noexcept {
    return ((u * shape.k_w + v) * shape.m_out + c) * shape.m_in + d;
  }
  Complex operator()(std::size_t u, std::size_t v, std::size_t c, std::size_t d) const noexcept {
    return data[index(u, v, c, d)];
  }
  Complex& operator()(std::size_t u, std::size_t v, std::size_t c, std::size_t d) noexcept {
    return data[index(u, v, c, d)];
  }
};

/// Forward 2D transform over the spatial axes of a padded kernel, one
/// transform per (out, in) channel pair. Pairs run on the worker pool.
ComplexTensor4 batch_dft2_kernel(const Kernel4D& padded);

/// Inverse of batch_dft2_kernel applied to a complex tensor; returns the
/// complex result (callers decide how to treat imaginary parts).
ComplexTensor4 batch_idft2(const ComplexTensor4& bins);

/// n x n matrix with entry (i, j) = w^{ij}, w = exp(+2 pi i / n).
ComplexMatrix build_f_matrix(std::size_t n);

}  // namespace convspectra
