#pragma once

// Brute-force reference path: explicit circulant / doubly block circulant /
// multi-channel block matrices, convolution by its defining loop, and dense
// SVD of the assembled matrix. Cost grows like (n_h n_w m)^3, so matrix
// builders refuse dimensions above a configurable cap.
//
// Vectorization convention: within a channel, vec stacks the columns of the
// n_h x n_w grid (cell (i, j) lands at j * n_h + i); channels are then
// concatenated in index order.

#include <cstddef>
#include <vector>

#include "convspectra/types.hpp"

namespace convspectra::oracle {

inline constexpr std::size_t kDefaultMaxDimension = 4096;

struct Limits {
  std::size_t max_dimension = kDefaultMaxDimension;
  bool force = false;
};

/// Dense real matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  std::vector<double> apply(const std::vector<double>& x) const;
  DenseMatrix transpose() const;
  ComplexMatrix to_complex() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Multi-channel feature map, indexed (channel, row, column), row-major.
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t n_h = 0;
  std::size_t n_w = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(std::size_t channels, std::size_t n_h, std::size_t n_w)
      : channels(channels), n_h(n_h), n_w(n_w), data(channels * n_h * n_w, 0.0) {}

  double operator()(std::size_t d, std::size_t i, std::size_t j) const noexcept {
    return data[(d * n_h + i) * n_w + j];
  }
  double& operator()(std::size_t d, std::size_t i, std::size_t j) noexcept {
    return data[(d * n_h + i) * n_w + j];
  }
};

/// Column-stacked vectorization (see header comment).
std::vector<double> vec(const FeatureMap& x);

/// Entry (i, j) = row[(j - i) mod n].
DenseMatrix circulant(const std::vector<double>& row);

/// Matrix of single-channel circular convolution with an (n_h, n_w, 1, 1)
/// padded filter: block (J, J') is circulant(K[:, (J' - J) mod n_w]).
DenseMatrix build_doubly_block_circulant(const Kernel4D& padded);

/// The (n_h n_w m_out) x (n_h n_w m_in) layer matrix; block (c, d) is the
/// doubly block circulant matrix of channel pair (c, d). Throws SizeGuard
/// when either dimension exceeds the cap and limits.force is false.
DenseMatrix build_full_matrix(const Kernel4D& kernel, const FeatureShape& shape, const Limits& limits = {});

/// Y[c, r, s] = sum_{d, p, q} X[d, r + p, s + q] K[p, q, c, d], indices mod n.
FeatureMap convolve_direct(const Kernel4D& kernel, const FeatureMap& x);

struct StructureReport {
  bool is_normal = false;
  bool q_unitary = false;
  bool q_diagonalizes = false;
  double normal_residual = 0.0;      // max |A A^T - A^T A|
  double unitary_residual = 0.0;     // max |Q Q^* - I|
  double off_diagonal_residual = 0.0;  // max off-diagonal |Q^* A Q|
  std::vector<Complex> eigs;         // diagonal of Q^* A Q
};

/// Checks normality of the single-channel convolution matrix A and that
/// Q = (F_w kron F_h) / sqrt(n_h n_w) is unitary and diagonalizes A.
StructureReport check_structure(const Kernel4D& padded, double tolerance, const Limits& limits = {});

/// DivideAndConquer: bidiagonalization + divide and conquer (Eigen BDCSVD).
/// Jacobi: the same one-sided Jacobi routine used per frequency bin.
enum class DenseBackend { DivideAndConquer, Jacobi };

/// All min(rows, cols) singular values of a dense matrix, descending.
std::vector<double> dense_singular_values(const DenseMatrix& m, DenseBackend backend = DenseBackend::DivideAndConquer);

/// Spectrum of the layer through the assembled dense matrix.
Spectrum dense_spectrum(const Kernel4D& kernel, const FeatureShape& shape, const Limits& limits = {},
                        DenseBackend backend = DenseBackend::DivideAndConquer);

/// max_i |a_i - b_i| / max(a_0, b_0) for two sorted spectra of equal size;
/// 0 when both are identically zero. Throws ShapeMismatch on size mismatch.
double max_relative_deviation(const Spectrum& a, const Spectrum& b);

}  // namespace convspectra::oracle
