#pragma once

// Exact singular values of a 2D multi-channel circular convolution.
//
// The layer's n_h*n_w*m_in -> n_h*n_w*m_out linear map is block-diagonalized
// by the 2D Fourier transform: its singular values are the union, over all
// frequency bins (u, v), of the singular values of the m_out x m_in matrix
// whose (c, d) entry is the (u, v) coefficient of the 2D transform of the
// zero-padded filter K[:, :, c, d].

#include <vector>

#include "convspectra/fourier.hpp"
#include "convspectra/svd.hpp"
#include "convspectra/types.hpp"

namespace convspectra {

/// Per-bin transfer matrices; bins(u, v, c, d) is entry (c, d) of bin (u, v).
struct FrequencyTransforms {
  ComplexTensor4 bins;

  std::size_t n_h() const noexcept { return bins.shape.k_h; }
  std::size_t n_w() const noexcept { return bins.shape.k_w; }
  std::size_t m_out() const noexcept { return bins.shape.m_out; }
  std::size_t m_in() const noexcept { return bins.shape.m_in; }

  /// The m_out x m_in matrix of bin (u, v).
  ComplexMatrix bin(std::size_t u, std::size_t v) const;
  /// All bins, row-major over (u, v).
  std::vector<ComplexMatrix> bin_matrices() const;
};

FrequencyTransforms frequency_transforms(const Kernel4D& kernel, const FeatureShape& shape);

/// Sorted singular values of the layer; n_h * n_w * min(m_out, m_in) values.
Spectrum compute_spectrum(const Kernel4D& kernel, const FeatureShape& shape);

/// Eigenvalues of a single-channel layer: the 2D transform of the padded
/// filter, flattened row-major. Throws ChannelCountNotOne otherwise.
std::vector<Complex> single_channel_eigenvalues(const Kernel4D& kernel, const FeatureShape& shape);

/// Largest singular value of the layer.
double operator_norm(const Kernel4D& kernel, const FeatureShape& shape);

}  // namespace convspectra
