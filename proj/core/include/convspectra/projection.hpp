#pragma once

// Projection of convolutional layers onto operator-norm balls.
//
// Clipping the singular values of every frequency-bin matrix to [0, bound]
// gives the Frobenius-nearest circular convolution (over full n_h x n_w
// support) whose operator norm is at most `bound`. The result generally has
// full support; restrict_support projects it back onto k_h x k_w filters,
// and project_layer alternates the two projections.

#include <cstddef>
#include <vector>

#include "convspectra/types.hpp"

namespace convspectra {

struct ClipReport {
  double requested_bound = 0.0;
  double norm_before = 0.0;
  double norm_after_clip = 0.0;
  /// Operator norm after cropping to the original support. For
  /// clip_operator_norm alone (no cropping) this equals norm_after_clip.
  double norm_after_restriction = 0.0;
  std::size_t bins_modified = 0;
  /// Largest imaginary part discarded by the inverse transform.
  double max_imaginary_residual = 0.0;
};

struct ClipResult {
  Kernel4D kernel;
  ClipReport report;
};

/// Discarded imaginary parts above this multiple of max(1, max|K|) raise
/// ImaginaryResidual.
inline constexpr double kImaginaryResidualLimit = 1e-6;

/// Returns a kernel of shape (n_h, n_w, m_out, m_in). Bins whose singular
/// values are already within the bound are passed through untouched, so a
/// kernel inside the ball comes back as exactly zero_pad(kernel).
ClipResult clip_operator_norm(const Kernel4D& kernel, const FeatureShape& shape, double bound);

/// Leading k_h x k_w block of a full-support kernel. Throws BadSupport when
/// the requested support is empty or larger than the kernel.
Kernel4D restrict_support(const Kernel4D& full_kernel, std::size_t k_h, std::size_t k_w);

struct ProjectionResult {
  Kernel4D kernel;     // same support as the input
  ClipReport report;   // final round; norm_after_restriction = operator norm of kernel
  std::vector<double> round_norms;  // operator norm after each round's restriction
};

/// `rounds` alternations of clip_operator_norm and restrict_support.
ProjectionResult project_layer(const Kernel4D& kernel, const FeatureShape& shape, double bound,
                               int rounds = 1);

/// Reshapes the kernel to a (k_h * k_w * m_in) x m_out matrix, rows ordered
/// (h outer, w middle, in inner).
ComplexMatrix reshape_kernel(const Kernel4D& kernel);
/// Largest singular value of reshape_kernel(kernel).
double reshaped_norm(const Kernel4D& kernel);

struct ReshapedClipResult {
  Kernel4D kernel;
  double reshaped_norm_before = 0.0;
  double reshaped_norm_after = 0.0;
};

/// Clips the singular values of the reshaped kernel matrix to `bound`. This
/// bounds the reshaped matrix, not the layer's operator norm.
ReshapedClipResult clip_reshaped(const Kernel4D& kernel, double bound);

}  // namespace convspectra
