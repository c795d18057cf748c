#pragma once

// Singular value decomposition of small dense complex matrices by
// one-sided (Hestenes) Jacobi rotations.

#include <cstddef>
#include <span>
#include <vector>

#include "convspectra/types.hpp"

namespace convspectra {

/// Thin SVD: a = u * diag(singular_values) * v_conj_t, with
/// r = min(rows, cols) singular values in descending order. The factors are
/// empty when vectors were not requested.
struct SvdResult {
  ComplexMatrix u;         // rows x r, orthonormal columns
  std::vector<double> singular_values;
  ComplexMatrix v_conj_t;  // r x cols, orthonormal rows

  bool has_vectors() const noexcept { return u.rows() != 0; }
};

struct JacobiOptions {
  /// A column pair is treated as orthogonal once
  /// |<a_p, a_q>| <= tolerance * |a_p| * |a_q|.
  double tolerance = 1e-14;
  int max_sweeps = 60;
  /// Singular values below clamp_ratio * sigma_max are reported as 0.
  double clamp_ratio = 1e-13;
};

/// Throws NoConvergence if the sweep cap is reached, InvalidArgument on
/// empty input and NonFiniteEntry on NaN/Inf entries.
SvdResult svd(const ComplexMatrix& a, bool compute_vectors, const JacobiOptions& options = {});

/// Maps svd over a stack of equally shaped matrices using the worker pool.
/// A NoConvergence error names the lowest failing batch index.
std::vector<SvdResult> svd_batch(std::span<const ComplexMatrix> stack, bool compute_vectors,
                                 const JacobiOptions& options = {});

}  // namespace convspectra
