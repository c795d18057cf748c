#include "convspectra/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "convspectra/fourier.hpp"
#include "convspectra/spectra.hpp"
#include "convspectra/svd.hpp"

namespace convspectra {

namespace {

void check_bound(double bound) {
  if (!(bound > 0.0) || !std::isfinite(bound))
    throw Error(ErrorCode::InvalidArgument, "bound must be a positive finite number");
}

// u * diag(min(s, bound)) * v^H
ComplexMatrix clipped_product(const SvdResult& f, double bound) {
  const std::size_t rows = f.u.rows();
  const std::size_t cols = f.v_conj_t.cols();
  const std::size_t r = f.singular_values.size();
  ComplexMatrix out(rows, cols);
  for (std::size_t k = 0; k < r; ++k) {
    const double s = std::min(f.singular_values[k], bound);
    if (s == 0.0) continue;
    for (std::size_t i = 0; i < rows; ++i) {
      const Complex us = f.u(i, k) * s;
      for (std::size_t j = 0; j < cols; ++j) out(i, j) += us * f.v_conj_t(k, j);
    }
  }
  return out;
}

}  // namespace

ClipResult clip_operator_norm(const Kernel4D& kernel, const FeatureShape& shape, double bound) {
  validate_pair(kernel, shape);
  check_bound(bound);

  auto transforms = frequency_transforms(kernel, shape);
  const auto stack = transforms.bin_matrices();
  const auto factors = svd_batch(stack, /*compute_vectors=*/true);

  ClipReport report;
  report.requested_bound = bound;
  const std::size_t mo = kernel.m_out();
  const std::size_t mi = kernel.m_in();
  for (std::size_t b = 0; b < stack.size(); ++b) {
    const double top = factors[b].singular_values.front();
    report.norm_before = std::max(report.norm_before, top);
    report.norm_after_clip = std::max(report.norm_after_clip, std::min(top, bound));
    if (top <= bound) continue;
    ++report.bins_modified;
    const ComplexMatrix clipped = clipped_product(factors[b], bound);
    const std::size_t u = b / shape.n_w;
    const std::size_t v = b % shape.n_w;
    for (std::size_t c = 0; c < mo; ++c)
      for (std::size_t d = 0; d < mi; ++d) transforms.bins(u, v, c, d) = clipped(c, d);
  }

  report.norm_after_restriction = report.norm_after_clip;
  if (report.bins_modified == 0) return {zero_pad(kernel, shape), report};

  const ComplexTensor4 spatial = batch_idft2(transforms.bins);
  Kernel4D out({shape.n_h, shape.n_w, mo, mi});
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = spatial.data[i].real();
    report.max_imaginary_residual =
        std::max(report.max_imaginary_residual, std::abs(spatial.data[i].imag()));
  }
  const double scale = std::max(1.0, kernel.max_abs());
  if (report.max_imaginary_residual > kImaginaryResidualLimit * scale) {
    std::ostringstream os;
    os << "inverse transform left an imaginary residual of " << report.max_imaginary_residual
       << " (scale " << scale << ")";
    throw Error(ErrorCode::ImaginaryResidual, os.str());
  }
  return {std::move(out), report};
}

Kernel4D restrict_support(const Kernel4D& full_kernel, std::size_t k_h, std::size_t k_w) {
  if (k_h == 0 || k_w == 0 || k_h > full_kernel.k_h() || k_w > full_kernel.k_w()) {
    std::ostringstream os;
    os << "cannot restrict a " << full_kernel.k_h() << "x" << full_kernel.k_w()
       << " kernel to support " << k_h << "x" << k_w;
    throw Error(ErrorCode::BadSupport, os.str());
  }
  Kernel4D out({k_h, k_w, full_kernel.m_out(), full_kernel.m_in()});
  for (std::size_t p = 0; p < k_h; ++p)
    for (std::size_t q = 0; q < k_w; ++q)
      for (std::size_t c = 0; c < full_kernel.m_out(); ++c)
        for (std::size_t d = 0; d < full_kernel.m_in(); ++d) out(p, q, c, d) = full_kernel(p, q, c, d);
  return out;
}

ProjectionResult project_layer(const Kernel4D& kernel, const FeatureShape& shape, double bound,
                               int rounds) {
  validate_pair(kernel, shape);
  check_bound(bound);
  if (rounds < 1) throw Error(ErrorCode::InvalidArgument, "rounds must be >= 1");

  ProjectionResult result;
  result.kernel = kernel;
  double norm_before = 0.0;
  double max_residual = 0.0;
  for (int r = 0; r < rounds; ++r) {
    auto clipped = clip_operator_norm(result.kernel, shape, bound);
    if (r == 0) norm_before = clipped.report.norm_before;
    max_residual = std::max(max_residual, clipped.report.max_imaginary_residual);
    result.kernel = restrict_support(clipped.kernel, kernel.k_h(), kernel.k_w());
    result.report = clipped.report;
    result.round_norms.push_back(operator_norm(result.kernel, shape));
  }
  result.report.norm_before = norm_before;
  result.report.max_imaginary_residual = max_residual;
  result.report.norm_after_restriction = result.round_norms.back();
  return result;
}

ComplexMatrix reshape_kernel(const Kernel4D& kernel) {
  const std::size_t mi = kernel.m_in();
  ComplexMatrix m(kernel.k_h() * kernel.k_w() * mi, kernel.m_out());
  for (std::size_t p = 0; p < kernel.k_h(); ++p)
    for (std::size_t q = 0; q < kernel.k_w(); ++q)
      for (std::size_t d = 0; d < mi; ++d)
        for (std::size_t c = 0; c < kernel.m_out(); ++c)
          m((p * kernel.k_w() + q) * mi + d, c) = kernel(p, q, c, d);
  return m;
}

double reshaped_norm(const Kernel4D& kernel) {
  return svd(reshape_kernel(kernel), false).singular_values.front();
}

ReshapedClipResult clip_reshaped(const Kernel4D& kernel, double bound) {
  check_bound(bound);
  if (!kernel.all_finite()) throw Error(ErrorCode::NonFiniteEntry, "kernel contains NaN or infinite entries");

  const ComplexMatrix reshaped = reshape_kernel(kernel);
  const SvdResult f = svd(reshaped, true);

  ReshapedClipResult result;
  result.reshaped_norm_before = f.singular_values.front();
  if (result.reshaped_norm_before <= bound) {
    result.kernel = kernel;
    result.reshaped_norm_after = result.reshaped_norm_before;
    return result;
  }

  const ComplexMatrix clipped = clipped_product(f, bound);
  const std::size_t mi = kernel.m_in();
  result.kernel = Kernel4D(kernel.shape());
  for (std::size_t p = 0; p < kernel.k_h(); ++p)
    for (std::size_t q = 0; q < kernel.k_w(); ++q)
      for (std::size_t d = 0; d < mi; ++d)
        for (std::size_t c = 0; c < kernel.m_out(); ++c)
          result.kernel(p, q, c, d) = clipped((p * kernel.k_w() + q) * mi + d, c).real();
  result.reshaped_norm_after = reshaped_norm(result.kernel);
  return result;
}

}  // namespace convspectra
