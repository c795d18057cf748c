#include "convspectra/spectra.hpp"

#include <algorithm>

namespace convspectra {

ComplexMatrix FrequencyTransforms::bin(std::size_t u, std::size_t v) const {
  const std::size_t mo = m_out();
  const std::size_t mi = m_in();
  const auto first = bins.data.begin() + static_cast<std::ptrdiff_t>(bins.index(u, v, 0, 0));
  return ComplexMatrix(mo, mi, std::vector<Complex>(first, first + static_cast<std::ptrdiff_t>(mo * mi)));
}

std::vector<ComplexMatrix> FrequencyTransforms::bin_matrices() const {
  std::vector<ComplexMatrix> out;
  out.reserve(n_h() * n_w());
  for (std::size_t u = 0; u < n_h(); ++u)
    for (std::size_t v = 0; v < n_w(); ++v) out.push_back(bin(u, v));
  return out;
}

FrequencyTransforms frequency_transforms(const Kernel4D& kernel, const FeatureShape& shape) {
  return FrequencyTransforms{batch_dft2_kernel(zero_pad(kernel, shape))};
}

Spectrum compute_spectrum(const Kernel4D& kernel, const FeatureShape& shape) {
  const auto transforms = frequency_transforms(kernel, shape);
  const auto stack = transforms.bin_matrices();
  const auto results = svd_batch(stack, /*compute_vectors=*/false);

  std::vector<double> values;
  values.reserve(shape.area() * std::min(kernel.m_out(), kernel.m_in()));
  for (const auto& r : results) values.insert(values.end(), r.singular_values.begin(), r.singular_values.end());
  return make_spectrum(std::move(values));
}

std::vector<Complex> single_channel_eigenvalues(const Kernel4D& kernel, const FeatureShape& shape) {
  if (kernel.m_out() != 1 || kernel.m_in() != 1)
    throw Error(ErrorCode::ChannelCountNotOne, "single-channel eigenvalues need m_out = m_in = 1");
  return frequency_transforms(kernel, shape).bins.data;
}

double operator_norm(const Kernel4D& kernel, const FeatureShape& shape) {
  return compute_spectrum(kernel, shape).max();
}

}  // namespace convspectra
