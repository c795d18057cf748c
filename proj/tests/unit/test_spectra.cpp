#include <gtest/gtest.h>

#include "convspectra/oracle.hpp"
#include "convspectra/parallel.hpp"
#include "convspectra/spectra.hpp"
#include "test_multiset.hpp"
#include "test_util.hpp"

using namespace convspectra;
using testing_util::random_kernel;

TEST(ComputeSpectrum, IdentityKernelIsAllOnes) {
  const auto s = compute_spectrum(Kernel4D::identity(2), {4, 4});
  ASSERT_EQ(s.count(), 32u);
  for (double v : s.values) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(ComputeSpectrum, ScalarKernelIsConstant) {
  const auto s = compute_spectrum(Kernel4D({1, 1, 1, 1}, {3.0}), {5, 5});
  ASSERT_EQ(s.count(), 25u);
  for (double v : s.values) EXPECT_NEAR(v, 3.0, 1e-14);
}

TEST(ComputeSpectrum, ZeroKernel) {
  const auto s = compute_spectrum(Kernel4D({3, 3, 2, 2}), {4, 4});
  ASSERT_EQ(s.count(), 32u);
  for (double v : s.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(operator_norm(Kernel4D({3, 3, 2, 2}), {4, 4}), 0.0);
}

TEST(ComputeSpectrum, MatchesDenseOracleSquareChannels) {
  const Kernel4D k = random_kernel(3, 3, 2, 2, 2024);
  const auto exact = compute_spectrum(k, {4, 4});
  for (auto backend : {oracle::DenseBackend::DivideAndConquer, oracle::DenseBackend::Jacobi}) {
    const auto dense = oracle::dense_spectrum(k, {4, 4}, {}, backend);
    EXPECT_LE(oracle::max_relative_deviation(exact, dense), 1e-8);
  }
}

TEST(ComputeSpectrum, MatchesDenseOracleRectangularChannels) {
  const Kernel4D k = random_kernel(3, 3, 3, 2, 7);
  const auto exact = compute_spectrum(k, {4, 4});
  ASSERT_EQ(exact.count(), 32u);
  const auto m = oracle::build_full_matrix(k, {4, 4});
  EXPECT_EQ(m.rows(), 48u);
  EXPECT_EQ(m.cols(), 32u);
  EXPECT_LE(oracle::max_relative_deviation(exact, make_spectrum(oracle::dense_singular_values(m))), 1e-8);
}

TEST(ComputeSpectrum, MatchesDenseOracleRectangularFeatureMap) {
  const Kernel4D k = random_kernel(2, 3, 2, 3, 8);
  const auto exact = compute_spectrum(k, {3, 5});
  EXPECT_LE(oracle::max_relative_deviation(exact, oracle::dense_spectrum(k, {3, 5})), 1e-8);
}

// Reference values produced by NumPy's fft2 + svd on the kernel
// K[p,q,c,d] = (((3p + 5q + 7c + 11d) mod 13) - 6) / 4 with input shape (4, 5).
TEST(ComputeSpectrum, FrozenNumpyReference) {
  Kernel4D k({3, 3, 2, 3});
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t q = 0; q < 3; ++q)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t d = 0; d < 3; ++d)
          k(p, q, c, d) = (static_cast<double>((p * 3 + q * 5 + c * 7 + d * 11) % 13) - 6.0) / 4.0;
  const std::vector<double> expected = {
      11.601238518466097, 11.601238518466097, 7.093746237404509,  7.093746237404509,  6.919902018072145,
      6.919902018072145,  6.707852636566588,  6.707852636566588,  6.178535220997387,  6.178535220997387,
      6.14417461008284,   6.14417461008284,   4.684735838400011,  4.684735838400011,  3.928770152654857,
      3.928770152654857,  3.7150989824472025, 3.5543844242785254, 3.5543844242785254, 3.368410312607415,
      3.1523094215350502, 3.1523094215350502, 2.643920156911943,  2.643920156911943,  2.617348654171875,
      2.617348654171875,  2.6105105032557008, 2.6105105032557008, 2.5237893027015654, 2.5237893027015654,
      2.502953020030524,  2.502953020030524,  2.381006423053598,  2.381006423053598,  1.700432219053477,
      1.700432219053477,  1.5241520759490381, 1.3157851458627086, 1.3157851458627086, 0.7271945860084607};
  const auto s = compute_spectrum(k, {4, 5});
  ASSERT_EQ(s.count(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(s.values[i], expected[i], 1e-12 * expected[0]);
}

TEST(ComputeSpectrum, CardinalityProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t nh = 1 + rng() % 7, nw = 1 + rng() % 7;
    const std::size_t kh = 1 + rng() % nh, kw = 1 + rng() % nw;
    const std::size_t mo = 1 + rng() % 4, mi = 1 + rng() % 4;
    const auto s = compute_spectrum(random_kernel(kh, kw, mo, mi, rng()), {nh, nw});
    EXPECT_EQ(s.count(), nh * nw * std::min(mo, mi));
    EXPECT_TRUE(std::is_sorted(s.values.rbegin(), s.values.rend()));
    EXPECT_GE(s.values.back(), 0.0);
  }
}

TEST(ComputeSpectrum, ScalingEquivariance) {
  const Kernel4D k = random_kernel(3, 3, 3, 3, 77);
  Kernel4D scaled = k;
  const double alpha = -2.75;
  for (double& x : scaled.data()) x *= alpha;
  const auto s = compute_spectrum(k, {6, 6});
  const auto t = compute_spectrum(scaled, {6, 6});
  for (std::size_t i = 0; i < s.count(); ++i) EXPECT_NEAR(t.values[i], std::abs(alpha) * s.values[i], 1e-10 * std::abs(alpha) * s.max());
}

TEST(ComputeSpectrum, IndependentOfThreadCount) {
  const Kernel4D k = random_kernel(3, 3, 4, 4, 3);
  set_thread_count(1);
  const auto one = compute_spectrum(k, {8, 8});
  set_thread_count(4);
  const auto four = compute_spectrum(k, {8, 8});
  set_thread_count(0);
  EXPECT_EQ(one.values, four.values);
}

TEST(ComputeSpectrum, MatrixTransposeSymmetry) {
  const Kernel4D k = random_kernel(3, 3, 2, 3, 4);
  const auto m = oracle::build_full_matrix(k, {4, 4});
  const auto a = make_spectrum(oracle::dense_singular_values(m));
  const auto b = make_spectrum(oracle::dense_singular_values(m.transpose()));
  EXPECT_LE(oracle::max_relative_deviation(a, b), 1e-12);
}

TEST(ComputeSpectrum, PropagatesValidationErrors) {
  try {
    compute_spectrum(Kernel4D({3, 3, 1, 1}), {2, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KernelLargerThanInput);
  }
}

TEST(SingleChannelEigenvalues, DeltaKernel) {
  const auto e = single_channel_eigenvalues(Kernel4D({1, 1, 1, 1}, {1.0}), {3, 3});
  ASSERT_EQ(e.size(), 9u);
  for (const auto& z : e) EXPECT_LT(std::abs(z - Complex(1.0)), 1e-15);
}

TEST(SingleChannelEigenvalues, ScalarKernel) {
  const auto e = single_channel_eigenvalues(Kernel4D({1, 1, 1, 1}, {-0.4}), {6, 6});
  ASSERT_EQ(e.size(), 36u);
  for (const auto& z : e) EXPECT_LT(std::abs(z - Complex(-0.4)), 1e-15);
}

TEST(SingleChannelEigenvalues, MatchOracleDiagonalization) {
  const Kernel4D k = random_kernel(3, 3, 1, 1, 31);
  const auto eigs = single_channel_eigenvalues(k, {4, 4});
  const auto report = oracle::check_structure(zero_pad(k, {4, 4}), 1e-9);
  EXPECT_LE(testing_util::complex_multiset_distance(eigs, report.eigs), 1e-8);
}

TEST(SingleChannelEigenvalues, MagnitudesAreTheSpectrum) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Kernel4D k = random_kernel(2, 3, 1, 1, seed);
    const FeatureShape shape{5, 4};
    std::vector<double> mags;
    for (const auto& z : single_channel_eigenvalues(k, shape)) mags.push_back(std::abs(z));
    const auto expected = make_spectrum(mags);
    EXPECT_LE(testing_util::max_abs_diff(compute_spectrum(k, shape).values, expected.values), 1e-12);
  }
}

TEST(SingleChannelEigenvalues, RejectsMultiChannel) {
  try {
    single_channel_eigenvalues(Kernel4D({1, 1, 2, 1}), {3, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChannelCountNotOne);
  }
}

TEST(OperatorNorm, IdentityAndZero) {
  EXPECT_NEAR(operator_norm(Kernel4D::identity(3), {5, 5}), 1.0, 1e-15);
  EXPECT_EQ(operator_norm(Kernel4D({2, 2, 2, 2}), {5, 5}), 0.0);
}

TEST(OperatorNorm, BoundsConvolutionGainAndMatchesPowerIteration) {
  const Kernel4D k = random_kernel(3, 3, 2, 2, 13);
  const FeatureShape shape{5, 5};
  const double norm = operator_norm(k, shape);

  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto x = testing_util::random_map(2, 5, 5, 1000 + s);
    const auto y = oracle::convolve_direct(k, x);
    double nx = 0.0, ny = 0.0;
    for (double v : x.data) nx += v * v;
    for (double v : y.data) ny += v * v;
    EXPECT_LE(std::sqrt(ny / nx), norm + 1e-9);
  }

  // Power iteration on M^T M.
  const auto m = oracle::build_full_matrix(k, shape);
  const auto mt = m.transpose();
  std::vector<double> v(m.cols(), 1.0);
  double estimate = 0.0;
  for (int it = 0; it < 2000; ++it) {
    auto w = mt.apply(m.apply(v));
    double len = 0.0;
    for (double z : w) len += z * z;
    len = std::sqrt(len);
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / len;
    estimate = std::sqrt(len);
  }
  EXPECT_NEAR(estimate, norm, 1e-4);
}

TEST(FrequencyTransforms, IdentityAndZeroBins) {
  const auto id = frequency_transforms(Kernel4D::identity(3), {3, 4});
  for (const auto& bin : id.bin_matrices()) EXPECT_LT(max_abs_diff(bin, ComplexMatrix::identity(3)), 1e-15);
  const auto zero = frequency_transforms(Kernel4D({2, 2, 2, 3}), {3, 4});
  for (const auto& bin : zero.bin_matrices()) EXPECT_EQ(bin.max_abs(), 0.0);
}

TEST(FrequencyTransforms, MatchQuarticLoopDft) {
  const Kernel4D k = random_kernel(3, 3, 2, 2, 64);
  const auto t = frequency_transforms(k, {4, 4});
  const Kernel4D padded = zero_pad(k, {4, 4});
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t d = 0; d < 2; ++d) {
      std::vector<Complex> g(16);
      for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t q = 0; q < 4; ++q) g[p * 4 + q] = padded(p, q, c, d);
      const auto ref = testing_util::direct_dft2(g, 4, 4);
      for (std::size_t u = 0; u < 4; ++u)
        for (std::size_t v = 0; v < 4; ++v) EXPECT_LT(std::abs(t.bin(u, v)(c, d) - ref[u * 4 + v]), 1e-10);
    }
}
