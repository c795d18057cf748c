#include "convspectra/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "convspectra/parallel.hpp"

namespace convspectra {

namespace {

// Column-major working copy of a tall (rows >= cols) matrix.
struct Columns {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;

  Complex* col(std::size_t j) noexcept { return data.data() + j * rows; }
  const Complex* col(std::size_t j) const noexcept { return data.data() + j * rows; }
};

Columns to_columns(const ComplexMatrix& a, bool conjugate_transpose) {
  Columns w;
  w.rows = conjugate_transpose ? a.cols() : a.rows();
  w.cols = conjugate_transpose ? a.rows() : a.cols();
  w.data.resize(w.rows * w.cols);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (conjugate_transpose)
        w.data[r * w.rows + c] = std::conj(a(r, c));
      else
        w.data[c * w.rows + r] = a(r, c);
    }
  }
  return w;
}

double norm2(const Complex* x, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

Complex dot(const Complex* x, const Complex* y, std::size_t n) noexcept {
  // <x, y> = sum conj(x_i) y_i
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

// [x, y] <- [c x - s y, s x + c y] after y <- y * phase.
void rotate(Complex* x, Complex* y, std::size_t n, double c, double s, Complex phase) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const Complex xi = x[i];
    const Complex yi = y[i] * phase;
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

// Orthonormal completion: fills the columns listed in `missing` with unit
// vectors orthogonal to every other column of u (rows x r, column-major).
void complete_basis(Columns& u, const std::vector<bool>& missing) {
  const std::size_t m = u.rows;
  std::size_t candidate = 0;
  for (std::size_t j = 0; j < u.cols; ++j) {
    if (!missing[j]) continue;
    for (; candidate < m; ++candidate) {
      std::vector<Complex> e(m, Complex{});
      e[candidate] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < u.cols; ++k) {
          if (k == j || (missing[k] && k > j)) continue;
          const Complex proj = dot(u.col(k), e.data(), m);
          for (std::size_t i = 0; i < m; ++i) e[i] -= proj * u.col(k)[i];
        }
      }
      const double len = std::sqrt(norm2(e.data(), m));
      if (len > 0.5) {
        for (std::size_t i = 0; i < m; ++i) u.col(j)[i] = e[i] / len;
        ++candidate;
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd(const ComplexMatrix& a, bool compute_vectors, const JacobiOptions& options) {
  if (a.rows() == 0 || a.cols() == 0) throw Error(ErrorCode::InvalidArgument, "svd of empty matrix");
  for (const auto& z : a.entries()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::NonFiniteEntry, "svd input has non-finite entries");
  }

  const bool wide = a.rows() < a.cols();
  Columns w = to_columns(a, wide);
  const std::size_t m = w.rows;
  const std::size_t n = w.cols;

  Columns v;
  if (compute_vectors) {
    v.rows = v.cols = n;
    v.data.assign(n * n, Complex{});
    for (std::size_t i = 0; i < n; ++i) v.col(i)[i] = 1.0;
  }

  std::vector<double> sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = norm2(w.col(j), m);

  const double tol =
      std::max(options.tolerance, 4.0 * static_cast<double>(m) * std::numeric_limits<double>::epsilon());
  const double total = std::accumulate(sq.begin(), sq.end(), 0.0);
  // Columns this small relative to the whole matrix are numerically zero.
  const double negligible = total * 1e-32;

  bool converged = n == 1 || total == 0.0;
  double worst = 0.0;
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = sq[p];
        const double beta = sq[q];
        if (alpha <= negligible || beta <= negligible) continue;
        const Complex gamma = dot(w.col(p), w.col(q), m);
        const double g = std::abs(gamma);
        const double off = g / std::sqrt(alpha * beta);
        worst = std::max(worst, off);
        if (off <= tol) continue;
        rotated = true;

        const Complex phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        rotate(w.col(p), w.col(q), m, c, s, phase);
        if (compute_vectors) rotate(v.col(p), v.col(q), n, c, s, phase);
        sq[p] = norm2(w.col(p), m);
        sq[q] = norm2(w.col(q), m);
      }
    }
    if (!rotated) converged = true;
  }
  if (!converged) {
    std::ostringstream os;
    os << "Jacobi SVD did not converge in " << options.max_sweeps
       << " sweeps; worst relative off-diagonal " << worst;
    throw Error(ErrorCode::NoConvergence, os.str());
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(sq[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult result;
  result.singular_values.resize(n);
  const double sigma_max = sigma[order[0]];
  for (std::size_t j = 0; j < n; ++j) {
    const double s = sigma[order[j]];
    result.singular_values[j] = s < options.clamp_ratio * sigma_max ? 0.0 : s;
  }
  if (!compute_vectors) return result;

  // Left vectors: normalized columns of the rotated matrix, completed to
  // an orthonormal set where the singular value vanished.
  Columns u;
  u.rows = m;
  u.cols = n;
  u.data.assign(m * n, Complex{});
  std::vector<bool> missing(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = result.singular_values[j];
    if (s == 0.0) {
      missing[j] = true;
      continue;
    }
    const Complex* src = w.col(order[j]);
    const double len = sigma[order[j]];
    for (std::size_t i = 0; i < m; ++i) u.col(j)[i] = src[i] / len;
  }
  complete_basis(u, missing);

  // Tall factors: w_input = U S V^H. For a wide input we decomposed a^H,
  // so the roles of U and V swap.
  ComplexMatrix left(m, n);
  ComplexMatrix right_adj(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) left(i, j) = u.col(j)[i];
    const Complex* vj = v.col(order[j]);
    for (std::size_t i = 0; i < n; ++i) right_adj(j, i) = std::conj(vj[i]);
  }
  if (!wide) {
    result.u = std::move(left);
    result.v_conj_t = std::move(right_adj);
  } else {
    result.u = right_adj.adjoint();
    result.v_conj_t = left.adjoint();
  }
  return result;
}

std::vector<SvdResult> svd_batch(std::span<const ComplexMatrix> stack, bool compute_vectors,
                                 const JacobiOptions& options) {
  std::vector<SvdResult> out(stack.size());
  if (stack.empty()) return out;
  const std::size_t rows = stack[0].rows();
  const std::size_t cols = stack[0].cols();
  for (const auto& m : stack) {
    if (m.rows() != rows || m.cols() != cols)
      throw Error(ErrorCode::ShapeMismatch, "svd_batch matrices must share one shape");
  }
  parallel_for(stack.size(), [&](std::size_t i) {
    try {
      out[i] = svd(stack[i], compute_vectors, options);
    } catch (const Error& e) {
      throw Error(e.code(), "batch index " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace convspectra
