// Dense singular values for the brute-force path. The default backend is
// Eigen's divide-and-conquer bidiagonal SVD, an implementation independent of
// the Jacobi routine used per frequency bin.

#include <Eigen/SVD>

#include <algorithm>
#include <functional>

#include "convspectra/oracle.hpp"
#include "convspectra/svd.hpp"

namespace convspectra::oracle {

std::vector<double> dense_singular_values(const DenseMatrix& m, DenseBackend backend) {
  if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorCode::InvalidArgument, "empty dense matrix");

  if (backend == DenseBackend::Jacobi) return svd(m.to_complex(), false).singular_values;

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> view(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                        static_cast<Eigen::Index>(m.cols()));
  const Eigen::BDCSVD<Eigen::MatrixXd> solver(view);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "dense SVD did not converge");

  const auto& values = solver.singularValues();
  std::vector<double> s(values.data(), values.data() + values.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

}  // namespace convspectra::oracle
