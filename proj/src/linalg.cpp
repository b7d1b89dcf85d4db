#include "hawking/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

namespace hawking {

double hermiticity_error(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_error(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  const Mat id = Mat::Identity(m.rows(), m.cols());
  return (m.adjoint() * m - id).cwiseAbs().maxCoeff();
}

int ring_bandwidth(const Mat& m) {
  const Eigen::Index n = m.rows();
  int width = 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      if (m(r, c) == cplx{}) continue;
      const Eigen::Index d = std::abs(r - c);
      width = std::max<int>(width, static_cast<int>(std::min(d, n - d)));
    }
  }
  return width;
}

namespace {

std::vector<Eigen::Index> zigzag_order(Eigen::Index n) {
  std::vector<Eigen::Index> order;
  order.reserve(n);
  for (Eigen::Index lo = 0, hi = n - 1; lo <= hi; ++lo, --hi) {
    order.push_back(lo);
    if (lo != hi) order.push_back(hi);
  }
  return order;
}

HermitianSpectrum dense_solve(const Mat& h) {
  const auto n = static_cast<lapack_int>(h.rows());
  HermitianSpectrum out{Eigen::VectorXd(n), h};
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(out.modes.data()), n, out.energies.data());
  if (info != 0) throw std::runtime_error("zheevd failed with info " + std::to_string(info));
  return out;
}

// In the zigzag order a ring neighbour (i, i+1) lands at most two rows apart.
HermitianSpectrum ring_solve(const Mat& h) {
  const Eigen::Index n = h.rows();
  const auto order = zigzag_order(n);
  constexpr int kd = 2;
  Mat band = Mat::Zero(kd + 1, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = c; r <= std::min(n - 1, c + kd); ++r) {
      band(r - c, c) = h(order[r], order[c]);
    }
  }
  Eigen::VectorXd energies(n);
  Mat z(n, n);
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_zhbevd(
      LAPACK_COL_MAJOR, 'V', 'L', ln, kd, reinterpret_cast<lapack_complex_double*>(band.data()),
      kd + 1, energies.data(), reinterpret_cast<lapack_complex_double*>(z.data()), ln);
  if (info != 0) throw std::runtime_error("zhbevd failed with info " + std::to_string(info));
  HermitianSpectrum out{std::move(energies), Mat(n, n)};
  for (Eigen::Index r = 0; r < n; ++r) out.modes.row(order[r]) = z.row(r);
  return out;
}

}  // namespace

HermitianSpectrum hermitian_eigensystem(const Mat& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix is not square");
  if (h.rows() >= 8 && ring_bandwidth(h) <= 1) return ring_solve(h);
  return dense_solve(h);
}

Mat spectral_function(const HermitianSpectrum& s, const Vec& diagonal) {
  const Mat scaled = s.modes * diagonal.asDiagonal();
  return scaled * s.modes.adjoint();
}

SparseMat sparsify(const Mat& m, double tol) {
  std::vector<Eigen::Triplet<cplx>> entries;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > tol) entries.emplace_back(r, c, m(r, c));
    }
  }
  SparseMat out(m.rows(), m.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

}  // namespace hawking
