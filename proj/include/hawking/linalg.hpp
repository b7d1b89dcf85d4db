#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace hawking {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using SparseMat = Eigen::SparseMatrix<cplx>;

inline constexpr cplx kI{0.0, 1.0};

// Eigen-decomposition h = V diag(E) V^dagger of a dense Hermitian matrix.
// Eigenvalues are ascending.
struct HermitianSpectrum {
  Eigen::VectorXd energies;
  Mat modes;
};

// Largest |M_ij - conj(M_ji)|.
double hermiticity_error(const Mat& m);

// Largest |(M^dagger M - 1)_ij|.
double unitarity_error(const Mat& m);

// Half bandwidth of m when sites are arranged on a ring, i.e. the largest
// periodic distance min(|i-j|, n-|i-j|) over entries with |m_ij| > 0.
int ring_bandwidth(const Mat& m);

// Diagonalizes a Hermitian matrix with LAPACK. Nearest-neighbour ring
// matrices are reordered 0, n-1, 1, n-2, ... which turns the periodic
// tridiagonal pattern into a band of half-width 2, and go through the band
// solver; everything else goes through the dense divide-and-conquer solver.
HermitianSpectrum hermitian_eigensystem(const Mat& h);

// V diag(phases) V^dagger.
Mat spectral_function(const HermitianSpectrum& s, const Vec& diagonal);

// Drops entries with modulus <= tol.
SparseMat sparsify(const Mat& m, double tol);

}  // namespace hawking
