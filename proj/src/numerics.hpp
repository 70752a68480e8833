#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace afrelay {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;
// Allowed max-entry asymmetry, relative to max(1, largest entry).
inline constexpr double kHermitianTolerance = 1e-12;

struct OrderedSVD {
  ComplexMatrix u;
  RealVector singular_values;  // non-increasing
  ComplexMatrix v;
};

struct OrderedEigh {
  ComplexMatrix u;
  RealVector eigenvalues;  // non-increasing
};

// Unitary DFT, entry (m, n) = exp(-j 2 pi m n / K) / sqrt(K).
ComplexMatrix dft_matrix(int size);

// Full SVD with singular values sorted non-increasing and every factor column
// phase-canonicalized (largest-magnitude entry of each U column is real
// positive; paired V columns follow).
OrderedSVD svd_ordered(const ComplexMatrix& a);

OrderedEigh eigh_ordered(const ComplexMatrix& a);

// B with B A B = I for Hermitian positive definite A.
ComplexMatrix hermitian_inv_sqrt(const ComplexMatrix& a);

// Principal square root of a Hermitian PSD matrix; eigenvalues below zero by
// rounding are clipped.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Number of singular values (or eigenvalues) above kRankTolerance times the largest.
int numerical_rank(const RealVector& sorted_values);

bool is_hermitian(const ComplexMatrix& a, double tolerance = kHermitianTolerance);
ComplexMatrix hermitian_part(const ComplexMatrix& a);
bool all_finite(const ComplexMatrix& a);
void require_finite(const ComplexMatrix& a, const std::string& what);
void require_square(const ComplexMatrix& a, const std::string& what);

std::string shape_string(const ComplexMatrix& a);

// max |a_ij - b_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace afrelay
