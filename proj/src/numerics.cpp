#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "errors.hpp"

namespace afrelay {

namespace {

std::vector<int> descending_order(const RealVector& values) {
  std::vector<int> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values(a) > values(b); });
  return order;
}

// Phase that rotates the largest-magnitude entry of `column` onto the
// positive real axis. Ties resolve to the first such entry.
Complex canonical_phase(const Eigen::Ref<const ComplexVector>& column) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    const double m = std::abs(column(i));
    if (m > best_abs * (1.0 + 1e-12)) {
      best_abs = m;
      best = i;
    }
  }
  if (best_abs <= 0.0) return Complex(1.0, 0.0);
  return std::conj(column(best)) / best_abs;
}

}  // namespace

std::string shape_string(const ComplexMatrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

void require_finite(const ComplexMatrix& a, const std::string& what) {
  if (!all_finite(a))
    fail(ErrorKind::kContractViolation, what + ": non-finite entry in " + shape_string(a) + " matrix");
}

void require_square(const ComplexMatrix& a, const std::string& what) {
  if (a.rows() != a.cols())
    fail(ErrorKind::kDimension, what + ": expected a square matrix, got " + shape_string(a));
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::kDimension, "max_abs_diff: " + shape_string(a) + " vs " + shape_string(b));
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return max_abs_diff(a, a.adjoint()) <= tolerance * scale;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

ComplexMatrix dft_matrix(int size) {
  if (size < 1) fail(ErrorKind::kContractViolation, "dft_matrix: size must be >= 1");
  ComplexMatrix f(size, size);
  const double scale = 1.0 / std::sqrt(static_cast<double>(size));
  for (int m = 0; m < size; ++m) {
    for (int n = 0; n < size; ++n) {
      // Reduce the exponent mod K first so large K keeps full accuracy.
      const long long e = (static_cast<long long>(m) * n) % size;
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(e) / size;
      f(m, n) = std::polar(scale, angle);
    }
  }
  return f;
}

OrderedSVD svd_ordered(const ComplexMatrix& a) {
  require_finite(a, "svd_ordered");
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& raw = svd.singularValues();
  const ComplexMatrix& raw_u = svd.matrixU();
  const ComplexMatrix& raw_v = svd.matrixV();
  if (!raw.allFinite() || !all_finite(raw_u) || !all_finite(raw_v))
    fail(ErrorKind::kNumericalFailure, "svd_ordered: decomposition failed for " + shape_string(a) + " input");

  const auto order = descending_order(raw);
  const Eigen::Index n = raw.size();
  OrderedSVD out;
  out.singular_values.resize(n);
  out.u = raw_u;
  out.v = raw_v;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.singular_values(i) = raw(order[i]);
    out.u.col(i) = raw_u.col(order[i]);
    out.v.col(i) = raw_v.col(order[i]);
  }
  for (Eigen::Index i = 0; i < out.u.cols(); ++i) {
    const Complex phase = canonical_phase(out.u.col(i));
    out.u.col(i) *= phase;
    if (i < n) out.v.col(i) *= phase;
  }
  // Columns of V beyond the paired block are free; canonicalize them alone.
  for (Eigen::Index i = n; i < out.v.cols(); ++i) out.v.col(i) *= canonical_phase(out.v.col(i));
  return out;
}

OrderedEigh eigh_ordered(const ComplexMatrix& a) {
  require_square(a, "eigh_ordered");
  require_finite(a, "eigh_ordered");
  if (!is_hermitian(a))
    fail(ErrorKind::kContractViolation,
         "eigh_ordered: input " + shape_string(a) + " is not Hermitian (asymmetry " +
             std::to_string(max_abs_diff(a, a.adjoint())) + ")");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  if (es.info() != Eigen::Success)
    fail(ErrorKind::kNumericalFailure, "eigh_ordered: no convergence for " + shape_string(a) + " input");
  const RealVector& raw = es.eigenvalues();
  const ComplexMatrix& raw_u = es.eigenvectors();
  const auto order = descending_order(raw);
  OrderedEigh out;
  out.eigenvalues.resize(raw.size());
  out.u.resize(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    out.eigenvalues(i) = raw(order[i]);
    out.u.col(i) = raw_u.col(order[i]);
    out.u.col(i) *= canonical_phase(out.u.col(i));
  }
  return out;
}

ComplexMatrix hermitian_inv_sqrt(const ComplexMatrix& a) {
  const OrderedEigh e = eigh_ordered(a);
  const Eigen::Index n = e.eigenvalues.size();
  if (n == 0) return ComplexMatrix(0, 0);
  const double largest = e.eigenvalues(0);
  const double smallest = e.eigenvalues(n - 1);
  if (!(largest > 0.0) || smallest <= kRankTolerance * largest) {
    std::ostringstream os;
    os << "hermitian_inv_sqrt: matrix is singular to tolerance (eigenvalue " << smallest
       << ", largest " << largest << ")";
    fail(ErrorKind::kSingular, os.str());
  }
  const RealVector scale = e.eigenvalues.cwiseSqrt().cwiseInverse();
  return e.u * scale.asDiagonal() * e.u.adjoint();
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& a) {
  const OrderedEigh e = eigh_ordered(a);
  const RealVector root = e.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return e.u * root.asDiagonal() * e.u.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

int numerical_rank(const RealVector& sorted_values) {
  if (sorted_values.size() == 0) return 0;
  const double largest = sorted_values(0);
  if (!(largest > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sorted_values.size(); ++i)
    if (sorted_values(i) > kRankTolerance * largest) ++rank;
  return rank;
}

}  // namespace afrelay
