#include "training.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace afrelay {

ComplexMatrix exponential_correlation(int size, double alpha) {
  ComplexMatrix c(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) c(i, j) = std::pow(alpha, std::abs(i - j));
  return c;
}

TrainingDesign build_gram(int subcarriers, int taps, int tx, double alpha) {
  if (taps < 1 || tx < 1) fail(ErrorKind::kContractViolation, "build_gram: L and tx must be >= 1");
  if (!(alpha >= 0.0 && alpha < 1.0))
    fail(ErrorKind::kContractViolation, "build_gram: alpha must lie in [0, 1), got " + std::to_string(alpha));
  if (subcarriers < taps * tx)
    fail(ErrorKind::kIdentifiability, "build_gram: K=" + std::to_string(subcarriers) +
                                          " is smaller than L*tx=" + std::to_string(taps * tx) +
                                          "; the taps are not identifiable");
  TrainingDesign d;
  d.subcarriers = subcarriers;
  d.taps = taps;
  d.tx = tx;
  d.alpha = alpha;
  d.spatial_correlation = exponential_correlation(tx, alpha);
  d.gram = kron(ComplexMatrix::Identity(taps, taps),
                static_cast<double>(subcarriers) * d.spatial_correlation);
  return d;
}

TrainingBlock materialize_sequence(const TrainingDesign& design, RandomStream& rng) {
  const int k = design.subcarriers;
  const int tx = design.tx;
  const int taps = design.taps;
  if (k < taps * tx) fail(ErrorKind::kIdentifiability, "materialize_sequence: K < L*tx");

  // Zadoff-Chu root 1: unit modulus, ideal periodic autocorrelation for any K.
  ComplexVector zc(k);
  const int odd = k % 2;
  for (int i = 0; i < k; ++i) {
    const double n = static_cast<double>(i);
    zc(i) = std::polar(1.0, -std::numbers::pi * n * (n + odd) / k);
  }

  ComplexMatrix white(tx, k);
  for (int a = 0; a < tx; ++a) {
    const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    for (int i = 0; i < k; ++i) white(a, i) = phase * zc(((i - a * taps) % k + k) % k);
  }

  Eigen::LLT<ComplexMatrix> chol(design.spatial_correlation);
  if (chol.info() != Eigen::Success)
    fail(ErrorKind::kNumericalFailure, "materialize_sequence: spatial correlation is not positive definite");
  const ComplexMatrix lower = chol.matrixL();

  TrainingBlock block;
  block.sequence = lower * white;
  return block;
}

ComplexMatrix data_matrix(const TrainingBlock& block, int taps) {
  const int k = block.length();
  const int tx = block.tx();
  ComplexMatrix d(taps * tx, k);
  for (int l = 0; l < taps; ++l)
    for (int i = 0; i < k; ++i) d.block(l * tx, i, tx, 1) = block.sequence.col(((i - l) % k + k) % k);
  return d;
}

}  // namespace afrelay
