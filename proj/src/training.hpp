#pragma once

#include "numerics.hpp"
#include "rng.hpp"

namespace afrelay {

// Second-order description of a time-white, spatially correlated training block.
struct TrainingDesign {
  int subcarriers = 0;  // K
  int taps = 0;         // L
  int tx = 0;           // transmit antennas of the trained hop
  double alpha = 0.0;   // exponential spatial correlation coefficient
  ComplexMatrix spatial_correlation;  // C, tx x tx, C(i,j) = alpha^|i-j|
  ComplexMatrix gram;                 // D D^H = I_L kron (K C)
};

// The materialized block: column i of `sequence` is d_i (tx entries).
struct TrainingBlock {
  ComplexMatrix sequence;  // tx x K

  int tx() const { return static_cast<int>(sequence.rows()); }
  int length() const { return static_cast<int>(sequence.cols()); }
};

ComplexMatrix exponential_correlation(int size, double alpha);

TrainingDesign build_gram(int subcarriers, int taps, int tx, double alpha);

// Any sequence with the design's Gram is equivalent for linear estimation. This
// one uses cyclic shifts (by multiples of L) of a Zadoff-Chu sequence, so all
// lags below L are orthogonal across antennas, then colors spatially with the
// Cholesky factor of C. A random per-antenna phase is drawn from `rng`.
TrainingBlock materialize_sequence(const TrainingDesign& design, RandomStream& rng);

// Block-circulant data matrix D, (L*tx) x K: block row l, column i holds d_{(i-l) mod K}.
ComplexMatrix data_matrix(const TrainingBlock& block, int taps);

}  // namespace afrelay
