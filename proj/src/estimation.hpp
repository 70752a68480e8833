#pragma once

#include <vector>

#include "channel.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "training.hpp"

namespace afrelay {

// Second-order moments of the channel-estimation error of one hop.
//
// `phi` is the (L*tx) x (L*tx) tap-error covariance, indexed by l*tx + n, so the
// covariance of vec([dH^(0) ... dH^(L-1)]) is phi kron I_rx. `psi[k]` is the
// tx x tx matrix with E{dH_k R dH_k^H} = Tr(R psi[k]) I_rx.
struct ErrorMoments {
  ComplexMatrix phi;
  ComplexMatrix phi_root;  // Hermitian square root of phi, used for sampling
  std::vector<ComplexMatrix> psi;
  double sigma_e2 = 0.0;
  int taps = 0;
  int tx = 0;

  int subcarriers() const { return static_cast<int>(psi.size()); }
};

struct ChannelEstimate {
  SubcarrierChannels estimated;  // H_hat_k
  MultipathChannel tap_errors;   // dH^(l) = H^(l) - H_hat^(l)
};

// An empty prior (or any infinite entry) selects the uninformative-prior ML limit.
using TapPriors = std::vector<double>;

// Psi_k = (sum_{l1,l2} exp(-j 2 pi k (l1 - l2) / K) phi_{l1,l2})^T, Hermitian part.
ComplexMatrix psi_from_phi(const ComplexMatrix& phi, int tx, int taps, int subcarriers, int k);

// Tap-error covariance (Lambda^-1 kron I_tx + D* D^T / sigma_e2)^-1 evaluated on
// the design Gram, and Psi_k on `subcarriers` data subcarriers (0 means the
// training length).
ErrorMoments error_moments(const TrainingDesign& design, const TapPriors& priors, double sigma_e2,
                           int subcarriers = 0);

// Linear tap estimator for r = (D^T kron I_rx) xi + v, v ~ CN(0, sigma_n2 I).
class TapEstimator {
 public:
  TapEstimator(const ComplexMatrix& data_matrix, int rx, const TapPriors& priors, double sigma_n2);

  ComplexVector estimate(const ComplexVector& received) const;
  // Error covariance of `estimate`, (L*tx*rx) square; equals phi kron I_rx.
  const ComplexMatrix& error_covariance() const { return error_covariance_; }
  const ComplexMatrix& weights() const { return weights_; }
  // r for a given tap vector (noise-free).
  ComplexVector observe(const ComplexVector& taps) const;

 private:
  ComplexMatrix observation_;  // D^T kron I_rx
  ComplexMatrix weights_;
  ComplexMatrix error_covariance_;
};

ComplexVector lmmse_estimate(const ComplexVector& received, const ComplexMatrix& data_matrix, int rx,
                             const TapPriors& priors, double sigma_n2);

// xi = vec([H^(0) ... H^(L-1)]) and its inverse.
ComplexVector vectorize_taps(const MultipathChannel& channel);
MultipathChannel unvectorize_taps(const ComplexVector& xi, int rx, int tx, int taps);

// Tap errors with covariance phi kron I_rx.
MultipathChannel sample_tap_errors(const ErrorMoments& moments, int rx, RandomStream& rng);

// H_hat = H - dH with dH drawn in the time domain and mapped to every subcarrier,
// so the cross-subcarrier error correlation is exact.
ChannelEstimate sample_estimate(const MultipathChannel& truth, const ErrorMoments& moments, int subcarriers,
                                RandomStream& rng);

// Closed form of E{dH R dH^H}: Tr(R psi) I_out_dim.
ComplexMatrix expected_sandwich(const ComplexMatrix& psi, const ComplexMatrix& r, int out_dim);

}  // namespace afrelay
