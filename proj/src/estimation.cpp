#include "estimation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace afrelay {

namespace {

bool uses_ml(const TapPriors& priors) {
  if (priors.empty()) return true;
  for (double p : priors)
    if (std::isinf(p)) return true;
  return false;
}

void check_priors(const TapPriors& priors, int taps, const char* who) {
  if (priors.empty()) return;
  if (static_cast<int>(priors.size()) != taps)
    fail(ErrorKind::kDimension, std::string(who) + ": expected " + std::to_string(taps) + " tap priors, got " +
                                    std::to_string(priors.size()));
  for (double p : priors)
    if (!(p > 0.0)) fail(ErrorKind::kContractViolation, std::string(who) + ": tap prior variances must be > 0");
}

// Lambda^-1 kron I_block (diagonal), zero in the ML limit.
RealVector prior_precision(const TapPriors& priors, int taps, int block) {
  RealVector precision = RealVector::Zero(static_cast<Eigen::Index>(taps) * block);
  if (uses_ml(priors)) return precision;
  for (int l = 0; l < taps; ++l) precision.segment(static_cast<Eigen::Index>(l) * block, block).setConstant(1.0 / priors[l]);
  return precision;
}

ComplexMatrix inverse_pd(const ComplexMatrix& a, const char* who) {
  const ComplexMatrix h = hermitian_part(a);
  Eigen::LLT<ComplexMatrix> llt(h);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::kIdentifiability, std::string(who) + ": normal equations are singular (training does not identify the taps)");
  const ComplexMatrix inv = llt.solve(ComplexMatrix::Identity(h.rows(), h.cols()));
  if (!all_finite(inv)) fail(ErrorKind::kIdentifiability, std::string(who) + ": normal equations are singular");
  return hermitian_part(inv);
}

}  // namespace

ComplexMatrix psi_from_phi(const ComplexMatrix& phi, int tx, int taps, int subcarriers, int k) {
  if (phi.rows() != static_cast<Eigen::Index>(tx) * taps || phi.cols() != phi.rows())
    fail(ErrorKind::kDimension, "psi_from_phi: phi is " + shape_string(phi));
  ComplexMatrix sum = ComplexMatrix::Zero(tx, tx);
  for (int l1 = 0; l1 < taps; ++l1) {
    for (int l2 = 0; l2 < taps; ++l2) {
      const long long e = ((static_cast<long long>(k) * (l1 - l2)) % subcarriers + subcarriers) % subcarriers;
      const Complex w = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(e) / subcarriers);
      sum += w * phi.block(static_cast<Eigen::Index>(l1) * tx, static_cast<Eigen::Index>(l2) * tx, tx, tx);
    }
  }
  return hermitian_part(sum.transpose());
}

ErrorMoments error_moments(const TrainingDesign& design, const TapPriors& priors, double sigma_e2, int subcarriers) {
  if (subcarriers < 0) fail(ErrorKind::kContractViolation, "error_moments: subcarrier count must be >= 0");
  const int count = subcarriers == 0 ? design.subcarriers : subcarriers;
  if (count < design.taps)
    fail(ErrorKind::kDimension, "error_moments: " + std::to_string(count) + " subcarriers cannot resolve " +
                                    std::to_string(design.taps) + " taps");
  check_priors(priors, design.taps, "error_moments");
  if (!(sigma_e2 >= 0.0)) fail(ErrorKind::kContractViolation, "error_moments: sigma_e2 must be >= 0");
  const int dim = design.taps * design.tx;
  ErrorMoments m;
  m.sigma_e2 = sigma_e2;
  m.taps = design.taps;
  m.tx = design.tx;
  if (sigma_e2 == 0.0) {
    m.phi = ComplexMatrix::Zero(dim, dim);
  } else {
    const ComplexMatrix information = design.gram.conjugate() / sigma_e2;
    if (uses_ml(priors)) {
      m.phi = inverse_pd(information, "error_moments");
    } else {
      ComplexMatrix precision = information;
      precision.diagonal() += prior_precision(priors, design.taps, design.tx).cast<Complex>();
      m.phi = inverse_pd(precision, "error_moments");
    }
  }
  m.phi_root = sigma_e2 == 0.0 ? m.phi : hermitian_sqrt(m.phi);
  m.psi.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) m.psi.push_back(psi_from_phi(m.phi, design.tx, design.taps, count, k));
  return m;
}

TapEstimator::TapEstimator(const ComplexMatrix& data_matrix, int rx, const TapPriors& priors, double sigma_n2) {
  if (rx < 1) fail(ErrorKind::kContractViolation, "TapEstimator: rx must be >= 1");
  if (!(sigma_n2 >= 0.0)) fail(ErrorKind::kContractViolation, "TapEstimator: noise variance must be >= 0");
  const Eigen::Index rows = data_matrix.rows();  // L * tx
  if (rows == 0 || data_matrix.cols() < rows)
    fail(ErrorKind::kIdentifiability, "TapEstimator: training block " + shape_string(data_matrix) +
                                          " cannot identify the taps");
  // Block size tx is not known from D alone when L is; priors carry L.
  const int taps = priors.empty() ? 0 : static_cast<int>(priors.size());
  if (taps > 0) {
    check_priors(priors, taps, "TapEstimator");
    if (rows % taps != 0) fail(ErrorKind::kDimension, "TapEstimator: prior count does not divide D's row count");
  }

  observation_ = kron(data_matrix.transpose(), ComplexMatrix::Identity(rx, rx));
  const ComplexMatrix gram = hermitian_part(observation_.adjoint() * observation_);
  const bool ml = uses_ml(priors) || sigma_n2 == 0.0;
  if (ml) {
    const ComplexMatrix inv = inverse_pd(gram, "lmmse_estimate");
    weights_ = inv * observation_.adjoint();
    error_covariance_ = sigma_n2 * inv;
  } else {
    const int block = static_cast<int>(rows / taps) * rx;
    ComplexMatrix precision = gram / sigma_n2;
    precision.diagonal() += prior_precision(priors, taps, block).cast<Complex>();
    error_covariance_ = inverse_pd(precision, "lmmse_estimate");
    weights_ = error_covariance_ * observation_.adjoint() / sigma_n2;
  }
}

ComplexVector TapEstimator::estimate(const ComplexVector& received) const {
  if (received.size() != observation_.rows())
    fail(ErrorKind::kDimension, "TapEstimator::estimate: expected " + std::to_string(observation_.rows()) +
                                    " received samples, got " + std::to_string(received.size()));
  return weights_ * received;
}

ComplexVector TapEstimator::observe(const ComplexVector& taps) const {
  if (taps.size() != observation_.cols()) fail(ErrorKind::kDimension, "TapEstimator::observe: tap vector size");
  return observation_ * taps;
}

ComplexVector lmmse_estimate(const ComplexVector& received, const ComplexMatrix& data_matrix, int rx,
                             const TapPriors& priors, double sigma_n2) {
  return TapEstimator(data_matrix, rx, priors, sigma_n2).estimate(received);
}

ComplexVector vectorize_taps(const MultipathChannel& channel) {
  const int rx = channel.rx();
  const int tx = channel.tx();
  ComplexVector xi(static_cast<Eigen::Index>(channel.length()) * tx * rx);
  for (int l = 0; l < channel.length(); ++l)
    for (int n = 0; n < tx; ++n) xi.segment((static_cast<Eigen::Index>(l) * tx + n) * rx, rx) = channel.taps[l].col(n);
  return xi;
}

MultipathChannel unvectorize_taps(const ComplexVector& xi, int rx, int tx, int taps) {
  if (xi.size() != static_cast<Eigen::Index>(rx) * tx * taps)
    fail(ErrorKind::kDimension, "unvectorize_taps: vector length does not match rx*tx*L");
  MultipathChannel ch;
  ch.taps.assign(static_cast<std::size_t>(taps), ComplexMatrix(rx, tx));
  ch.tap_powers.assign(static_cast<std::size_t>(taps), 0.0);
  for (int l = 0; l < taps; ++l) {
    for (int n = 0; n < tx; ++n) ch.taps[l].col(n) = xi.segment((static_cast<Eigen::Index>(l) * tx + n) * rx, rx);
    ch.tap_powers[l] = ch.taps[l].squaredNorm() / (static_cast<double>(rx) * tx);
  }
  return ch;
}

MultipathChannel sample_tap_errors(const ErrorMoments& moments, int rx, RandomStream& rng) {
  const int tx = moments.tx;
  const int taps = moments.taps;
  const Eigen::Index dim = static_cast<Eigen::Index>(tx) * taps;
  // E = Z S^T with S S^H = phi gives cov(vec E) = phi kron I_rx.
  ComplexMatrix z(rx, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (int i = 0; i < rx; ++i) z(i, j) = rng.complex_normal(1.0);
  const ComplexMatrix root = moments.phi_root.rows() == dim ? moments.phi_root
                             : moments.sigma_e2 == 0.0 ? ComplexMatrix::Zero(dim, dim)
                                                       : hermitian_sqrt(moments.phi);
  const ComplexMatrix e = z * root.transpose();

  MultipathChannel err;
  err.taps.reserve(static_cast<std::size_t>(taps));
  for (int l = 0; l < taps; ++l) err.taps.push_back(e.block(0, static_cast<Eigen::Index>(l) * tx, rx, tx));
  for (int l = 0; l < taps; ++l)
    err.tap_powers.push_back(moments.phi.block(static_cast<Eigen::Index>(l) * tx, static_cast<Eigen::Index>(l) * tx, tx, tx)
                                 .diagonal().real().mean());
  return err;
}

ChannelEstimate sample_estimate(const MultipathChannel& truth, const ErrorMoments& moments, int subcarriers,
                                RandomStream& rng) {
  if (truth.tx() != moments.tx || truth.length() != moments.taps)
    fail(ErrorKind::kDimension, "sample_estimate: moments describe " + std::to_string(moments.taps) + " taps x " +
                                    std::to_string(moments.tx) + " tx, channel has " + std::to_string(truth.length()) +
                                    " x " + std::to_string(truth.tx()));
  ChannelEstimate out;
  out.tap_errors = sample_tap_errors(moments, truth.rx(), rng);
  MultipathChannel estimate = truth;
  for (int l = 0; l < truth.length(); ++l) estimate.taps[l] -= out.tap_errors.taps[l];
  out.estimated = to_frequency(estimate, subcarriers);
  return out;
}

ComplexMatrix expected_sandwich(const ComplexMatrix& psi, const ComplexMatrix& r, int out_dim) {
  require_square(psi, "expected_sandwich");
  require_square(r, "expected_sandwich");
  if (psi.rows() != r.rows())
    fail(ErrorKind::kDimension, "expected_sandwich: R is " + shape_string(r) + " but psi is " + shape_string(psi));
  return (r * psi).trace() * ComplexMatrix::Identity(out_dim, out_dim);
}

}  // namespace afrelay
