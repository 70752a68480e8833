#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "errors.hpp"

namespace afrelay {

namespace {

int eigen_rank(const RealVector& eigenvalues) { return numerical_rank(eigenvalues.cwiseMax(0.0).cwiseSqrt()); }

ComplexMatrix real_diagonal(const RealVector& values) {
  return values.cast<Complex>().asDiagonal();
}

double relative_gap(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  const double scale = std::max(lhs.norm(), rhs.norm());
  if (scale == 0.0) return 0.0;
  return (lhs - rhs).norm() / scale;
}

double relative_gap(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return std::abs(lhs - rhs) / scale;
}

double lambda_max(const ComplexMatrix& psi) { return eigh_ordered(psi).eigenvalues(0); }

double lambda_min(const ComplexMatrix& psi) {
  const RealVector values = eigh_ordered(psi).eigenvalues;
  return values(values.size() - 1);
}

}  // namespace

const char* variant_name(Variant variant) {
  switch (variant) {
    case Variant::kUncorrelated: return "uncorrelated";
    case Variant::kHsa: return "hsa";
    case Variant::kSpa: return "spa";
    case Variant::kSwitched: return "switched";
    case Variant::kNaive: return "naive";
    case Variant::kRobust: return "robust";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::kUncorrelated, Variant::kHsa, Variant::kSpa, Variant::kSwitched, Variant::kNaive,
                    Variant::kRobust})
    if (name == variant_name(v)) return v;
  fail(ErrorKind::kValidation,
       "unknown variant '" + name + "' (expected uncorrelated, hsa, spa, switched, naive or robust)");
}

bool is_scaled_identity(const ComplexMatrix& psi, double tolerance) {
  if (psi.rows() != psi.cols()) return false;
  if (psi.rows() == 0) return true;
  const double scale = psi.trace().real() / static_cast<double>(psi.rows());
  const ComplexMatrix target = scale * ComplexMatrix::Identity(psi.rows(), psi.cols());
  const double reference = std::max(std::abs(scale), psi.cwiseAbs().maxCoeff());
  return max_abs_diff(psi, target) <= tolerance * reference;
}

SubcarrierDecomposition decompose_subcarrier(const ComplexMatrix& h_rd, const ComplexMatrix& h_sr,
                                             const ComplexMatrix& r_s, const ComplexMatrix& r_x,
                                             const ComplexMatrix& psi_rd, double power, double sigma_n2_2) {
  if (!(power >= 0.0)) fail(ErrorKind::kContractViolation, "decompose_subcarrier: power must be >= 0");
  if (!(sigma_n2_2 > 0.0)) fail(ErrorKind::kContractViolation, "decompose_subcarrier: sigma_n2^2 must be > 0");
  if (psi_rd.rows() != h_rd.cols() || psi_rd.cols() != h_rd.cols())
    fail(ErrorKind::kDimension, "decompose_subcarrier: psi_rd is " + shape_string(psi_rd) + ", H_rd is " +
                                    shape_string(h_rd));
  if (r_x.rows() != h_sr.rows() || r_x.cols() != h_sr.rows() || r_s.rows() != h_sr.cols())
    fail(ErrorKind::kDimension, "decompose_subcarrier: R_x/R_s do not conform with H_sr");

  SubcarrierDecomposition d;
  d.m = hermitian_part(power * psi_rd);
  d.m.diagonal().array() += sigma_n2_2;
  d.m_inv_sqrt = hermitian_inv_sqrt(d.m);
  const ComplexMatrix theta = h_rd * d.m_inv_sqrt;
  const OrderedEigh eig = eigh_ordered(hermitian_part(theta.adjoint() * theta));
  d.u_theta = eig.u;
  d.lambda_theta = eig.eigenvalues.cwiseMax(0.0);

  d.r_x_inv_sqrt = hermitian_inv_sqrt(r_x);
  const OrderedSVD svd = svd_ordered(d.r_x_inv_sqrt * h_sr * r_s);
  d.u_t = svd.u;
  d.lambda_t = svd.singular_values;
  d.v_t = svd.v;

  const ComplexMatrix m_inv = d.m_inv_sqrt * d.m_inv_sqrt;
  d.m_weights = (d.u_theta.adjoint() * m_inv * d.u_theta).diagonal().real();

  d.p = numerical_rank(d.lambda_t);
  d.q = eigen_rank(d.lambda_theta);
  d.n = std::min(d.p, d.q);
  return d;
}

SpectralFactors spectral_factors(const RealVector& lambda_t, const RealVector& lambda_theta, double eta, double gamma,
                                 double sigma_n2_2) {
  if (lambda_t.size() != lambda_theta.size())
    fail(ErrorKind::kDimension, "spectral_factors: lambda_T and lambda_Theta differ in length");
  if (!(gamma > 0.0)) fail(ErrorKind::kInfeasible, "spectral_factors: gamma must be > 0");
  if (!(eta > 0.0)) fail(ErrorKind::kInfeasible, "spectral_factors: eta must be > 0");
  if (!(sigma_n2_2 > 0.0)) fail(ErrorKind::kContractViolation, "spectral_factors: sigma_n2^2 must be > 0");

  const double water = std::sqrt(sigma_n2_2 * eta / gamma);
  const double inverse_water = std::sqrt(gamma / (eta * sigma_n2_2));
  const double ratio = gamma / sigma_n2_2;
  SpectralFactors out;
  out.lambda_f = RealVector::Zero(lambda_t.size());
  out.lambda_g = RealVector::Zero(lambda_t.size());
  for (Eigen::Index i = 0; i < lambda_t.size(); ++i) {
    const double lt = lambda_t(i);
    const double lth = lambda_theta(i);
    if (!(lth > 0.0) || !(lt > 0.0)) continue;
    const double f2 = water * lt / std::sqrt(lth) - eta / lth;
    const double g2 = (inverse_water * lt / std::sqrt(lth) - ratio / lth) / lth;
    if (f2 > 0.0 && g2 > 0.0) {
      out.lambda_f(i) = std::sqrt(f2);
      out.lambda_g(i) = std::sqrt(g2);
      ++out.active;
    }
  }
  return out;
}

ModeScalars mode_scalars(const SubcarrierDecomposition& d, int modes) {
  ModeScalars s;
  for (int i = 0; i < modes; ++i) {
    const double lt = d.lambda_t(i);
    const double lth = d.lambda_theta(i);
    const double m = d.m_weights(i);
    s.b1 += m * lt / std::sqrt(lth);
    s.b2 += m / lth;
    s.b3 += lt / std::sqrt(lth);
    s.b4 += 1.0 / lth;
  }
  return s;
}

Allocation allocate_uncorrelated(const std::vector<RealVector>& lambda_t, const std::vector<RealVector>& lambda_h,
                                 const std::vector<double>& delta, double p_r, double sigma_n2_2) {
  const std::size_t count = lambda_t.size();
  if (lambda_h.size() != count || delta.size() != count)
    fail(ErrorKind::kDimension, "allocate_uncorrelated: per-subcarrier inputs differ in length");
  if (!(p_r > 0.0)) fail(ErrorKind::kContractViolation, "allocate_uncorrelated: P_r must be > 0");
  if (!(sigma_n2_2 > 0.0)) fail(ErrorKind::kContractViolation, "allocate_uncorrelated: sigma_n2^2 must be > 0");

  Allocation out;
  out.active.resize(count);
  out.power.assign(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    if (!(delta[k] >= 0.0)) fail(ErrorKind::kContractViolation, "allocate_uncorrelated: delta must be >= 0");
    out.active[k] = std::min(numerical_rank(lambda_t[k]), eigen_rank(lambda_h[k]));
  }

  std::vector<double> a(count), c(count), d(count);
  double nu = 0.0;
  for (;;) {
    double numerator = p_r;
    double denominator = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < count; ++k) {
      a[k] = c[k] = 0.0;
      d[k] = 1.0;
      if (out.active[k] == 0) continue;
      any = true;
      for (int i = 0; i < out.active[k]; ++i) {
        a[k] += lambda_t[k](i) / std::sqrt(lambda_h[k](i));
        c[k] += 1.0 / lambda_h[k](i);
      }
      d[k] = 1.0 + delta[k] * c[k];
      numerator += sigma_n2_2 * c[k] / d[k];
      denominator += a[k] / d[k];
    }
    if (!any) fail(ErrorKind::kInfeasible, "allocate_uncorrelated: no subcarrier can carry a mode");
    nu = numerator / denominator;

    bool changed = false;
    for (std::size_t k = 0; k < count; ++k) {
      if (out.active[k] == 0) {
        out.power[k] = 0.0;
        continue;
      }
      out.power[k] = (nu * a[k] - sigma_n2_2 * c[k]) / d[k];
      if (!(out.power[k] > 0.0)) {
        --out.active[k];
        changed = true;
      }
    }
    if (changed) continue;
    for (std::size_t k = 0; k < count; ++k) {
      const int last = out.active[k] - 1;
      if (last < 0) continue;
      const double cut = (out.power[k] * delta[k] + sigma_n2_2) / nu;
      if (!(lambda_t[k](last) * std::sqrt(lambda_h[k](last)) > cut)) {
        --out.active[k];
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (std::size_t k = 0; k < count; ++k)
    if (out.active[k] == 0) out.power[k] = 0.0;
  out.gamma = sigma_n2_2 / (nu * nu);
  return out;
}

Allocation allocate_hsa(const std::vector<RealVector>& lambda_t, const std::vector<RealVector>& lambda_gamma,
                        const std::vector<RealVector>& weights, double p_r, double sigma_n2_2,
                        std::vector<HsaScalars>* scalars) {
  const std::size_t count = lambda_t.size();
  if (lambda_gamma.size() != count || weights.size() != count)
    fail(ErrorKind::kDimension, "allocate_hsa: per-subcarrier inputs differ in length");
  if (!(p_r > 0.0)) fail(ErrorKind::kContractViolation, "allocate_hsa: P_r must be > 0");

  std::vector<HsaScalars> per(count);
  for (std::size_t k = 0; k < count; ++k) {
    int n = std::min(numerical_rank(lambda_t[k]), eigen_rank(lambda_gamma[k]));
    HsaScalars s;
    for (; n > 0; --n) {
      s = HsaScalars{};
      for (int i = 0; i < n; ++i) {
        const double lt = lambda_t[k](i);
        const double lg = lambda_gamma[k](i);
        const double w = weights[k](i);
        s.c1 += w * lt / std::sqrt(lg);
        s.c2 += w / lg;
        s.c3 += lt / std::sqrt(lg);
        s.c4 += 1.0 / lg;
      }
      s.chi = s.c3 * sigma_n2_2 * (s.c1 + s.c1 * s.c4 - s.c2 * s.c3) / ((1.0 + s.c4) * (1.0 + s.c4));
      const double cut = s.c3 / (1.0 + s.c4);
      bool consistent = s.chi > 0.0;
      for (int i = 0; i < n && consistent; ++i)
        consistent = lambda_t[k](i) * std::sqrt(lambda_gamma[k](i)) > cut;
      if (consistent) break;
    }
    if (n == 0) s = HsaScalars{};
    s.active = n;
    per[k] = s;
  }

  double root_sum = 0.0;
  for (const auto& s : per) root_sum += std::sqrt(s.chi);
  if (!(root_sum > 0.0)) fail(ErrorKind::kInfeasible, "allocate_hsa: every subcarrier has chi <= 0");

  Allocation out;
  out.power.resize(count);
  out.active.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.power[k] = p_r * std::sqrt(per[k].chi) / root_sum;
    out.active[k] = per[k].active;
  }
  out.gamma = (root_sum / p_r) * (root_sum / p_r);
  if (scalars) *scalars = std::move(per);
  return out;
}

Allocation allocate_spa(const std::vector<RealVector>& lambda_t, const std::vector<RealVector>& lambda_h,
                        const std::vector<ComplexMatrix>& psi_rd, double p_r, double sigma_n2_2) {
  std::vector<double> delta;
  delta.reserve(psi_rd.size());
  for (const auto& psi : psi_rd) delta.push_back(std::max(0.0, lambda_max(psi)));
  return allocate_uncorrelated(lambda_t, lambda_h, delta, p_r, sigma_n2_2);
}

std::vector<ComplexMatrix> TransceiverSolution::precoders() const {
  std::vector<ComplexMatrix> out;
  out.reserve(subcarriers.size());
  for (const auto& s : subcarriers) out.push_back(s.f);
  return out;
}

std::vector<ComplexMatrix> TransceiverSolution::equalizers() const {
  std::vector<ComplexMatrix> out;
  out.reserve(subcarriers.size());
  for (const auto& s : subcarriers) out.push_back(s.g);
  return out;
}

SubcarrierSolution build_subcarrier(const SubcarrierLink& link, double sigma_n1_2, double sigma_n2_2, double power,
                                    int max_modes) {
  SubcarrierSolution out;
  out.f = ComplexMatrix::Zero(link.h_rd.cols(), link.h_sr.rows());
  out.g = ComplexMatrix::Zero(link.r_s.rows(), link.h_rd.rows());
  if (!(power > 0.0) || max_modes <= 0) return out;

  const ComplexMatrix r_x = relay_covariance(link, sigma_n1_2);
  const SubcarrierDecomposition d =
      decompose_subcarrier(link.h_rd, link.h_sr, link.r_s, r_x, link.psi_rd, power, sigma_n2_2);
  for (int n = std::min(d.n, max_modes); n >= 1; --n) {
    const ModeScalars b = mode_scalars(d, n);
    const double spread = power * b.b1 + b.b1 * b.b4 - b.b2 * b.b3;
    if (!(spread > 0.0)) continue;
    const double eta = power * b.b3 / spread;
    const double gamma = sigma_n2_2 * b.b3 * spread / ((power + b.b4) * (power + b.b4) * power);
    const double cut = b.b3 / (power + b.b4);
    bool consistent = true;
    for (int i = 0; i < n && consistent; ++i) consistent = d.lambda_t(i) * std::sqrt(d.lambda_theta(i)) > cut;
    if (!consistent) continue;

    out.lambda_t = d.lambda_t.head(n);
    out.lambda_theta = d.lambda_theta.head(n);
    const SpectralFactors sf = spectral_factors(out.lambda_t, out.lambda_theta, eta, gamma, sigma_n2_2);
    if (sf.active != n) continue;
    out.lambda_f = sf.lambda_f;
    out.lambda_g = sf.lambda_g;
    out.power = power;
    out.gamma = gamma;
    out.eta = eta;
    out.active_modes = n;
    out.f = d.m_inv_sqrt * d.u_theta.leftCols(n) * real_diagonal(sf.lambda_f) * d.u_t.leftCols(n).adjoint() *
            d.r_x_inv_sqrt;
    out.g = d.v_t.leftCols(n) * real_diagonal(sf.lambda_g) * d.u_theta.leftCols(n).adjoint() * d.m_inv_sqrt *
            link.h_rd.adjoint();
    return out;
  }
  fail(ErrorKind::kInfeasible, "build_subcarrier: no consistent mode set for power " + std::to_string(power));
}

TransceiverSolution fit_power_budget(const TransceiverSolution& solution, const LinkInputs& actual) {
  if (actual.subcarriers() != solution.size())
    fail(ErrorKind::kDimension, "fit_power_budget: solution and inputs differ in subcarrier count");
  TransceiverSolution out = solution;
  for (int k = 0; k < out.size(); ++k) {
    auto& sc = out.subcarriers[k];
    if (!(sc.power > 0.0)) continue;
    const double used = relay_power(sc.f, relay_covariance(actual.links[k], actual.sigma_n1_2));
    if (used > 0.0) sc.f *= std::sqrt(sc.power / used);
  }
  return out;
}

LinkInputs spectral_surrogate(const LinkInputs& inputs) {
  LinkInputs out = inputs;
  for (auto& link : out.links) {
    const double top = std::max(0.0, lambda_max(link.psi_rd));
    link.psi_rd = top * ComplexMatrix::Identity(link.psi_rd.rows(), link.psi_rd.cols());
  }
  return out;
}

TransceiverSolution solve(const LinkInputs& inputs, double p_r, Variant variant, double threshold) {
  validate_inputs(inputs);
  if (!(p_r > 0.0) || !std::isfinite(p_r)) fail(ErrorKind::kContractViolation, "solve: P_r must be finite and > 0");
  if (!(threshold >= 0.0)) fail(ErrorKind::kContractViolation, "solve: threshold must be >= 0");

  TransceiverSolution sol;
  sol.requested = variant;
  sol.total_power = p_r;
  sol.design = variant == Variant::kNaive ? without_errors(inputs) : inputs;
  const int count = inputs.subcarriers();
  const double s1 = inputs.sigma_n1_2;
  const double s2 = inputs.sigma_n2_2;

  bool scalar_errors = true;
  for (const auto& link : sol.design.links) scalar_errors = scalar_errors && is_scaled_identity(link.psi_rd);

  auto vote = [&]() {
    const double proxy = p_r / count;
    for (const auto& link : sol.design.links) {
      if (proxy * lambda_min(link.psi_rd) / s2 >= threshold)
        ++sol.hsa_votes;
      else
        ++sol.spa_votes;
    }
    return sol.hsa_votes > sol.spa_votes ? Variant::kHsa : Variant::kSpa;
  };

  switch (variant) {
    case Variant::kNaive: sol.applied = Variant::kNaive; break;
    case Variant::kUncorrelated:
      if (!scalar_errors)
        fail(ErrorKind::kValidation, "solve: the uncorrelated variant needs every psi_rd to be a multiple of I");
      sol.applied = Variant::kUncorrelated;
      break;
    case Variant::kRobust: sol.applied = scalar_errors ? Variant::kUncorrelated : vote(); break;
    case Variant::kSwitched: sol.applied = vote(); break;
    case Variant::kHsa: sol.applied = Variant::kHsa; break;
    case Variant::kSpa: sol.applied = Variant::kSpa; break;
  }
  // SPA solves the problem with psi_rd widened to lambda_max I; its precoder
  // and equalizer are the closed form of that problem.
  if (sol.applied == Variant::kSpa) sol.design = spectral_surrogate(sol.design);
  const LinkInputs& design = sol.design;

  std::vector<RealVector> lambda_t(count);
  for (int k = 0; k < count; ++k) {
    const auto& link = design.links[k];
    const ComplexMatrix r_x = relay_covariance(link, s1);
    lambda_t[k] = svd_ordered(hermitian_inv_sqrt(r_x) * link.h_sr * link.r_s).singular_values;
  }

  Allocation alloc;
  if (sol.applied == Variant::kHsa) {
    std::vector<RealVector> lambda_gamma(count), weights(count);
    for (int k = 0; k < count; ++k) {
      const auto& link = design.links[k];
      const ComplexMatrix root = hermitian_inv_sqrt(link.psi_rd);
      const ComplexMatrix gamma_mat = link.h_rd * root;
      const OrderedEigh e = eigh_ordered(hermitian_part(gamma_mat.adjoint() * gamma_mat));
      lambda_gamma[k] = e.eigenvalues.cwiseMax(0.0);
      weights[k] = (e.u.adjoint() * root * root * e.u).diagonal().real();
    }
    alloc = allocate_hsa(lambda_t, lambda_gamma, weights, p_r, s2);
  } else {
    std::vector<RealVector> lambda_h(count);
    std::vector<double> delta(count);
    for (int k = 0; k < count; ++k) {
      const auto& link = design.links[k];
      lambda_h[k] = eigh_ordered(hermitian_part(link.h_rd.adjoint() * link.h_rd)).eigenvalues.cwiseMax(0.0);
      delta[k] = std::max(0.0, link.psi_rd.trace().real() / static_cast<double>(link.psi_rd.rows()));
    }
    alloc = allocate_uncorrelated(lambda_t, lambda_h, delta, p_r, s2);
  }
  sol.gamma = alloc.gamma;

  sol.subcarriers.reserve(count);
  for (int k = 0; k < count; ++k)
    sol.subcarriers.push_back(build_subcarrier(design.links[k], s1, s2, alloc.power[k], alloc.active[k]));
  return sol;
}

double KktReport::max_structural() const {
  return std::max({stationarity_g, stationarity_f, slackness, total_slackness, power_violation, total_violation,
                   gain_identity, trace_identity});
}

double KktReport::max_all() const { return std::max(max_structural(), multiplier_spread); }

KktReport kkt_residuals(const TransceiverSolution& solution) { return kkt_residuals(solution, solution.design); }

KktReport kkt_residuals(const TransceiverSolution& solution, const LinkInputs& inputs) {
  if (inputs.subcarriers() != solution.size())
    fail(ErrorKind::kDimension, "kkt_residuals: solution and inputs differ in subcarrier count");
  KktReport rep;
  const double s1 = inputs.sigma_n1_2;
  const double s2 = inputs.sigma_n2_2;
  double power_sum = 0.0;
  double gamma_lo = std::numeric_limits<double>::infinity();
  double gamma_hi = 0.0;
  double gamma_total = 0.0;
  int carrying = 0;

  for (int k = 0; k < solution.size(); ++k) {
    const auto& sc = solution.subcarriers[k];
    const auto& link = inputs.links[k];
    power_sum += sc.power;
    if (!(sc.power > 0.0)) continue;
    ++carrying;
    const ComplexMatrix& f = sc.f;
    const ComplexMatrix& g = sc.g;
    if (f.norm() == 0.0) rep.feasible = false;

    const ComplexMatrix r_x = relay_covariance(link, s1);
    const double eta = effective_noise(f, r_x, link.psi_rd, s2);
    const ComplexMatrix hf = link.h_rd * f;
    ComplexMatrix inner = hf * r_x * hf.adjoint();
    inner.diagonal().array() += eta;
    rep.stationarity_g =
        std::max(rep.stationarity_g, relative_gap(g * inner, link.r_s * link.h_sr.adjoint() * hf.adjoint()));

    const double gg = (g * g.adjoint()).trace().real();
    const ComplexMatrix fr = f * r_x;
    const ComplexMatrix lhs =
        link.h_rd.adjoint() * g.adjoint() * g * link.h_rd * fr + gg * link.psi_rd * fr + sc.gamma * fr;
    const ComplexMatrix rhs = link.h_rd.adjoint() * g.adjoint() * link.r_s * link.h_sr.adjoint();
    rep.stationarity_f = std::max(rep.stationarity_f, relative_gap(lhs, rhs));

    const double used = relay_power(f, r_x);
    rep.slackness = std::max(rep.slackness, std::abs(used - sc.power) / sc.power);
    rep.power_violation = std::max(rep.power_violation, std::max(0.0, used - sc.power) / sc.power);
    rep.gain_identity = std::max(rep.gain_identity, relative_gap(s2 * gg, sc.gamma * sc.power));

    const double psi_term = gg * (f.adjoint() * link.psi_rd * f * r_x).trace().real();
    const double via_kkt = psi_term + sc.gamma * (f.adjoint() * f * r_x).trace().real();
    const double via_noise = psi_term + s2 * gg;
    rep.trace_identity = std::max(rep.trace_identity, relative_gap(via_kkt, via_noise));

    gamma_lo = std::min(gamma_lo, sc.gamma);
    gamma_hi = std::max(gamma_hi, sc.gamma);
    gamma_total += sc.gamma;
  }

  const double p_r = solution.total_power;
  rep.total_slackness = p_r > 0.0 ? std::abs(power_sum - p_r) / p_r : 1.0;
  rep.total_violation = p_r > 0.0 ? std::max(0.0, power_sum - p_r) / p_r : 0.0;
  if (carrying > 0 && gamma_total > 0.0) rep.multiplier_spread = (gamma_hi - gamma_lo) / (gamma_total / carrying);
  if (carrying == 0 || rep.slackness > 1e-6 || rep.total_slackness > 1e-6) rep.feasible = false;
  return rep;
}

}  // namespace afrelay
