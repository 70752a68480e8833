#include "msemodel.hpp"

#include <string>

#include "errors.hpp"

namespace afrelay {

namespace {

void require_shape(const ComplexMatrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    fail(ErrorKind::kDimension, what + " is " + shape_string(m) + ", expected " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
}

}  // namespace

void validate_link(const SubcarrierLink& link) {
  const Eigen::Index ns = link.r_s.rows();
  const Eigen::Index mr = link.h_sr.rows();
  const Eigen::Index nr = link.h_rd.cols();
  const Eigen::Index md = link.h_rd.rows();
  require_shape(link.r_s, ns, ns, "R_s");
  require_shape(link.h_sr, mr, ns, "H_sr");
  require_shape(link.psi_sr, ns, ns, "psi_sr");
  require_shape(link.psi_rd, nr, nr, "psi_rd");
  if (ns == 0 || mr == 0 || nr == 0 || md == 0) fail(ErrorKind::kDimension, "link has an empty dimension");
  require_finite(link.h_sr, "H_sr");
  require_finite(link.h_rd, "H_rd");
  require_finite(link.r_s, "R_s");
  require_finite(link.psi_sr, "psi_sr");
  require_finite(link.psi_rd, "psi_rd");
  if (!is_hermitian(link.r_s, 1e-9)) fail(ErrorKind::kContractViolation, "R_s is not Hermitian");
  if (!is_hermitian(link.psi_sr, 1e-9)) fail(ErrorKind::kContractViolation, "psi_sr is not Hermitian");
  if (!is_hermitian(link.psi_rd, 1e-9)) fail(ErrorKind::kContractViolation, "psi_rd is not Hermitian");
}

void validate_inputs(const LinkInputs& inputs) {
  if (inputs.links.empty()) fail(ErrorKind::kContractViolation, "no subcarriers");
  if (!(inputs.sigma_n1_2 > 0.0) || !(inputs.sigma_n2_2 > 0.0))
    fail(ErrorKind::kContractViolation, "noise variances must be > 0");
  for (const auto& link : inputs.links) {
    validate_link(link);
    const auto& first = inputs.links.front();
    if (link.h_sr.rows() != first.h_sr.rows() || link.h_sr.cols() != first.h_sr.cols() ||
        link.h_rd.rows() != first.h_rd.rows() || link.h_rd.cols() != first.h_rd.cols())
      fail(ErrorKind::kDimension, "subcarriers disagree on antenna counts");
  }
}

ComplexMatrix compute_pi(const ComplexMatrix& h_sr, const ComplexMatrix& r_s, const ComplexMatrix& psi_sr) {
  require_shape(r_s, h_sr.cols(), h_sr.cols(), "R_s");
  require_shape(psi_sr, h_sr.cols(), h_sr.cols(), "psi_sr");
  const double spread = (r_s * psi_sr).trace().real();
  ComplexMatrix pi = h_sr * r_s * h_sr.adjoint();
  pi.diagonal().array() += spread;
  return hermitian_part(pi);
}

ComplexMatrix relay_covariance(const SubcarrierLink& link, double sigma_n1_2) {
  ComplexMatrix r_x = compute_pi(link.h_sr, link.r_s, link.psi_sr);
  r_x.diagonal().array() += sigma_n1_2;
  return r_x;
}

double effective_noise(const ComplexMatrix& f, const ComplexMatrix& r_x, const ComplexMatrix& psi_rd, double sigma_n2_2) {
  return (f * r_x * f.adjoint() * psi_rd).trace().real() + sigma_n2_2;
}

double relay_power(const ComplexMatrix& f, const ComplexMatrix& r_x) { return (f * r_x * f.adjoint()).trace().real(); }

double analytic_mse(const ComplexMatrix& f, const ComplexMatrix& g, const SubcarrierLink& link, double sigma_n1_2,
                    double sigma_n2_2) {
  require_shape(f, link.h_rd.cols(), link.h_sr.rows(), "F");
  require_shape(g, link.r_s.rows(), link.h_rd.rows(), "G");
  const ComplexMatrix r_x = relay_covariance(link, sigma_n1_2);
  const double eta = effective_noise(f, r_x, link.psi_rd, sigma_n2_2);
  const ComplexMatrix hf = link.h_rd * f;
  ComplexMatrix inner = hf * r_x * hf.adjoint();
  inner.diagonal().array() += eta;
  const double quadratic = (g * inner * g.adjoint()).trace().real();
  const double cross = (link.r_s * link.h_sr.adjoint() * hf.adjoint() * g.adjoint()).trace().real();
  return quadratic - 2.0 * cross + link.r_s.trace().real();
}

double total_mse(const std::vector<ComplexMatrix>& f, const std::vector<ComplexMatrix>& g, const LinkInputs& inputs) {
  if (f.size() != inputs.links.size() || g.size() != inputs.links.size())
    fail(ErrorKind::kDimension, "total_mse: one F and one G per subcarrier required");
  double sum = 0.0;
  for (std::size_t k = 0; k < inputs.links.size(); ++k)
    sum += analytic_mse(f[k], g[k], inputs.links[k], inputs.sigma_n1_2, inputs.sigma_n2_2);
  return sum;
}

double mse_floor(const SubcarrierLink& link, double sigma_n1_2) {
  const ComplexMatrix r_x = relay_covariance(link, sigma_n1_2);
  const ComplexMatrix hr = link.h_sr * link.r_s;
  const ComplexMatrix solved = r_x.llt().solve(hr);
  return link.r_s.trace().real() - (hr.adjoint() * solved).trace().real();
}

LinkInputs without_errors(const LinkInputs& inputs) {
  LinkInputs out = inputs;
  for (auto& link : out.links) {
    link.psi_sr.setZero();
    link.psi_rd.setZero();
  }
  return out;
}

}  // namespace afrelay
