#pragma once

#include <vector>

#include "numerics.hpp"

namespace afrelay {

// Everything the analytic MSE needs about one subcarrier. Shapes with
// N_S source, M_R/N_R relay receive/transmit, M_D destination antennas:
// h_sr M_R x N_S, h_rd M_D x N_R, r_s N_S x N_S, psi_sr N_S x N_S, psi_rd N_R x N_R.
struct SubcarrierLink {
  ComplexMatrix h_sr;
  ComplexMatrix h_rd;
  ComplexMatrix r_s;
  ComplexMatrix psi_sr;
  ComplexMatrix psi_rd;
};

struct LinkInputs {
  std::vector<SubcarrierLink> links;
  double sigma_n1_2 = 1.0;
  double sigma_n2_2 = 1.0;

  int subcarriers() const { return static_cast<int>(links.size()); }
};

// Checks shapes, finiteness and that the covariances are Hermitian.
void validate_link(const SubcarrierLink& link);
void validate_inputs(const LinkInputs& inputs);

// Tr(R_s psi_sr) I + H_sr R_s H_sr^H.
ComplexMatrix compute_pi(const ComplexMatrix& h_sr, const ComplexMatrix& r_s, const ComplexMatrix& psi_sr);

// Pi + sigma_n1^2 I.
ComplexMatrix relay_covariance(const SubcarrierLink& link, double sigma_n1_2);

// Tr(F R_x F^H psi_rd) + sigma_n2^2.
double effective_noise(const ComplexMatrix& f, const ComplexMatrix& r_x, const ComplexMatrix& psi_rd, double sigma_n2_2);

// Tr(F R_x F^H).
double relay_power(const ComplexMatrix& f, const ComplexMatrix& r_x);

// Expected ||G y - s||^2 on one subcarrier, averaged over estimation errors,
// source symbols and both noises.
double analytic_mse(const ComplexMatrix& f, const ComplexMatrix& g, const SubcarrierLink& link, double sigma_n1_2,
                    double sigma_n2_2);

double total_mse(const std::vector<ComplexMatrix>& f, const std::vector<ComplexMatrix>& g, const LinkInputs& inputs);

// Part of the MSE no relay/destination pair can remove:
// Tr(R_s) - Tr(R_s H_sr^H R_x^-1 H_sr R_s).
double mse_floor(const SubcarrierLink& link, double sigma_n1_2);

// Same link with every error moment replaced by zero (the estimated-CSI-only view).
LinkInputs without_errors(const LinkInputs& inputs);

}  // namespace afrelay
