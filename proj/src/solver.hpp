#pragma once

#include <string>
#include <vector>

#include "msemodel.hpp"
#include "numerics.hpp"

namespace afrelay {

// kUncorrelated requires every psi_rd to be a multiple of I. kRobust picks
// kUncorrelated when that holds and kSwitched otherwise. kNaive designs as if
// all error moments were zero.
enum class Variant { kUncorrelated, kHsa, kSpa, kSwitched, kNaive, kRobust };

const char* variant_name(Variant variant);
// Accepts the names produced by variant_name; throws kValidation otherwise.
Variant parse_variant(const std::string& name);

inline constexpr double kDefaultThreshold = 10.0;

struct SubcarrierDecomposition {
  ComplexMatrix m;             // P psi_rd + sigma_n2^2 I
  ComplexMatrix m_inv_sqrt;
  ComplexMatrix r_x_inv_sqrt;
  ComplexMatrix u_theta;       // eigenvectors of Theta^H Theta, Theta = H_rd M^-1/2
  RealVector lambda_theta;     // eigenvalues, non-increasing
  ComplexMatrix u_t;           // T = R_x^-1/2 H_sr R_s = U_T diag(lambda_t) V_T^H
  RealVector lambda_t;
  ComplexMatrix v_t;
  RealVector m_weights;        // diag(U_Theta^H M^-1 U_Theta)
  int p = 0;                   // rank of T
  int q = 0;                   // rank of Theta
  int n = 0;                   // min(p, q)
};

SubcarrierDecomposition decompose_subcarrier(const ComplexMatrix& h_rd, const ComplexMatrix& h_sr,
                                             const ComplexMatrix& r_s, const ComplexMatrix& r_x,
                                             const ComplexMatrix& psi_rd, double power, double sigma_n2_2);

struct SpectralFactors {
  RealVector lambda_f;  // entries clipped to zero are inactive
  RealVector lambda_g;
  int active = 0;
};

SpectralFactors spectral_factors(const RealVector& lambda_t, const RealVector& lambda_theta, double eta, double gamma,
                                 double sigma_n2_2);

// Per-subcarrier scalars of the general allocation form, on the first `modes` modes.
struct ModeScalars {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
};
ModeScalars mode_scalars(const SubcarrierDecomposition& d, int modes);

// Per-subcarrier scalars of the high-SNR form.
struct HsaScalars {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, chi = 0.0;
  int active = 0;
};

struct Allocation {
  std::vector<double> power;  // P_r,k
  std::vector<int> active;    // modes kept per subcarrier
  double gamma = 0.0;         // common multiplier
};

// Inputs per subcarrier: singular values of T, eigenvalues of H_rd^H H_rd, and
// the error scale delta (psi_rd = delta I).
Allocation allocate_uncorrelated(const std::vector<RealVector>& lambda_t, const std::vector<RealVector>& lambda_h,
                                 const std::vector<double>& delta, double p_r, double sigma_n2_2);

// Inputs per subcarrier: singular values of T, eigenvalues of Gamma^H Gamma with
// Gamma = H_rd psi_rd^-1/2, and diag(U_Gamma^H psi_rd^-1 U_Gamma).
Allocation allocate_hsa(const std::vector<RealVector>& lambda_t, const std::vector<RealVector>& lambda_gamma,
                        const std::vector<RealVector>& weights, double p_r, double sigma_n2_2,
                        std::vector<HsaScalars>* scalars = nullptr);

// The uncorrelated allocator with delta_k = lambda_max(psi_rd,k).
Allocation allocate_spa(const std::vector<RealVector>& lambda_t, const std::vector<RealVector>& lambda_h,
                        const std::vector<ComplexMatrix>& psi_rd, double p_r, double sigma_n2_2);

struct SubcarrierSolution {
  ComplexMatrix f;
  ComplexMatrix g;
  double power = 0.0;  // P_r,k
  double gamma = 0.0;  // gamma_k
  double eta = 0.0;
  int active_modes = 0;
  RealVector lambda_f;
  RealVector lambda_g;
  RealVector lambda_t;      // on the active modes
  RealVector lambda_theta;  // on the active modes
};

struct TransceiverSolution {
  std::vector<SubcarrierSolution> subcarriers;
  Variant requested = Variant::kRobust;
  Variant applied = Variant::kUncorrelated;  // one of uncorrelated, hsa, spa, naive
  double total_power = 0.0;                  // P_r
  double gamma = 0.0;                        // multiplier of the allocation step
  int hsa_votes = 0;
  int spa_votes = 0;
  // Inputs the design was computed for: zero moments for naive, psi_rd
  // widened to lambda_max I for SPA.
  LinkInputs design;

  int size() const { return static_cast<int>(subcarriers.size()); }
  std::vector<ComplexMatrix> precoders() const;
  std::vector<ComplexMatrix> equalizers() const;
};

// Builds F and G on one subcarrier for a given power with the exact M, keeping
// at most `max_modes` modes and dropping trailing modes until every kept mode
// has a positive gain.
SubcarrierSolution build_subcarrier(const SubcarrierLink& link, double sigma_n1_2, double sigma_n2_2, double power,
                                    int max_modes);

TransceiverSolution solve(const LinkInputs& inputs, double p_r, Variant variant, double threshold = kDefaultThreshold);

// Scales each F_k so Tr(F_k R_x,k F_k^H) = P_r,k under `actual` (G_k is kept).
// A design that ignored psi_sr underestimates R_x and would otherwise spend
// more than its budget once the real relay input arrives.
TransceiverSolution fit_power_budget(const TransceiverSolution& solution, const LinkInputs& actual);

// psi_rd replaced by lambda_max(psi_rd) I on every subcarrier.
LinkInputs spectral_surrogate(const LinkInputs& inputs);

// True when psi is a multiple of the identity to relative tolerance.
bool is_scaled_identity(const ComplexMatrix& psi, double tolerance = 1e-9);

// Relative residuals of the first-order optimality system. Stationarity is
// measured on every subcarrier with a nonzero design.
struct KktReport {
  double stationarity_g = 0.0;     // equalizer condition
  double stationarity_f = 0.0;     // precoder condition, with gamma_k
  double slackness = 0.0;          // |Tr(F R_x F^H) - P_r,k| / P_r,k
  double total_slackness = 0.0;    // |sum P_r,k - P_r| / P_r
  double multiplier_spread = 0.0;  // (max gamma_k - min gamma_k) / mean gamma_k
  double power_violation = 0.0;    // max(0, Tr(F R_x F^H) - P_r,k) / P_r,k
  double total_violation = 0.0;    // max(0, sum P_r,k - P_r) / P_r
  double gain_identity = 0.0;      // |sigma^2 Tr(G G^H) - gamma_k P_r,k| / (gamma_k P_r,k)
  double trace_identity = 0.0;     // the two expressions for Tr(G K G^H)
  bool feasible = true;            // false for a design that transmits nothing

  // Largest residual among the conditions that hold for every variant.
  double max_structural() const;
  // max_structural plus the multiplier spread.
  double max_all() const;
};

KktReport kkt_residuals(const TransceiverSolution& solution, const LinkInputs& inputs);
KktReport kkt_residuals(const TransceiverSolution& solution);

}  // namespace afrelay
