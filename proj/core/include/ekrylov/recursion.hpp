#pragma once

#include <string>
#include <vector>

#include "ekrylov/spectra.hpp"

namespace ekrylov {

enum class ChainMode { CavityCoupled, EnsembleOnly };
enum class Provenance { ClosedForm, Hankel, Stieltjes, Lanczos, Imported };

std::string to_string(ChainMode mode);
std::string to_string(Provenance provenance);
ChainMode parse_chain_mode(const std::string& text);
Provenance parse_provenance(const std::string& text);

/// Recurrence coefficients of the tridiagonal Krylov Hamiltonian.
///
/// Site n carries the on-site energy alphas[n]; the bond between sites n-1 and
/// n carries beta(n) == betas[n-1]. In ensemble-only mode site 0 is the
/// orthonormal polynomial p_0 of the spin measure and beta(k) = b_k. In
/// cavity-coupled mode site 0 is the photon, beta(1) = g_eff and
/// beta(k) = b_{k-1} for k >= 2.
struct ChainCoefficients {
  std::vector<double> alphas;
  std::vector<double> betas;
  double g_eff = 0.0;
  /// Centre of the spin distribution (omega-bar).
  double center = 0.0;
  ChainMode mode = ChainMode::EnsembleOnly;
  Provenance provenance = Provenance::ClosedForm;
  /// Largest bond index whose beta is guaranteed finite and stable.
  int valid_order = 0;
  /// True when the chain ended on an exactly vanishing beta (closed subspace).
  bool terminated = false;

  int size() const { return static_cast<int>(alphas.size()); }
  double beta(int k) const { return betas.at(static_cast<std::size_t>(k - 1)); }
};

/// Closed forms: Gaussian b_n = sigma sqrt(n); Askey q-Gaussian
/// b_n = sigma sqrt((1-q^n)/(1-q)); Uniform b_n = sqrt(3) sigma n / sqrt(4n^2-1).
/// A vanishing b_n (q = -1) ends the chain early.
ChainCoefficients closed_form_coefficients(const SpectralDistribution& dist, int M);

/// Single closed-form polynomial coefficient b_n, n >= 1 (zero allowed).
double closed_form_beta(const SpectralDistribution& dist, int n);

/// Coefficients from ratios of Hankel determinants of the moments, evaluated
/// in extended precision. Throws DivergentMoment when the table's finite
/// moments cannot support M sites and ConditioningError when the determinants
/// lose more than half of the working precision.
ChainCoefficients hankel_coefficients(const MomentTable& moments, int M);

/// Stieltjes procedure on the discrete measure sum_j g_j^2 delta(omega - omega_j).
/// Falls back to full reorthogonalisation when orthogonality drifts beyond 1e-8.
/// Throws ChainExhausted for M > N; a beta below 1e-13 sigma ends the chain.
ChainCoefficients stieltjes_coefficients(const Discrete& ensemble, int M);

/// Prepends the photon site: alpha_0 = omega_c, beta(1) = g_eff.
ChainCoefficients assemble(const ChainCoefficients& ensemble_only, double omega_c, double g_eff);

/// Largest relative deviation between two coefficient sets over their common
/// length (relative to max(|a|, |b|, scale)).
double max_relative_deviation(const ChainCoefficients& a, const ChainCoefficients& b,
                              double scale);

}  // namespace ekrylov
