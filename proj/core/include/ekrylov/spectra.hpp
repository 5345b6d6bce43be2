#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ekrylov/precision.hpp"

namespace ekrylov {

// Spin-frequency distributions. Frequencies are angular frequencies with
// hbar = 1; `mean` is the centre of the distribution and `sigma` its width.

struct Gaussian {
  double mean = 0.0;
  double sigma = 1.0;
};

/// q-Gaussian of the Askey scheme, -1 <= q <= 1 (compact support for q < 1).
struct QGaussianAskey {
  double mean = 0.0;
  double sigma = 1.0;
  double q = 0.0;
};

/// Heavy-tailed Tsallis q-Gaussian, 1 < q < 3.
struct TsallisQGaussian {
  double mean = 0.0;
  double sigma = 1.0;
  double q = 1.5;

  /// Tail index N = 1/(q-1); the density decays like |x|^(-2N).
  double tail_index() const { return 1.0 / (q - 1.0); }
  /// Inverse width parameter chosen so the variance equals sigma^2 whenever
  /// it is finite (q < 5/3). Heavier tails use 1/((3-q) sigma^2), which makes
  /// sigma the half width of the Lorentzian at q = 2.
  double inverse_width() const {
    const double k = q < 5.0 / 3.0 ? 5.0 - 3.0 * q : 3.0 - q;
    return 1.0 / (k * sigma * sigma);
  }
};

struct Uniform {
  double mean = 0.0;
  double sigma = 1.0;
};

struct Spin {
  double omega = 0.0;
  double g = 0.0;
};

/// Explicit ensemble of N spins with frequencies and couplings.
struct Discrete {
  std::vector<Spin> spins;
};

using SpectralDistribution =
    std::variant<Gaussian, QGaussianAskey, TsallisQGaussian, Uniform, Discrete>;

/// Throws InvalidArgument if the parameters break the family's invariants.
void validate(const SpectralDistribution& dist);

std::string family_name(const SpectralDistribution& dist);
bool is_continuous(const SpectralDistribution& dist);

/// Centre of the distribution. For a discrete ensemble this is the
/// g^2-weighted mean frequency.
double center(const SpectralDistribution& dist);

/// Standard deviation (g^2-weighted for a discrete ensemble). Infinite for a
/// Tsallis distribution with q >= 5/3.
double width(const SpectralDistribution& dist);

/// Half-width of the support around the centre; +inf when unbounded.
double support_halfwidth(const SpectralDistribution& dist);

/// Collective coupling sqrt(sum g_j^2) of a discrete ensemble.
double collective_coupling(const Discrete& ens);

/// Probability density P(omega) of a continuous family. Throws
/// UnsupportedOperation for Discrete and for the two-point limit q = -1.
double density(const SpectralDistribution& dist, double omega);

enum class MomentNormalization { Raw, Probability };

/// Central moments m_k = E((omega - centre)^k), k = 0..k_max.
struct MomentTable {
  std::vector<Extended> values;
  MomentNormalization normalization = MomentNormalization::Probability;
  /// Largest k with a finite moment. Entries past it hold +inf.
  int finite_order = 0;
  /// Whether the measure is symmetric about `center` (odd moments vanish).
  bool symmetric = false;
  double center = 0.0;

  int k_max() const { return static_cast<int>(values.size()) - 1; }
  bool is_finite(int k) const { return k <= finite_order; }
  const Extended& operator[](int k) const { return values.at(static_cast<std::size_t>(k)); }
};

/// Central moments from closed forms (Gaussian, Uniform, Tsallis, and the
/// Touchard-Riordan crossing sum for the Askey q-Gaussian) or the exact
/// weighted sum (Discrete, raw g^2 weights unless `normalize`).
MomentTable moments(const SpectralDistribution& dist, int k_max, bool normalize = false);

/// Central moments of a continuous family by adaptive quadrature of the
/// density; infinite-support families are split into a core and two tails.
MomentTable moments_by_quadrature(const SpectralDistribution& dist, int k_max);

/// Numerically integrated total probability of a continuous family.
double total_probability(const SpectralDistribution& dist);

struct CouplingModel {
  enum class Kind { UniformG, Supplied };
  Kind kind = Kind::UniformG;
  /// Collective coupling for UniformG: g_j = g_eff / sqrt(n).
  double g_eff = 1.0;
  /// Per-spin couplings for Supplied; length must equal n.
  std::vector<double> couplings;
};

/// Draws n i.i.d. frequencies from a continuous family (inverse-CDF sampling
/// on a seeded 64-bit Mersenne twister).
Discrete sample_discrete(const SpectralDistribution& dist, int n, std::uint64_t seed,
                         const CouplingModel& coupling = {});

}  // namespace ekrylov
