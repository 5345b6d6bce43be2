#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ekrylov/recursion.hpp"

namespace ekrylov {

enum class Frame { Lab, Rotating };

/// Truncated tridiagonal Krylov Hamiltonian.
struct KrylovChain {
  ChainCoefficients coeffs;
  Frame frame = Frame::Rotating;
  /// Frequency subtracted from the diagonal in the rotating frame.
  double frame_shift = 0.0;
  Eigen::VectorXd diagonal;
  /// offdiagonal[k] couples sites k and k+1 (= beta(k+1)).
  Eigen::VectorXd offdiagonal;
  int requested_dimension = 0;
  /// True when M was reduced to the length of a terminated chain.
  bool clipped = false;
  /// Boundary-reflection onset M / v_max (infinite for a chain without hopping).
  double reflection_time = 0.0;

  int dimension() const { return static_cast<int>(diagonal.size()); }
  Eigen::MatrixXd dense() const;
};

/// Builds the M x M chain. A terminated coefficient set shorter than M clips
/// the dimension (reported through `clipped`). Throws InvalidArgument for
/// M < 2 or when the coefficients are too short without terminating.
KrylovChain build_chain(const ChainCoefficients& coeffs, int M, Frame frame = Frame::Rotating);

struct VelocityProfile {
  /// v[k] = 2 |beta(k+1)|, one entry per bond.
  std::vector<double> v;
  double v_max = 0.0;
  /// Large-n limit of 2 b_n when the family has one (Askey q < 1, Uniform).
  std::optional<double> analytic_bound;
};

VelocityProfile velocity_profile(const KrylovChain& chain);
VelocityProfile velocity_profile(const KrylovChain& chain, const SpectralDistribution& dist);

/// Large-n limit of 2 b_n for the family, if bounded.
std::optional<double> asymptotic_velocity(const SpectralDistribution& dist);

}  // namespace ekrylov
