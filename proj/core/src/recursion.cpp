#include "ekrylov/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "ekrylov/errors.hpp"

namespace ekrylov {

namespace {

// Half of the 50 working digits.
const Extended kConditionLimit("1e25");
const Extended kSingularPivot("1e-40");
constexpr double kStieltjesDrift = 1e-8;
constexpr double kBreakdown = 1e-13;

struct LuResult {
  Extended det = 1;
  bool singular = false;
  Extended condition = 1;  // infinity-norm condition estimate
};

// Partial-pivot LU of a dense n x n matrix stored row-major. Optionally
// estimates cond_inf(A) by forming the inverse from the factors.
LuResult lu_determinant(std::vector<Extended> a, int n, bool want_condition) {
  LuResult r;
  if (n == 0) return r;
  Extended norm_a = 0;
  for (int i = 0; i < n; ++i) {
    Extended row = 0;
    for (int j = 0; j < n; ++j) row += abs(a[i * n + j]);
    norm_a = std::max(norm_a, row);
  }
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (abs(a[i * n + k]) > abs(a[p * n + k])) p = i;
    if (abs(a[p * n + k]) <= kSingularPivot * norm_a) {
      r.det = 0;
      r.singular = true;
      r.condition = std::numeric_limits<Extended>::infinity();
      return r;
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      std::swap(perm[k], perm[p]);
      r.det = -r.det;
    }
    r.det *= a[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      const Extended f = a[i * n + k] / a[k * n + k];
      a[i * n + k] = f;
      for (int j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  if (want_condition) {
    Extended norm_inv = 0;
    std::vector<Extended> inv(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
      std::vector<Extended> x(n, Extended(0));
      for (int i = 0; i < n; ++i) x[i] = (perm[i] == c) ? 1 : 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= a[i * n + j] * x[j];
      for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= a[i * n + j] * x[j];
        x[i] /= a[i * n + i];
      }
      for (int i = 0; i < n; ++i) inv[i * n + c] = x[i];
    }
    for (int i = 0; i < n; ++i) {
      Extended row = 0;
      for (int j = 0; j < n; ++j) row += abs(inv[i * n + j]);
      norm_inv = std::max(norm_inv, row);
    }
    r.condition = norm_a * norm_inv;
  }
  return r;
}

ChainCoefficients finish(ChainCoefficients c) {
  c.valid_order = static_cast<int>(c.betas.size());
  return c;
}

double closed_form_beta_impl(const SpectralDistribution& dist, int n) {
  if (const auto* g = std::get_if<Gaussian>(&dist)) return g->sigma * std::sqrt(static_cast<double>(n));
  if (const auto* u = std::get_if<Uniform>(&dist)) {
    const double nn = static_cast<double>(n);
    return std::sqrt(3.0) * u->sigma * nn / std::sqrt((2.0 * nn + 1.0) * (2.0 * nn - 1.0));
  }
  if (const auto* a = std::get_if<QGaussianAskey>(&dist)) {
    if (a->q == 1.0) return a->sigma * std::sqrt(static_cast<double>(n));
    // [n]_q = 1 + q + ... + q^(n-1), summed directly so that q = -1 gives exact zeros.
    double nq = 0.0, qk = 1.0;
    for (int k = 0; k < n; ++k) {
      nq += qk;
      qk *= a->q;
    }
    return a->sigma * std::sqrt(std::max(nq, 0.0));
  }
  if (std::holds_alternative<TsallisQGaussian>(dist))
    throw UnsupportedOperation(
        "closed_form_coefficients: no closed form for the tsallis family; use the hankel route");
  throw UnsupportedOperation(
      "closed_form_coefficients: discrete ensembles have no closed form; use the stieltjes route");
}

}  // namespace

std::string to_string(ChainMode mode) {
  return mode == ChainMode::CavityCoupled ? "cavity-coupled" : "ensemble-only";
}

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Hankel: return "hankel";
    case Provenance::Stieltjes: return "stieltjes";
    case Provenance::Lanczos: return "lanczos";
    case Provenance::Imported: return "imported";
  }
  return "unknown";
}

ChainMode parse_chain_mode(const std::string& text) {
  if (text == "cavity-coupled" || text == "cavity") return ChainMode::CavityCoupled;
  if (text == "ensemble-only" || text == "ensemble") return ChainMode::EnsembleOnly;
  throw InvalidArgument("unknown chain mode '" + text + "' (expected cavity-coupled or ensemble-only)");
}

Provenance parse_provenance(const std::string& text) {
  for (auto p : {Provenance::ClosedForm, Provenance::Hankel, Provenance::Stieltjes,
                 Provenance::Lanczos, Provenance::Imported})
    if (to_string(p) == text) return p;
  throw InvalidArgument("unknown provenance '" + text + "'");
}

double closed_form_beta(const SpectralDistribution& dist, int n) {
  validate(dist);
  if (n < 1) throw InvalidArgument("closed_form_beta: n must be >= 1");
  return closed_form_beta_impl(dist, n);
}

ChainCoefficients closed_form_coefficients(const SpectralDistribution& dist, int M) {
  validate(dist);
  if (M < 2) throw InvalidArgument("closed_form_coefficients: M must be >= 2");
  closed_form_beta_impl(dist, 1);  // rejects families without a closed form

  ChainCoefficients c;
  c.mode = ChainMode::EnsembleOnly;
  c.provenance = Provenance::ClosedForm;
  c.center = center(dist);
  c.g_eff = 0.0;
  c.alphas.push_back(c.center);
  for (int n = 1; n < M; ++n) {
    const double b = closed_form_beta_impl(dist, n);
    if (b == 0.0) {
      c.terminated = true;
      break;
    }
    c.betas.push_back(b);
    c.alphas.push_back(c.center);
  }
  return finish(c);
}

ChainCoefficients hankel_coefficients(const MomentTable& moments, int M) {
  if (M < 2) throw InvalidArgument("hankel_coefficients: M must be >= 2");
  if (moments.k_max() < 2 * M - 2) {
    std::ostringstream msg;
    msg << "hankel_coefficients: M = " << M << " needs moments through order " << 2 * M - 2
        << " but the table stops at " << moments.k_max();
    throw InvalidArgument(msg.str());
  }
  if (moments.finite_order < 2 * M - 2) {
    const int largest = moments.finite_order / 2;
    std::ostringstream msg;
    msg << "hankel_coefficients: divergent moments beyond order " << moments.finite_order
        << "; beta_n is defined only for n <= " << largest << " (requested M = " << M
        << " needs beta_" << M - 1 << ")";
    throw DivergentMoment(msg.str(), largest);
  }
  if (!(moments[0] > 0)) throw InvalidArgument("hankel_coefficients: m_0 must be > 0");

  // Work with probability-normalised moments of the rescaled variable
  // x = delta / s so that the Hankel matrices have O(1) leading entries.
  const Extended m0 = moments[0];
  Extended s = 1;
  if (moments.k_max() >= 2 && moments[2] > 0) s = sqrt(moments[2] / m0);
  auto scaled = [&](int k) -> Extended {
    if (k > moments.k_max() || !moments.is_finite(k)) {
      if (k % 2 == 1 && moments.symmetric) return Extended(0);
      std::ostringstream msg;
      msg << "hankel_coefficients: moment of order " << k << " unavailable";
      throw DivergentMoment(msg.str(), (k - 1) / 2);
    }
    return moments[k] / (m0 * pow(s, k));
  };

  // D[n] = det h_n, Dp[n] = det of h_n with its last column replaced by
  // (m_n, ..., m_{2n-1}) (Cramer's rule), D[0] = 1, Dp[0] = 0, Dp[1] = m_1.
  std::vector<Extended> D(M + 1), Dp(M + 1);
  D[0] = 1;
  Dp[0] = 0;
  int sites = M;
  bool terminated = false;
  for (int n = 1; n <= M; ++n) {
    std::vector<Extended> h(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h[i * n + j] = scaled(i + j);
    const LuResult lu = lu_determinant(h, n, true);
    if (lu.singular || lu.det <= 0) {
      // A vanishing D_n means beta_{n-1} = 0: the measure has only n-1 support
      // points and the chain closes after site n-2.
      sites = n - 1;
      terminated = true;
      break;
    }
    if (lu.condition > kConditionLimit) {
      const int valid = n - 2;
      if (M > n - 1) {
        std::ostringstream msg;
        msg << "hankel_coefficients: Hankel matrix of order " << n << " has condition "
            << static_cast<double>(lu.condition) << ", beyond half the working precision; "
            << "coefficients are reliable only through beta_" << valid << " (use the stieltjes route)";
        throw ConditioningError(msg.str(), valid);
      }
    }
    D[n] = lu.det;
    if (n == 1) {
      Dp[1] = scaled(1);
    } else {
      for (int i = 0; i < n; ++i) h[i * n + (n - 1)] = scaled(n + i);
      Dp[n] = lu_determinant(h, n, false).det;
    }
  }

  ChainCoefficients c;
  c.mode = ChainMode::EnsembleOnly;
  c.provenance = Provenance::Hankel;
  c.center = moments.center;
  c.g_eff = moments.normalization == MomentNormalization::Raw ? static_cast<double>(sqrt(m0)) : 0.0;
  c.terminated = terminated;
  const double scale = static_cast<double>(s);
  for (int n = 0; n < sites; ++n) {
    const Extended a = Dp[n + 1] / D[n + 1] - (n == 0 ? Extended(0) : Dp[n] / D[n]);
    c.alphas.push_back(moments.center + scale * static_cast<double>(a));
  }
  for (int k = 1; k < sites; ++k) {
    const Extended b2 = D[k + 1] * D[k - 1] / (D[k] * D[k]);
    c.betas.push_back(scale * static_cast<double>(sqrt(b2)));
  }
  return finish(c);
}

ChainCoefficients stieltjes_coefficients(const Discrete& ensemble, int M) {
  validate(ensemble);
  const int N = static_cast<int>(ensemble.spins.size());
  if (M < 1) throw InvalidArgument("stieltjes_coefficients: M must be >= 1");
  if (M > N) {
    std::ostringstream msg;
    msg << "chain exhausted: requested M = " << M << " but the ensemble has only N = " << N
        << " support points";
    throw ChainExhausted(msg.str());
  }
  const SpectralDistribution dist = ensemble;
  const double g_eff = collective_coupling(ensemble);
  const double sigma = width(dist);
  const double floor = kBreakdown * (sigma > 0.0 ? sigma : 1.0);

  Eigen::VectorXd omega(N), start(N);
  for (int j = 0; j < N; ++j) {
    omega[j] = ensemble.spins[j].omega;
    start[j] = ensemble.spins[j].g / g_eff;
  }

  auto run = [&](bool reorthogonalize, bool& drifted) {
    ChainCoefficients c;
    c.mode = ChainMode::EnsembleOnly;
    c.provenance = Provenance::Stieltjes;
    c.center = center(dist);
    c.g_eff = g_eff;
    Eigen::MatrixXd basis(N, M);
    basis.col(0) = start;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(N);
    double b_prev = 0.0;
    drifted = false;
    for (int n = 0; n < M; ++n) {
      const Eigen::VectorXd v = basis.col(n);
      const double a = v.dot(omega.cwiseProduct(v));
      c.alphas.push_back(a);
      if (n + 1 == M) break;
      Eigen::VectorXd r = omega.cwiseProduct(v) - a * v - b_prev * prev;
      if (reorthogonalize) {
        for (int pass = 0; pass < 2; ++pass)
          r -= basis.leftCols(n + 1) * (basis.leftCols(n + 1).transpose() * r);
      }
      const double b = r.norm();
      if (b < floor) {
        c.terminated = true;
        break;
      }
      r /= b;
      if (!reorthogonalize) {
        const double drift = (basis.leftCols(n + 1).transpose() * r).cwiseAbs().maxCoeff();
        if (drift > kStieltjesDrift) {
          drifted = true;
          return c;
        }
      }
      c.betas.push_back(b);
      basis.col(n + 1) = r;
      prev = v;
      b_prev = b;
    }
    return c;
  };

  bool drifted = false;
  ChainCoefficients c = run(false, drifted);
  if (drifted) c = run(true, drifted);
  return finish(c);
}

ChainCoefficients assemble(const ChainCoefficients& ensemble_only, double omega_c, double g_eff) {
  if (ensemble_only.mode == ChainMode::CavityCoupled)
    throw InvalidArgument("assemble: coefficients are already cavity-coupled");
  if (!(g_eff >= 0.0)) throw InvalidArgument("assemble: g_eff must be >= 0");
  ChainCoefficients c = ensemble_only;
  c.mode = ChainMode::CavityCoupled;
  c.g_eff = g_eff;
  c.alphas.insert(c.alphas.begin(), omega_c);
  c.betas.insert(c.betas.begin(), g_eff);
  c.valid_order = ensemble_only.valid_order + 1;
  return c;
}

double max_relative_deviation(const ChainCoefficients& a, const ChainCoefficients& b, double scale) {
  double worst = 0.0;
  auto cmp = [&](double x, double y) {
    const double denom = std::max({std::abs(x), std::abs(y), scale});
    worst = std::max(worst, std::abs(x - y) / denom);
  };
  const std::size_t na = std::min(a.alphas.size(), b.alphas.size());
  for (std::size_t i = 0; i < na; ++i) cmp(a.alphas[i], b.alphas[i]);
  const std::size_t nb = std::min(a.betas.size(), b.betas.size());
  for (std::size_t i = 0; i < nb; ++i) cmp(a.betas[i], b.betas[i]);
  return worst;
}

}  // namespace ekrylov
