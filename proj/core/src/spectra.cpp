#include "ekrylov/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "ekrylov/errors.hpp"

namespace ekrylov {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProductTolerance = 1e-15;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

// Askey q-Gaussian density in the standardised variable x = (omega-mean)/sigma,
// written as the continuous q-Hermite weight:
//   sqrt(1-q)/(2 pi) sqrt(4-(1-q)x^2) prod_{k>=1} (1-q^k)((1+q^k)^2 - (1-q)x^2 q^k).
// The product is accumulated in log space because (q;q)_inf underflows as q -> 1.
double askey_standard_density(double x, double q) {
  if (q == 1.0) return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  const double c = (1.0 - q) * x * x;
  const double v = 4.0 - c;
  if (v <= 0.0) return 0.0;
  double log_product = 0.0;
  double qk = q;
  for (long k = 1; k < 2'000'000'000L; ++k) {
    const double factor = (1.0 - qk) * ((1.0 + qk) * (1.0 + qk) - c * qk);
    log_product += std::log(factor);
    if (std::abs(factor - 1.0) < kProductTolerance) break;
    qk *= q;
  }
  return std::sqrt(1.0 - q) / (2.0 * std::numbers::pi) * std::sqrt(v) * std::exp(log_product);
}

// Tsallis density in omega units: sqrt(b) (1 + b d^2/N)^(-N) / Z with
// Z = sqrt(N) B(1/2, N-1/2).
double tsallis_density(const TsallisQGaussian& t, double omega) {
  const double n = t.tail_index();
  const double b = t.inverse_width();
  const double d = omega - t.mean;
  const double z = std::sqrt(n) * boost::math::beta(0.5, n - 0.5);
  return std::sqrt(b) * std::pow(1.0 + b * d * d / n, -n) / z;
}

// Even moment E[x^(2n)] of the Askey q-Gaussian with unit variance:
// the Touchard-Riordan sum sum_k (-1)^k q^(k(k+1)/2) [C(2n,n-k) - C(2n,n-k-1)]
// divided by (1-q)^n. The division is done exactly on the integer polynomial
// (repeated prefix sums) so that no cancellation happens near q = 1.
Extended askey_even_moment(int n, const Extended& q) {
  if (n == 0) return Extended(1);
  const int degree = n * (n + 1) / 2;
  std::vector<Extended> poly(static_cast<std::size_t>(degree) + 1, Extended(0));
  for (int k = 0; k <= n; ++k) {
    Extended c = boost::math::binomial_coefficient<Extended>(2 * n, n - k);
    if (n - k - 1 >= 0) c -= boost::math::binomial_coefficient<Extended>(2 * n, n - k - 1);
    poly[static_cast<std::size_t>(k * (k + 1) / 2)] += (k % 2 == 0 ? c : -c);
  }
  for (int rep = 0; rep < n; ++rep) {
    for (std::size_t j = 1; j < poly.size(); ++j) poly[j] += poly[j - 1];
  }
  // After n divisions the quotient has degree `degree - n`.
  Extended value = 0;
  for (int j = degree - n; j >= 0; --j) value = value * q + poly[static_cast<std::size_t>(j)];
  return value;
}

Extended double_factorial_odd(int n) {  // (2n-1)!!
  Extended r = 1;
  for (int k = 1; k <= n; ++k) r *= (2 * k - 1);
  return r;
}

MomentTable make_table(int k_max) {
  if (k_max < 0) throw InvalidArgument("moments: k_max must be >= 0");
  MomentTable t;
  t.values.assign(static_cast<std::size_t>(k_max) + 1, Extended(0));
  t.finite_order = k_max;
  t.symmetric = true;
  return t;
}

template <class F>
double integrate_support(const SpectralDistribution& dist, F&& integrand) {
  const double c = center(dist);
  const double half = support_halfwidth(dist);
  if (std::isfinite(half)) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(integrand, c - half, c + half, 1e-14);
  }
  // Core by Gauss-Kronrod, tails by exp-sinh.
  const double split = 8.0 * width(dist);
  const double core = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, c - split, c + split, 15, 1e-14);
  boost::math::quadrature::exp_sinh<double> es;
  const double right = es.integrate([&](double u) { return integrand(c + split + u); },
                                    0.0, kInf, 1e-14);
  const double left = es.integrate([&](double u) { return integrand(c - split - u); },
                                   0.0, kInf, 1e-14);
  return core + right + left;
}

double uniform_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = 0.0;
  do {
    x = u(rng);
  } while (x <= 0.0 || x >= 1.0);
  return x;
}

// Inverse-CDF table for the Askey density on its compact support.
struct CdfTable {
  std::vector<double> x;
  std::vector<double> cdf;

  double invert(double u) const {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return x.front();
    if (it == cdf.end()) return x.back();
    const auto i = static_cast<std::size_t>(it - cdf.begin());
    const double span = cdf[i] - cdf[i - 1];
    const double frac = span > 0.0 ? (u - cdf[i - 1]) / span : 0.5;
    return x[i - 1] + frac * (x[i] - x[i - 1]);
  }
};

CdfTable askey_cdf(double q) {
  constexpr std::size_t kCells = 20000;
  const double x0 = 2.0 / std::sqrt(1.0 - q);
  CdfTable t;
  t.x.resize(kCells + 1);
  t.cdf.resize(kCells + 1);
  const double h = 2.0 * x0 / static_cast<double>(kCells);
  double prev = askey_standard_density(-x0, q);
  t.x[0] = -x0;
  t.cdf[0] = 0.0;
  for (std::size_t i = 1; i <= kCells; ++i) {
    const double xi = -x0 + h * static_cast<double>(i);
    const double mid = askey_standard_density(xi - 0.5 * h, q);
    const double cur = askey_standard_density(xi, q);
    t.x[i] = xi;
    t.cdf[i] = t.cdf[i - 1] + h * (prev + 4.0 * mid + cur) / 6.0;
    prev = cur;
  }
  const double total = t.cdf.back();
  for (double& c : t.cdf) c /= total;
  return t;
}

}  // namespace

void validate(const SpectralDistribution& dist) {
  std::visit(overloaded{
                 [](const Gaussian& d) { require(d.sigma > 0.0, "gaussian: sigma must be > 0"); },
                 [](const QGaussianAskey& d) {
                   require(d.sigma > 0.0, "qgauss: sigma must be > 0");
                   require(d.q >= -1.0 && d.q <= 1.0, "qgauss: q must lie in [-1, 1]");
                 },
                 [](const TsallisQGaussian& d) {
                   require(d.sigma > 0.0, "tsallis: sigma must be > 0");
                   require(d.q > 1.0 && d.q < 3.0, "tsallis: q must lie in (1, 3)");
                 },
                 [](const Uniform& d) { require(d.sigma > 0.0, "uniform: sigma must be > 0"); },
                 [](const Discrete& d) {
                   require(!d.spins.empty(), "discrete: at least one spin is required");
                   bool any = false;
                   for (const auto& s : d.spins) {
                     require(std::isfinite(s.omega) && std::isfinite(s.g),
                             "discrete: non-finite frequency or coupling");
                     require(s.g >= 0.0, "discrete: couplings must be >= 0");
                     any = any || s.g > 0.0;
                   }
                   require(any, "discrete: at least one coupling must be > 0");
                 },
             },
             dist);
}

std::string family_name(const SpectralDistribution& dist) {
  return std::visit(overloaded{
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const QGaussianAskey&) { return std::string("qgauss"); },
                        [](const TsallisQGaussian&) { return std::string("tsallis"); },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Discrete&) { return std::string("discrete"); },
                    },
                    dist);
}

bool is_continuous(const SpectralDistribution& dist) {
  return !std::holds_alternative<Discrete>(dist);
}

double collective_coupling(const Discrete& ens) {
  double s = 0.0;
  for (const auto& spin : ens.spins) s += spin.g * spin.g;
  return std::sqrt(s);
}

double center(const SpectralDistribution& dist) {
  return std::visit(overloaded{
                        [](const Discrete& d) {
                          double w = 0.0, s = 0.0;
                          for (const auto& spin : d.spins) {
                            w += spin.g * spin.g;
                            s += spin.g * spin.g * spin.omega;
                          }
                          return s / w;
                        },
                        [](const auto& d) { return d.mean; },
                    },
                    dist);
}

double width(const SpectralDistribution& dist) {
  return std::visit(overloaded{
                        [&](const Discrete& d) {
                          const double c = center(dist);
                          double w = 0.0, s = 0.0;
                          for (const auto& spin : d.spins) {
                            w += spin.g * spin.g;
                            s += spin.g * spin.g * (spin.omega - c) * (spin.omega - c);
                          }
                          return std::sqrt(s / w);
                        },
                        [](const TsallisQGaussian& d) { return d.q < 5.0 / 3.0 ? d.sigma : kInf; },
                        [](const auto& d) { return d.sigma; },
                    },
                    dist);
}

double support_halfwidth(const SpectralDistribution& dist) {
  return std::visit(overloaded{
                        [](const Gaussian&) { return kInf; },
                        [](const TsallisQGaussian&) { return kInf; },
                        [](const QGaussianAskey& d) {
                          return d.q < 1.0 ? 2.0 * d.sigma / std::sqrt(1.0 - d.q) : kInf;
                        },
                        [](const Uniform& d) { return std::sqrt(3.0) * d.sigma; },
                        [&](const Discrete& d) {
                          const double c = center(dist);
                          double r = 0.0;
                          for (const auto& s : d.spins) r = std::max(r, std::abs(s.omega - c));
                          return r;
                        },
                    },
                    dist);
}

double density(const SpectralDistribution& dist, double omega) {
  validate(dist);
  return std::visit(
      overloaded{
          [&](const Gaussian& d) {
            const double x = (omega - d.mean) / d.sigma;
            return std::exp(-0.5 * x * x) / (std::sqrt(2.0 * std::numbers::pi) * d.sigma);
          },
          [&](const QGaussianAskey& d) {
            if (d.q == -1.0)
              throw UnsupportedOperation("density: q = -1 is a two-point measure without a density");
            return askey_standard_density((omega - d.mean) / d.sigma, d.q) / d.sigma;
          },
          [&](const TsallisQGaussian& d) { return tsallis_density(d, omega); },
          [&](const Uniform& d) {
            return std::abs(omega - d.mean) <= std::sqrt(3.0) * d.sigma
                       ? 1.0 / (2.0 * std::sqrt(3.0) * d.sigma)
                       : 0.0;
          },
          [](const Discrete&) -> double {
            throw UnsupportedOperation(
                "density: a discrete ensemble is a sum of point masses; use moments() instead");
          },
      },
      dist);
}

MomentTable moments(const SpectralDistribution& dist, int k_max, bool normalize) {
  validate(dist);
  MomentTable t = make_table(k_max);
  t.center = center(dist);
  t.normalization = MomentNormalization::Probability;
  std::visit(
      overloaded{
          [&](const Gaussian& d) {
            const Extended s2 = Extended(d.sigma) * d.sigma;
            for (int k = 0; k <= k_max; k += 2) t.values[k] = pow(s2, k / 2) * double_factorial_odd(k / 2);
          },
          [&](const QGaussianAskey& d) {
            const Extended s2 = Extended(d.sigma) * d.sigma;
            for (int k = 0; k <= k_max; k += 2)
              t.values[k] = pow(s2, k / 2) * askey_even_moment(k / 2, Extended(d.q));
          },
          [&](const Uniform& d) {
            const Extended a2 = Extended(3) * d.sigma * d.sigma;
            for (int k = 0; k <= k_max; k += 2) t.values[k] = pow(a2, k / 2) / (k + 1);
          },
          [&](const TsallisQGaussian& d) {
            // E[xi^(2n)] = N^n B(n+1/2, N-n-1/2) / B(1/2, N-1/2), xi = sqrt(b)(omega-mean);
            // finite only while 2n < 2N-1.
            const Extended n_tail = Extended(1) / (Extended(d.q) - 1);
            const Extended k_scale = d.q < 5.0 / 3.0 ? 5 - 3 * Extended(d.q) : 3 - Extended(d.q);
            const Extended b = Extended(1) / (k_scale * d.sigma * d.sigma);
            const Extended limit = 2 * n_tail - 1;
            int finite = 0;
            while (finite + 1 <= k_max && Extended(finite + 1) < limit - 1e-9) ++finite;
            t.finite_order = finite;
            const Extended norm = boost::math::beta(Extended(0.5), n_tail - Extended(0.5));
            for (int k = 0; k <= k_max; ++k) {
              if (k > finite) {
                t.values[k] = std::numeric_limits<Extended>::infinity();
              } else if (k % 2 == 0) {
                const int n = k / 2;
                t.values[k] = pow(n_tail / b, n) *
                              boost::math::beta(Extended(n) + Extended(0.5), n_tail - n - Extended(0.5)) /
                              norm;
              }
            }
          },
          [&](const Discrete& d) {
            t.symmetric = false;
            t.normalization = normalize ? MomentNormalization::Probability : MomentNormalization::Raw;
            Extended total = 0;
            for (const auto& s : d.spins) total += Extended(s.g) * s.g;
            for (const auto& s : d.spins) {
              const Extended w = Extended(s.g) * s.g;
              const Extended delta = Extended(s.omega) - t.center;
              Extended p = 1;
              for (int k = 0; k <= k_max; ++k) {
                t.values[k] += w * p;
                p *= delta;
              }
            }
            if (normalize)
              for (auto& v : t.values) v /= total;
          },
      },
      dist);
  return t;
}

MomentTable moments_by_quadrature(const SpectralDistribution& dist, int k_max) {
  validate(dist);
  if (!is_continuous(dist)) throw UnsupportedOperation("moments_by_quadrature: continuous families only");
  if (const auto* a = std::get_if<QGaussianAskey>(&dist); a && a->q == -1.0)
    throw UnsupportedOperation("moments_by_quadrature: q = -1 has no density");
  MomentTable t = make_table(k_max);
  t.center = center(dist);
  t.symmetric = false;
  int finite = k_max;
  if (const auto* ts = std::get_if<TsallisQGaussian>(&dist)) {
    const double limit = 2.0 * ts->tail_index() - 1.0;
    finite = -1;
    while (finite + 1 <= k_max && finite + 1 < limit) ++finite;
  }
  t.finite_order = finite;
  const double c = t.center;
  for (int k = 0; k <= k_max; ++k) {
    if (k > finite) {
      t.values[k] = std::numeric_limits<Extended>::infinity();
      continue;
    }
    t.values[k] = integrate_support(dist, [&](double w) {
      const double p = density(dist, w);
      return p == 0.0 ? 0.0 : std::pow(w - c, k) * p;
    });
  }
  return t;
}

double total_probability(const SpectralDistribution& dist) {
  validate(dist);
  if (!is_continuous(dist)) throw UnsupportedOperation("total_probability: continuous families only");
  return integrate_support(dist, [&](double w) { return density(dist, w); });
}

Discrete sample_discrete(const SpectralDistribution& dist, int n, std::uint64_t seed,
                         const CouplingModel& coupling) {
  validate(dist);
  if (!is_continuous(dist))
    throw UnsupportedOperation("sample_discrete: input is already a discrete ensemble");
  if (n < 1) throw InvalidArgument("sample_discrete: n must be >= 1");
  if (coupling.kind == CouplingModel::Kind::Supplied &&
      coupling.couplings.size() != static_cast<std::size_t>(n)) {
    std::ostringstream msg;
    msg << "sample_discrete: supplied couplings have length " << coupling.couplings.size()
        << ", expected " << n;
    throw InvalidArgument(msg.str());
  }
  if (coupling.kind == CouplingModel::Kind::UniformG && !(coupling.g_eff > 0.0))
    throw InvalidArgument("sample_discrete: g_eff must be > 0");

  std::mt19937_64 rng(seed);
  std::vector<double> omegas(static_cast<std::size_t>(n));

  std::visit(overloaded{
                 [&](const Gaussian& d) {
                   const boost::math::normal_distribution<double> nd(d.mean, d.sigma);
                   for (auto& w : omegas) w = boost::math::quantile(nd, uniform_draw(rng));
                 },
                 [&](const Uniform& d) {
                   const double a = std::sqrt(3.0) * d.sigma;
                   for (auto& w : omegas) w = d.mean + a * (2.0 * uniform_draw(rng) - 1.0);
                 },
                 [&](const TsallisQGaussian& d) {
                   // xi has density (1 + xi^2/N)^(-N): a Student-t with nu = 2N-1, rescaled.
                   const double nt = d.tail_index();
                   const double nu = 2.0 * nt - 1.0;
                   const boost::math::students_t_distribution<double> st(nu);
                   const double scale = std::sqrt(nt / nu) / std::sqrt(d.inverse_width());
                   for (auto& w : omegas) w = d.mean + scale * boost::math::quantile(st, uniform_draw(rng));
                 },
                 [&](const QGaussianAskey& d) {
                   if (d.q == 1.0) {
                     const boost::math::normal_distribution<double> nd(d.mean, d.sigma);
                     for (auto& w : omegas) w = boost::math::quantile(nd, uniform_draw(rng));
                   } else if (d.q == -1.0) {
                     for (auto& w : omegas) w = d.mean + (uniform_draw(rng) < 0.5 ? -d.sigma : d.sigma);
                   } else {
                     const CdfTable table = askey_cdf(d.q);
                     for (auto& w : omegas) w = d.mean + d.sigma * table.invert(uniform_draw(rng));
                   }
                 },
                 [](const Discrete&) {},
             },
             dist);

  Discrete out;
  out.spins.resize(static_cast<std::size_t>(n));
  const double g_uniform = coupling.g_eff / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    out.spins[j].omega = omegas[j];
    out.spins[j].g = coupling.kind == CouplingModel::Kind::UniformG ? g_uniform : coupling.couplings[j];
  }
  return out;
}

}  // namespace ekrylov
