#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <ekrylov/chain.hpp>
#include <ekrylov/errors.hpp>
#include <ekrylov/metrics.hpp>
#include <ekrylov/propagate.hpp>

#include "reference.hpp"

using namespace ekrylov;

namespace {

KrylovChain askey_chain(double q, int m) {
  return build_chain(closed_form_coefficients(QGaussianAskey{0.0, 1.0, q}, m), m);
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("Krylov complexity of the Gaussian chain grows as (sigma t)^2") {
    const double sigma = 1.3;
    const auto chain = build_chain(closed_form_coefficients(Gaussian{0.0, sigma}, 300), 300);
    const auto times = uniform_grid(4.0, 41);
    const auto k = krylov_complexity(evolve_eig(chain, StateVector::basis(300, 0), times));
    for (std::size_t i = 0; i < times.size(); ++i)
      CHECK(k[i] == doctest::Approx(sigma * sigma * times[i] * times[i]).epsilon(1e-9).scale(1.0));
  }

  TEST_CASE("Krylov complexity counted from the bright site") {
    const auto c = assemble(closed_form_coefficients(Gaussian{0.0, 1.0}, 300), 0.0, 0.0);
    const auto chain = build_chain(c, 301);
    const auto times = uniform_grid(3.0, 31);
    const auto k = krylov_complexity(evolve_eig(chain, StateVector::basis(301, 1), times));
    CHECK(k[0] == 1.0);
    for (std::size_t i = 0; i < times.size(); ++i)
      CHECK(k[i] == doctest::Approx(1.0 + times[i] * times[i]).epsilon(1e-9));
  }

  TEST_CASE("two-point spectrum confines the complexity") {
    const auto c = assemble(closed_form_coefficients(QGaussianAskey{0.0, 1.0, -1.0}, 10), 0.0, 0.0);
    const auto chain = build_chain(c, 11);
    CHECK(chain.dimension() == 3);
    const auto k = krylov_complexity(evolve_eig(chain, StateVector::basis(3, 1), uniform_grid(20.0, 401)));
    for (double v : k) {
      CHECK(v >= 1.0 - 1e-12);
      CHECK(v <= 2.0 + 1e-12);
    }
  }

  TEST_CASE("fidelities sum to one") {
    const auto chain = askey_chain(0.3, 40);
    const auto f = fidelity_grid(evolve_eig(chain, StateVector::basis(40, 0), uniform_grid(6.0, 61)));
    CHECK((f.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(f(0, 0) == 1.0);
  }

  TEST_CASE("correlator at t = 0") {
    const auto chain = askey_chain(0.0, 20);
    const std::vector<double> times{0.0, 0.5};
    const auto grid = correlator(chain, 10, times);
    CHECK(grid.r_max() == 10);
    CHECK(grid.values(0, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(grid.values(1, 0) == doctest::Approx(1.0));
    for (int r = 2; r <= 10; ++r) CHECK(grid.values(r, 0) < 1e-14);
    CHECK_THROWS_AS(correlator(chain, 19, times), InvalidArgument);
  }

  TEST_CASE("low-rank correlator equals the dense commutator norm") {
    const auto c = assemble(closed_form_coefficients(Uniform{0.0, 1.0}, 24), 0.2, 0.8);
    const auto chain = build_chain(c, 25);
    const std::vector<double> times{0.3, 1.1, 2.5, 4.0};
    const auto grid = correlator(chain, 12, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Eigen::MatrixXcd u = reference::propagator(chain.dense(), times[k]);
      for (int r = 0; r <= 12; ++r)
        CHECK(grid.values(r, static_cast<Eigen::Index>(k)) ==
              doctest::Approx(reference::commutator_norm(u, r)).epsilon(1e-9).scale(1.0));
    }
  }

  TEST_CASE("correlator front travels at the chain velocity") {
    const auto chain = askey_chain(0.0, 128);
    const auto times = uniform_grid(40.0, 801);
    const auto grid = correlator(chain, 60, times);
    const auto front = arrival_front(grid);
    REQUIRE(front[1]);
    CHECK(*front[1] == 0.0);
    const auto fit = fit_front(grid, 10, 50);
    CHECK(fit.points == 41);
    const double v = 1.0 / fit.slope;
    CHECK(v <= 2.0 * 1.15);
    CHECK(v >= 2.0 * 0.85);
  }

  TEST_CASE("Lieb-Robinson check reports its fit") {
    const auto chain = askey_chain(0.0, 64);
    const auto grid = correlator(chain, 30, uniform_grid(10.0, 201));
    const auto lr = check_lieb_robinson(grid, 1.0);
    CHECK(lr.j_max == 1.0);
    CHECK(lr.a > 0.0);
    CHECK(lr.worst_ratio > 0.0);
  }

  TEST_CASE("speed-limit times") {
    const auto c = assemble(closed_form_coefficients(Gaussian{0.0, 1.0}, 10), 0.0, 1.0);
    const std::vector<double> targets{1.0, 0.5, 0.0};
    const std::vector<std::pair<int, int>> pairs{{1, 1}, {1, 2}};
    const auto rep = qsl_times(c, targets, pairs);
    CHECK(rep.tau0 == doctest::Approx(std::numbers::pi / (2.0 * std::sqrt(2.0))));
    CHECK(rep.tauL == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(rep.g_ens == 1.0);
    CHECK(rep.sigma == 1.0);
    REQUIRE(rep.entries.size() == 6);
    CHECK(rep.entries[0].tau == 0.0);
    CHECK(rep.entries[1].tau == doctest::Approx(std::numbers::pi / 4.0 / std::sqrt(2.0)));
    CHECK(rep.entries[2].tau == doctest::Approx(rep.tau0));
    CHECK(rep.entries[3].tau == doctest::Approx(rep.tau0));
    CHECK(rep.entries[5].tau == 0.0);
    CHECK(rep.delta_h[0] == 1.0);

    const auto e = closed_form_coefficients(Gaussian{0.0, 2.0}, 5);
    const auto only = qsl_times(e, targets, pairs);
    CHECK(only.g_ens == 0.0);
    CHECK(only.sigma == 2.0);
    CHECK(only.tau0 == doctest::Approx(only.tauL));

    const std::vector<double> bad_target{1.5};
    CHECK_THROWS_AS(qsl_times(c, bad_target, pairs), InvalidArgument);
    const std::vector<std::pair<int, int>> bad_pair{{0, 11}};
    CHECK_THROWS_AS(qsl_times(c, targets, bad_pair), InvalidArgument);
  }

  TEST_CASE("speed limit bounds the transfer time") {
    const auto c = assemble(closed_form_coefficients(Uniform{0.0, 1.0}, 60), 0.0, 1.0);
    const auto chain = build_chain(c, 61);
    const auto times = uniform_grid(10.0, 2001);
    const auto f = fidelity_grid(evolve_eig(chain, StateVector::basis(61, 1), times));
    const std::vector<double> targets{0.1, 0.2};
    const std::vector<std::pair<int, int>> pairs{{1, 1}, {1, 2}};
    const auto rep = qsl_times(c, targets, pairs);
    for (const auto& e : rep.entries) {
      const Eigen::VectorXd col = f.col(e.j);
      const std::vector<double> series(col.data(), col.data() + col.size());
      const auto hit = first_passage(times, series, e.target, e.i != e.j);
      if (hit) CHECK(*hit >= e.tau - 1e-12);
    }
  }

  TEST_CASE("first passage and revival detection") {
    const std::vector<double> t{0, 1, 2, 3, 4, 5, 6};
    const std::vector<double> s{1.0, 0.5, 0.01, 0.02, 0.3, 0.2, 0.1};
    CHECK(*first_passage(t, s, 0.4, false) == 2.0);
    CHECK(*first_passage(t, s, 0.25, true) == 0.0);
    CHECK_FALSE(first_passage(t, s, 2.0, true));
    const auto rev = detect_revival(t, s);
    CHECK(*rev.drop_time == 2.0);
    CHECK(*rev.peak_time == 4.0);
    CHECK(rev.peak_value == 0.3);
    const std::vector<double> decay{1.0, 0.5, 0.01, 0.005, 0.001, 0.0, 0.0};
    CHECK_FALSE(detect_revival(t, decay).revived());
  }

  TEST_CASE("semicircle population returns after boundary reflection, Gaussian does not") {
    const auto times = uniform_grid(80.0, 1601);
    auto survival = [&](const KrylovChain& chain) {
      const auto r = evolve_eig(chain, StateVector::basis(chain.dimension(), 0), times);
      const Eigen::VectorXd col = fidelity_grid(r).col(0);
      return std::vector<double>(col.data(), col.data() + col.size());
    };
    const auto semi = detect_revival(times, survival(askey_chain(0.0, 64)));
    REQUIRE(semi.revived());
    CHECK(*semi.peak_time == doctest::Approx(64.0).epsilon(0.1));
    const auto gauss = survival(build_chain(closed_form_coefficients(Gaussian{0.0, 1.0}, 256), 256));
    double late = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      if (times[k] > 2.0 && times[k] <= 10.0) late = std::max(late, gauss[k]);
    CHECK(late < 0.5);
  }
}
