#include <cmath>

#include "catch2/catch_amalgamated.hpp"
#include "demlab/quadrature.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace demlab;

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  const auto& nw = detail::gauss_legendre(5);
  REQUIRE(nw.size() == 5);
  double odd = 0, even = 0, wsum = 0;
  for (const auto& [x, w] : nw) {
    odd += w * std::pow(x, 9);
    even += w * std::pow(x, 8);
    wsum += w;
  }
  REQUIRE(wsum == Approx(2.0).epsilon(1e-14));
  REQUIRE(odd == Approx(0.0).margin(1e-14));
  REQUIRE(even == Approx(2.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("smooth and power integrands converge to machine accuracy") {
  const auto e = integrate_dyadic([](double s) { return std::exp(s); }, 1.0);
  REQUIRE(e.converged);
  REQUIRE(e.value == Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

  const auto p = integrate_dyadic([](double s) { return std::pow(s, 3.5); }, 1.0);
  REQUIRE(p.converged);
  REQUIRE(p.value == Approx(1.0 / 4.5).epsilon(1e-13));
}

TEST_CASE("endpoint singularity s^{-1/2} is resolved by dyadic refinement") {
  const auto r = integrate_dyadic([](double s) { return 1.0 / std::sqrt(s); }, 1.0);
  REQUIRE(r.converged);
  REQUIRE(r.value == Approx(2.0).epsilon(1e-12));
  REQUIRE(r.nodes_used <= (1 << 14));
}

TEST_CASE("refinement decision is scale-free") {
  const auto f = [](double s) { return std::exp(3.0 * s); };
  const auto a = integrate_dyadic(f, 1.0);
  const auto b = integrate_dyadic([&](double s) { return 1e6 * f(s); }, 1.0);
  REQUIRE(a.nodes_used == b.nodes_used);
  REQUIRE(b.value / a.value == Approx(1e6).epsilon(1e-14));
}

TEST_CASE("mid-interval kink stalls refinement unless declared") {
  // |s - 1.3| on [0, 3]: the kink sits inside the panel [3/4, 3/2], which
  // dyadic refinement never splits, so the scheme settles on a wrong value.
  const auto f = [](double s) { return std::fabs(s - 1.3); };
  const double exact = 2.29;

  const auto bad = integrate_dyadic(f, 3.0);
  REQUIRE(bad.converged);
  REQUIRE(std::fabs(bad.value - exact) > 1e-5);

  const auto good = integrate_dyadic(f, 3.0, {}, {1.3});
  REQUIRE(good.converged);
  REQUIRE(good.value == Approx(exact).epsilon(1e-12));
}

TEST_CASE("budget exhaustion reports the achieved accuracy") {
  // s^{-0.9} is too singular for the default budget
  const auto f = [](double s) { return std::pow(s, -0.9); };
  const auto r = integrate_dyadic(f, 1.0);
  REQUIRE_FALSE(r.converged);
  REQUIRE(r.err_estimate > 1e-4);
  REQUIRE(r.value == Approx(10.0).epsilon(1e-2));

  try {
    integrate_or_throw(f, 1.0);
    FAIL("expected QuadAccuracyError");
  } catch (const QuadAccuracyError& e) {
    REQUIRE(e.achieved() > 1e-4);
  }
}

TEST_CASE("invalid upper limit is rejected") {
  REQUIRE_THROWS_AS(integrate_dyadic([](double) { return 1.0; }, 0.0),
                    ArgumentError);
  REQUIRE_THROWS_AS(integrate_dyadic([](double) { return 1.0; }, -2.0),
                    ArgumentError);
}

TEST_CASE("interior breakpoints outside the range are ignored") {
  const auto f = [](double s) { return s * s; };
  const auto r = integrate_dyadic(f, 1.0, {}, {-0.5, 0.0, 1.0, 2.0});
  REQUIRE(r.converged);
  REQUIRE(r.value == Approx(1.0 / 3.0).epsilon(1e-13));
}
