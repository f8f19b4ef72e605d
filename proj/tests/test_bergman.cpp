#include <cmath>
#include <complex>

#include "catch2/catch_amalgamated.hpp"
#include "demlab/bergman.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace demlab;

namespace {

Weight disk_weight(const std::string& name, CatalogParams par = {}) {
  return catalog(Domain::disk(), name, par);
}

}  // namespace

TEST_CASE("basis windows follow the inclusion rule") {
  const auto z = make_basis(disk_weight("zero"), 1);
  REQUIRE(z.a0[0] == 0);
  REQUIRE(z.N[0] == 60);
  REQUIRE(z.total == 61);

  const auto lp = make_basis(disk_weight("log_pole"), 8);
  REQUIRE(lp.a0[0] == 8);
  REQUIRE(lp.N[0] == 72);
  REQUIRE(lp.total == 65);

  // borderline inclusion: alpha + 1 - m gamma must be strictly positive
  CatalogParams third;
  third.gammas = {1.0 / 3.0};
  const Weight w3 = disk_weight("log_pole", third);
  REQUIRE(make_basis(w3, 2).a0[0] == 0);
  REQUIRE(make_basis(w3, 3).a0[0] == 1);
  int prev = 0;
  for (int m = 1; m <= 12; ++m) {
    const int a = make_basis(w3, m).a0[0];
    REQUIRE(a >= prev);
    prev = a;
  }

  const auto p2 = make_basis(catalog(Domain::polydisk(1, 1), "log_pole"), 2);
  REQUIRE(p2.total == 59L * 59L);

  // positive radial mass widens the window (peak degree ~ 2 m sup v), and
  // an offset never does: shifted weights stay on the same span
  REQUIRE(make_basis(disk_weight("abs_square"), 64).N[0] == 296);
  REQUIRE(make_basis(disk_weight("neg_abs_square"), 8).N[0] == 72);
  REQUIRE(make_basis(disk_weight("zero").with_offset(10.0), 8).N[0] == 60);

  REQUIRE_THROWS_AS(make_basis(disk_weight("zero"), 0), ArgumentError);
  const Weight big = disk_weight("zero").with_offset(10.0);
  REQUIRE_NOTHROW(make_basis(big, 30));
  REQUIRE_THROWS_AS(make_basis(big, 31), ArgumentError);
}

TEST_CASE("monomial norms match the beta integrals") {
  const Weight z = disk_weight("zero");
  REQUIRE(monomial_norm(z, 1, {0, 0}) == Approx(oracle::kPi).epsilon(1e-11));
  REQUIRE(monomial_norm(z, 1, {5, 0}) == Approx(oracle::kPi / 6.0).epsilon(1e-11));

  // weight m log|z|: ||z^a||^2 = pi / (a + 1 - m)
  const Weight lp = disk_weight("log_pole");
  REQUIRE(monomial_norm(lp, 2, {3, 0}) == Approx(oracle::kPi / 2.0).epsilon(1e-10));
  REQUIRE(monomial_norm(lp, 2, {2, 0}) == Approx(oracle::kPi).epsilon(1e-10));

  // offsets scale norms by exp(-2 m c)
  const Weight sh = z.with_offset(0.25);
  REQUIRE(log_monomial_norm(sh, 3, {1, 0}) ==
          Approx(log_monomial_norm(z, 3, {1, 0}) - 6.0 * 0.25).margin(1e-11));

  REQUIRE_THROWS_AS(monomial_norm(lp, 2, {1, 0}), ArgumentError);
  CatalogParams bp;
  bp.eps = 0.02;
  REQUIRE_THROWS_AS(monomial_norm(disk_weight("angular_bump", bp), 2, {1, 0}),
                    EngineMismatchError);
}

TEST_CASE("unweighted disk kernel matches the closed form") {
  const KernelEvaluator ke(disk_weight("zero"), 1);
  REQUIRE(ke.engine() == Engine::diagonal);
  REQUIRE(ke.basis().N[0] == 60);

  const KernelValue k0 = ke.at(Point::one({0.0, 0.0}));
  REQUIRE(k0.value == Approx(oracle::kDiskKernelZero).epsilon(1e-10));
  REQUIRE(k0.log_value == Approx(-oracle::kLogPi).margin(1e-10));
  REQUIRE(k0.clipped == 0);
  REQUIRE(k0.basis_size == 61);

  for (double r : {0.25, 0.5, 0.75}) {
    const KernelValue kv = ke.at(Point::one({r, 0.0}));
    REQUIRE(kv.value == Approx(oracle::disk_kernel(r)).epsilon(1e-9));
    REQUIRE(kv.tail_rel < 1e-8);
  }
  REQUIRE(ke.at(Point::one({0.5, 0.0})).value ==
          Approx(oracle::kDiskKernelHalf).epsilon(1e-9));

  // rotation invariance for a radial weight
  const double a = ke.at(Point::one({0.3, 0.4})).log_value;
  const double b = ke.at(Point::one({-0.5, 0.0})).log_value;
  REQUIRE(a == Approx(b).margin(1e-12));

  // truncation is hopeless this close to the rim and the tail says so
  REQUIRE(ke.at(Point::one({0.999, 0.0})).tail_rel == kPosInf);

  REQUIRE_THROWS_AS(ke.at(Point::one({1.2, 0.0})), DomainError);
}

TEST_CASE("pole weight kernel drops the first m monomials") {
  for (int m = 1; m <= 8; ++m) {
    const KernelEvaluator ke(disk_weight("log_pole"), m);
    REQUIRE(ke.basis().a0[0] == m);
    for (double r : {0.25, 0.5, 0.75}) {
      const KernelValue kv = ke.at(Point::one({r, 0.0}));
      REQUIRE(kv.value == Approx(oracle::pole_kernel(r, m)).epsilon(1e-9));
    }
    const KernelValue at0 = ke.at(Point::one({0.0, 0.0}));
    REQUIRE(at0.log_value == kNegInf);
    REQUIRE(at0.value == 0.0);
    REQUIRE(at0.tail_rel == 0.0);
  }
  REQUIRE(KernelEvaluator(disk_weight("log_pole"), 2).at(Point::one({0.5, 0.0})).value ==
          Approx(oracle::kPoleKernelM2Half).epsilon(1e-9));
}

TEST_CASE("offset equivariance is exact through both engines") {
  const double c = 0.3125;
  const Point z = Point::one({0.3, 0.4});

  const Weight w = disk_weight("log_pole");
  const KernelEvaluator a(w, 3), b(w.with_offset(c), 3);
  REQUIRE(b.at(z).log_value - a.at(z).log_value ==
          Approx(2.0 * 3 * c).margin(1e-12));

  CatalogParams bp;
  bp.eps = 0.02;
  const Weight ab = disk_weight("angular_bump", bp);
  const KernelEvaluator ga(ab, 2), gb(ab.with_offset(c), 2);
  REQUIRE(ga.engine() == Engine::gram);
  REQUIRE(gb.at(z).log_value - ga.at(z).log_value ==
          Approx(2.0 * 2 * c).margin(1e-10));
}

TEST_CASE("diagonal and gram engines agree on toric weights") {
  CatalogParams table;
  table.knots = {0.0, 0.3, 0.7, 1.0};
  table.values = {0.0, 0.05, -0.1, 0.2};
  const std::vector<std::pair<Weight, int>> cases = {
      {disk_weight("zero"), 2},
      {disk_weight("log_pole"), 2},
      {disk_weight("neg_abs_square"), 4},
      {disk_weight("radial_custom", table), 2},
  };
  const std::vector<Point> probes = {Point::one({0.35, 0.2}),
                                     Point::one({0.0, 0.75}),
                                     Point::one({-0.55, 0.1})};
  for (const auto& [w, m] : cases) {
    const KernelEvaluator d(w, m, Engine::diagonal);
    const KernelEvaluator g(w, m, Engine::gram);
    for (const Point& z : probes) {
      const double kd = d.at(z).value, kg = g.at(z).value;
      REQUIRE(kg == Approx(kd).epsilon(1e-8));
    }
  }
}

TEST_CASE("gram quadrature is converged at its fixed resolution") {
  CatalogParams bp;
  bp.eps = 0.02;
  const Weight w = disk_weight("angular_bump", bp);
  const auto coarse = detail::build_gram(w, 2, 1e-12);
  const auto fine = detail::build_gram(w, 2, 1e-12, 2048, 9, 24);
  for (double r : {0.2, 0.5, 0.8}) {
    const Point z = Point::one({r, 0.1});
    REQUIRE(detail::gram_eval(fine, z).log_value ==
            Approx(detail::gram_eval(coarse, z).log_value).margin(1e-8));
  }
}

TEST_CASE("a small angular bump moves the kernel by at most 2 m eps R") {
  CatalogParams bp;
  bp.eps = 0.01;
  const KernelEvaluator bumped(disk_weight("angular_bump", bp), 4);
  const KernelEvaluator flat(disk_weight("zero"), 4);
  for (double r : {0.3, 0.6}) {
    for (double th : {0.0, 1.5, 3.0}) {
      const Point z = Point::one({r * std::cos(th), r * std::sin(th)});
      const double d = bumped.at(z).log_value - flat.at(z).log_value;
      REQUIRE(std::fabs(d) <= 2.0 * 4 * 0.01 + 1e-6);
    }
  }
}

TEST_CASE("extremal witness identities hold at interior points") {
  const std::vector<Point> samples = {Point::one({0.1, 0.0}),
                                      Point::one({-0.3, 0.25}),
                                      Point::one({0.0, 0.55})};
  const KernelEvaluator ke(disk_weight("zero"), 4);
  const auto r = extremal_witness_check(ke, Point::one({0.4, 0.1}), samples);
  REQUIRE(r.norm_gap <= 1e-10);
  REQUIRE(r.attain_gap <= 1e-10);
  REQUIRE(r.cs_excess <= 1e-10);

  CatalogParams bp;
  bp.eps = 0.02;
  const KernelEvaluator gk(disk_weight("angular_bump", bp), 2);
  const auto gr = extremal_witness_check(gk, Point::one({0.4, 0.1}), samples);
  REQUIRE(gr.norm_gap <= 1e-8);
  REQUIRE(gr.attain_gap <= 1e-8);
  REQUIRE(gr.cs_excess <= 1e-8);

  const KernelEvaluator lp(disk_weight("log_pole"), 2);
  REQUIRE_THROWS_AS(extremal_witness_check(lp, Point::one({0.0, 0.0}), samples),
                    ArgumentError);
}

TEST_CASE("engine constraints are enforced") {
  CatalogParams bp;
  bp.eps = 0.02;
  REQUIRE_THROWS_AS(KernelEvaluator(disk_weight("angular_bump", bp), 2,
                                    Engine::diagonal),
                    EngineMismatchError);
  REQUIRE_THROWS_AS(KernelEvaluator(catalog(Domain::polydisk(1, 1), "zero"), 2,
                                    Engine::gram),
                    EngineMismatchError);
}

TEST_CASE("polydisk kernels factor across axes") {
  const Weight w2 = catalog(Domain::polydisk(1, 1), "log_pole");
  const Weight w1 = disk_weight("log_pole");
  const KernelEvaluator k2(w2, 2);
  const KernelEvaluator k1(w1, 2);
  const Point z = Point::two({0.4, 0.0}, {0.0, 0.3});
  const double lhs = k2.at(z).log_value;
  const double rhs = k1.at(Point::one({0.4, 0.0})).log_value +
                     k1.at(Point::one({0.0, 0.3})).log_value;
  REQUIRE(lhs == Approx(rhs).margin(1e-10));
  REQUIRE(k2.at(Point::two({0.0, 0.0}, {0.3, 0.0})).log_value == kNegInf);
}
