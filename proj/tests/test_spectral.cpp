#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "bifurc/equilibria.hpp"
#include "bifurc/errors.hpp"
#include "bifurc/scan.hpp"
#include "bifurc/spectral.hpp"
#include "support.hpp"

using namespace bifurc;
using namespace testsup;

TEST_CASE("pure imaginary pair from (t, delta) = (0, w^2)") {
  CharPoly cp;
  cp.degree = 2;
  cp.c = {4.0, 0.0, 0.0};
  auto ev = eigenvalues(cp);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].real() == 0.0);
  CHECK(std::fabs(std::fabs(ev[0].imag()) - 2.0) < 1e-12);
}

TEST_CASE("factorized cubic at the Hopf condition") {
  // c1*c2 = c0, c1 > 0: roots +-i sqrt(c1) and -c2
  double c2 = 0.7, c1 = 0.31;
  CharPoly cp;
  cp.degree = 3;
  cp.c = {c1 * c2, c1, c2};
  auto ev = eigenvalues(cp);
  REQUIRE(ev.size() == 3);
  double w = std::sqrt(c1);
  int imag_count = 0;
  for (auto z : ev) {
    if (std::fabs(z.imag()) > 1e-12) {
      ++imag_count;
      CHECK(std::fabs(z.real()) < 1e-10);
      CHECK(std::fabs(std::fabs(z.imag()) - w) < 1e-10);
    } else {
      CHECK(z.real() == doctest::Approx(-c2).epsilon(1e-10));
    }
  }
  CHECK(imag_count == 2);
}

TEST_CASE("eigenvalue residuals over random polynomials") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    CharPoly cp;
    cp.degree = (i % 2) ? 3 : 2;
    cp.c = {u(rng), u(rng), cp.degree == 3 ? u(rng) : 0.0};
    for (auto z : eigenvalues(cp)) {
      std::complex<double> res;
      if (cp.degree == 2)
        res = (z + cp.c[1]) * z + cp.c[0];
      else
        res = ((z + cp.c[2]) * z + cp.c[1]) * z + cp.c[0];
      CHECK(std::abs(res) < 1e-9 * (1.0 + std::pow(std::abs(z), cp.degree)));
    }
  }
}

TEST_CASE("planar characteristic coefficients match the printed numerators") {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    ParameterSet p = draw_params(rng, ModelId::inhost_convex);
    auto q = infected_quadratic(p);
    for (int r = 0; r < q.n_roots; ++r) {
      double y = q.roots[r];
      if (y <= 0.0) continue;
      State x = lift_root(p, y);
      CharPoly cp = char_poly(p, x);
      double den = ((p[0] + p[1]) * y + p[1] * p[2]) * (y + p[2]);
      double t_num = inhost_trace_num(p, y), d_num = inhost_det_num(p, y);
      CHECK(cp.t() * den == doctest::Approx(t_num).epsilon(1e-10));
      CHECK(cp.delta() * den == doctest::Approx(d_num).epsilon(1e-10));
    }
  }
}

TEST_CASE("trace numerator nearly vanishes at the tabulated Hopf point") {
  auto p = inhost(0.8, 0.0355);
  CHECK(std::fabs(inhost_trace_num(p, 0.8725)) < 5e-4);
}

TEST_CASE("autoimmune positive branch pins the negated trace to mu_n") {
  std::mt19937 rng(314);
  int found = 0;
  for (int i = 0; i < 1000; ++i) {
    ParameterSet p = draw_params(rng, ModelId::autoimmune_2d);
    // scale lambda_E above the threshold so the positive branch exists
    double thr = transcritical_threshold(p);
    p = p.with(11, thr * log_uniform(rng, 1.01, 10.0));
    auto pts = infected_equilibria(p);
    for (const auto& e : pts) {
      if (!e.feasible || e.state[0] <= 0.0) continue;
      ++found;
      CharPoly cp = char_poly(p, e.state);
      double mu_n = p[7];
      CHECK(std::fabs(cp.t() - mu_n) <= 1e-10 * mu_n);
    }
  }
  CHECK(found > 500);
  // hence no Hopf point on the positive branch
  CHECK(find_hopf(autoimmune2(1000.0)).empty());
}

TEST_CASE("h1 negativity interval for the treatment model") {
  auto h = h_indicator(sir_treatment(0.001, 9.0), 1.0);
  REQUIRE(h.negativity);
  CHECK(std::fabs(h.negativity->first - 1.72) < 0.01);
  CHECK(std::isinf(h.negativity->second));

  auto h4 = h_indicator(sir_treatment(0.027, 9.0), 1.0);
  REQUIRE(h4.negativity);
  CHECK(std::fabs(h4.negativity->first - 1.85) < 0.01);
  CHECK(std::fabs(h4.negativity->second - 30.65) < 0.01);
}

TEST_CASE("h2 at the origin and its eliminated form") {
  auto p = inhost(0.07, 0.05);
  double expected = 0.05 * 0.823 * 0.823 * 0.057;  // B C^2 D
  CHECK(h_indicator(p, 0.0).value == doctest::Approx(expected).epsilon(1e-14));

  auto h = h_indicator(p, 1.0, true);
  REQUIRE(h.negativity);
  CHECK(std::fabs(h.negativity->first - 0.0476) < 1e-3);
  CHECK(std::fabs(h.negativity->second - 0.8030) < 1e-3);
}

// Oracle: the displayed on-branch rational form of h2.
static double h2_rational(double A, double C, double D, double y) {
  double q2 = A * C * (D - 1.0) - D * D;
  double q1 = -(A * C * (D - 1.0) + 2.0 * C * D * D);
  double q0 = -C * C * D * D;
  return ((q2 * y + q1) * y + q0) / (y - 1.0);
}

TEST_CASE("eliminated h2 equals the on-branch rational form") {
  std::mt19937 rng(272);
  for (int i = 0; i < 300; ++i) {
    ParameterSet p = draw_params(rng, ModelId::inhost_convex);
    double y = log_uniform(rng, 1e-3, 0.99);
    double got = h_indicator(p, y, true).value;
    double want = h2_rational(p[0], p[2], p[3], y);
    if (!std::isfinite(got) || !std::isfinite(want)) continue;
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("sign linkage at trace zeros: sign(h) = -sign(delta)") {
  for (double A : {0.8, 0.71, 0.07, 0.06, 0.05, 0.04}) {
    auto p = inhost(A, 0.05);
    for (const auto& c : find_hopf(p)) {
      ParameterSet pc = p.with(1, c.param_value);
      CharPoly cp = char_poly(pc, c.state);
      double h = h_indicator(pc, c.state[1]).value;
      CHECK(std::signbit(h) != std::signbit(cp.delta()));
    }
  }
}

TEST_CASE("char_poly rejects non-equilibria") {
  auto p = inhost(0.8, 0.036);
  CHECK_THROWS_AS(char_poly(p, State(3.0, 0.5)), ContractViolation);
}

TEST_CASE("stability classes") {
  auto p = inhost(0.8, 0.036);
  auto pts = infected_equilibria(p);
  REQUIRE(pts.size() == 2);
  CHECK(stability(p, pts[0].state).cls == StabilityClass::saddle);
  CHECK(char_poly(p, pts[0].state).delta() < 0.0);
  // at the transcritical threshold the leading eigenvalue sits on the axis
  auto pc = p.with(1, 0.057);
  CHECK(stability(pc, uninfected_equilibrium(pc).first.state).cls ==
        StabilityClass::nonhyperbolic);
}
