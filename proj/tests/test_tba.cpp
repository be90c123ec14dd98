#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "loopbc/cft.hpp"
#include "loopbc/tba.hpp"

using namespace loopbc;

namespace {

// theta -> +inf (ir = false) or -inf (ir = true) limit of the TBA: the kernel integrates to 1/2,
// so eps_j = -1/2 [L(eps_{j-1}) + L(eps_{j+1})], with eps_1 = +inf in the IR. Returns 1 + e^{-eps_j}.
std::vector<double> algebraic_plateaus(int m, bool ir) {
  const int J = m - 2;
  std::vector<double> e(J, 0.0);
  auto L = [&](int j) { return j < 0 || j >= J || (ir && j == 0) ? 0.0 : std::log1p(std::exp(-e[j])); };
  for (int it = 0; it < 20000; ++it)
    for (int j = 0; j < J; ++j) e[j] = 0.5 * e[j] + 0.5 * (-0.5 * (L(j - 1) + L(j + 1)));
  std::vector<double> out;
  for (int j = 0; j < J; ++j) out.push_back(ir && j == 0 ? 1.0 : 1 + std::exp(-e[j]));
  return out;
}

const double kGolden = (1 + std::sqrt(5.0)) / 2;

}  // namespace

TEST_CASE("plateau closed forms") {
  CHECK(uv_plateau(4, 1) == doctest::Approx(kGolden * kGolden).epsilon(1e-14));
  CHECK(ir_plateau(4, 1) == doctest::Approx(1.0).epsilon(1e-15));
  for (int m = 3; m <= 9; ++m) {
    CHECK(uv_plateau(m, 0) == doctest::Approx(1.0));
    CHECK(std::abs(uv_plateau(m, m - 1) - 1) < 1e-12);
    CHECK(std::abs(ir_plateau(m, m - 1) - 1) < 1e-12);
    auto uv = algebraic_plateaus(m, false), ir = algebraic_plateaus(m, true);
    for (int j = 1; j <= m - 2; ++j) {
      CHECK(uv_plateau(m, j) == doctest::Approx(uv[j - 1]).epsilon(1e-12));
      CHECK(ir_plateau(m, j) == doctest::Approx(ir[j - 1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("kernel normalization") {
  CHECK(kernel_normalization(30, 0.05) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kernel_normalization(40, 0.025) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("admissible spins") {
  CHECK_THROWS_AS(TbaSystem(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(TbaSystem(4, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(TbaSystem(5, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(TbaSystem(2, 0.5), std::invalid_argument);
  CHECK_NOTHROW(TbaSystem(5, 1.5));
}

TEST_CASE("non-convergence is reported") {
  TbaSystem s(5, 0.5, 30, 0.05);
  solve(s, 1e-13, 3);
  CHECK_FALSE(s.converged);
  CHECK(s.iterations == 3);
  CHECK(s.residual > 1e-13);
}

TEST_CASE("solved plateaus, flow ratio and free-energy limits") {
  for (int m : {4, 5, 6}) {
    for (int two_s = 1; two_s <= m - 2; ++two_s) {
      CAPTURE(m);
      CAPTURE(two_s);
      TbaSystem s(m, two_s / 2.0, 40, 0.05);
      solve(s);
      REQUIRE(s.converged);
      auto pc = plateau_check(s);
      CHECK(pc.closed_form_error < 1e-8);
      CHECK(pc.recursion_error < 1e-8);
      CHECK(pc.y[0] < 1e-300);

      auto r = flow_ratio(s);
      CHECK(r.difference < 1e-4);
      CHECK(r.tba_closed == doctest::Approx(r.cft).epsilon(1e-12));
      CHECK(r.tba_numeric > 1);

      const double f_uv = -0.5 * std::log(uv_plateau(m, two_s));
      const double f_ir = -0.5 * std::log(ir_plateau(m, two_s));
      CHECK(boundary_free_energy(s, 25) == doctest::Approx(f_uv).epsilon(1e-7));
      CHECK(boundary_free_energy(s, -25) == doctest::Approx(f_ir).epsilon(1e-7));
      CHECK(std::exp(f_ir - f_uv) == doctest::Approx(r.cft).epsilon(1e-12));

      auto flow = boundary_flow(s, -20, 20, 80);
      for (std::size_t i = 1; i < flow.size(); ++i) CHECK(flow[i].f <= flow[i - 1].f + 1e-12);
      for (const auto& p : flow) CHECK(p.error < 1e-6);
    }
  }
}

TEST_CASE("2S = 1 is the special-to-ordinary flow") {
  // r1 = 1 puts the AS_blob wall at the isotropic special point.
  for (int m : {4, 5, 6}) {
    auto p = CoulombParams::from_n(2 * std::cos(M_PI / m)).with_r(1);
    CHECK(gfactor(Boundary::as_blob, p) == doctest::Approx(gfactor(Boundary::sp, p)).epsilon(1e-12));
    CHECK(flow_ratio_closed(m, 0.5) ==
          doctest::Approx(gfactor(Boundary::sp, p) / gfactor(Boundary::ord, p)).epsilon(1e-12));
  }
}

TEST_CASE("grid doubling") {
  TbaSystem a(5, 1.0, 35, 0.05), b(5, 1.0, 35, 0.025);
  solve(a);
  solve(b);
  for (double t : {-10.0, -3.0, 0.0, 2.5, 10.0}) CHECK(std::abs(boundary_free_energy(a, t) - boundary_free_energy(b, t)) < 1e-6);
  TbaSystem c(5, 1.0, 50, 0.05);
  solve(c);
  for (double t : {-10.0, 0.0, 10.0}) CHECK(std::abs(boundary_free_energy(a, t) - boundary_free_energy(c, t)) < 1e-8);
}

TEST_CASE("UV expansion exponent") {
  for (int m : {4, 5, 6}) {
    for (int two_s = 1; two_s <= m - 2; ++two_s) {
      CAPTURE(m);
      CAPTURE(two_s);
      TbaSystem s(m, two_s / 2.0, 40, 0.05);
      solve(s);
      auto u = uv_expansion_exponent(s);
      CHECK(u.expected == doctest::Approx(4.0 / (m + 1)));
      CHECK(std::abs(u.exponent / u.expected - 1) < 0.05);
      CHECK(u.window_drift < 0.05);
      // the perturbation is phi_{1,3} at g = (m+1)/m
      CHECK(1 - u.expected / 2 == doctest::Approx(kac_weight(1, 3, (m + 1.0) / m)).epsilon(1e-14));
    }
  }
  TbaSystem s(5, 0.5, 30, 0.05);
  CHECK_THROWS_AS(uv_expansion_exponent(s, 12, 24), std::invalid_argument);
}
