#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "loopbc/integrable.hpp"

using namespace loopbc;
using std::numbers::pi;

namespace {

// sin a sin b written as a cosine difference, in long double
long double ss(long double a, long double b) { return (std::cos(a - b) - std::cos(a + b)) / 2; }

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  // 0 < 4 Phi < pi with sin 4 kappa Phi away from zero
  SpectralParams params() {
    SpectralParams p;
    p.Phi = uniform(0.05, pi / 4 - 0.02);
    do p.kappa = uniform(0.1, 3.0);
    while (std::abs(std::sin(4 * p.kappa * p.Phi)) < 0.05);
    return p;
  }
};

}  // namespace

TEST_CASE("bulk weights") {
  const double F = pi / 6;
  auto om = bulk_weights({0.0, F, 0});
  double s = std::sin(2 * F) * std::sin(3 * F);
  CHECK(om[0] == doctest::Approx(s));
  CHECK(om[1] == doctest::Approx(s));
  CHECK(om[4] == doctest::Approx(s));
  CHECK(om[2] == 0.0);
  CHECK(om[3] == 0.0);
  CHECK(om[5] == 0.0);
  CHECK(bulk_weights({F, F, 0})[5] == 0.0);

  const long double u = 0.2L, f = pi / 6;
  long double want[6] = {ss(2 * f, 3 * f) + ss(u, 3 * f - u), ss(2 * f, 3 * f - u), ss(2 * f, u),
                         ss(u, 3 * f - u), ss(2 * f - u, 3 * f - u), -ss(u, f - u)};
  om = bulk_weights({0.2, F, 0});
  for (int k = 0; k < 6; ++k) CHECK(std::abs(om[k] - double(want[k])) < 1e-15);
}

TEST_CASE("R-matrix structure") {
  const double F = 0.41;
  const double n = loop_weight_from_phi(F);
  LoopWeights w{n, n, n, n};
  Element r0 = r_operator({0.0, F, 0}, w);
  Element id = identity_element(2, w).scaled(std::sin(2 * F) * std::sin(3 * F));
  CHECK(r0.max_abs_difference(id) < 1e-15);
  Element r = r_operator({0.3, F, 0}, w);
  CHECK(r.coefficient(diagrams::identity(2, 0)) == doctest::Approx(bulk_weights({0.3, F, 0})[0]));
  for (double u : {0.1, 0.3, 0.9}) {
    Element a = r_operator({u, F, 0}, w), b = rotate_quarter(r_operator({3 * F - u, F, 0}, w));
    CHECK(a.max_abs_difference(b) < 1e-14);
  }
  // four quarter turns are the identity map on elements
  Element q = rotate_quarter(rotate_quarter(rotate_quarter(rotate_quarter(r))));
  CHECK(q.max_abs_difference(r) == 0.0);
}

TEST_CASE("Yang-Baxter equation") {
  Draw d(1);
  for (int t = 0; t < 50; ++t) {
    auto p = d.params();
    CHECK(ybe_residual(p.Phi, d.uniform(-1, 1), d.uniform(-1, 1)) < 1e-12);
  }
  CHECK(ybe_residual(0.4, 0.25, 0.25) < 1e-14);
  CHECK(ybe_residual(0.4, 0.3, 0.2, 1e-3) > 1e-6);
}

TEST_CASE("reflection equation and boundary crossing") {
  Draw d(2);
  for (KVariant v : {KVariant::BY1, KVariant::BY2, KVariant::BLOB1, KVariant::BLOB2}) {
    for (int t = 0; t < 25; ++t) {
      auto p = d.params();
      p.u = d.uniform(-1, 1);
      CHECK(reflection_residual(p, d.uniform(-1, 1), d.uniform(-1, 1), v) < 1e-12);
      CHECK(boundary_crossing_residual(p, v) < 1e-12);
    }
    SpectralParams p{0.0, 0.5, 0.7};
    CHECK(reflection_residual(p, 0, 0, v) < 1e-15);
    CHECK(boundary_crossing_residual(p, v) < 1e-14);
  }
}

TEST_CASE("a wrong K-matrix fails the reflection check") {
  // BLOB1 weights paired with the loop weight of a different kappa
  SpectralParams p{0.2, 0.5, 0.7};
  const double n = loop_weight_from_phi(p.Phi);
  LoopWeights w{n, n1_from_kappa(p.kappa + 0.1, p.Phi), n, n};
  auto K = [&](double s) {
    SpectralParams q = p;
    q.u = s;
    return k_element(2, k_weights(q, KVariant::BLOB1).beta, w);
  };
  auto R = [&](double s) { return r_element(2, 0, bulk_weights({s, p.Phi, 0}), w); };
  double u = 0.3, v = 0.1;
  Element lhs = R(u - v) * K(u) * R(u + v) * K(v);
  Element rhs = K(v) * R(u + v) * K(u) * R(u - v);
  CHECK(lhs.max_abs_difference(rhs) > 1e-6);
}

TEST_CASE("honeycomb points") {
  auto h = honeycomb_points(1.0);
  CHECK(h.x_c == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
  h = honeycomb_points(std::sqrt(2.0));
  CHECK(h.x_c == doctest::Approx(0.60).epsilon(0.01));
  CHECK(h.x_0 == doctest::Approx(0.90).epsilon(0.01));
  CHECK(honeycomb_points(2.0).y_S_singular);
  CHECK_THROWS(honeycomb_points(2.5));
  // x = 1/(2 cos Phi) on both branches
  for (double n : {-1.0, 0.0, 0.5, 1.0, 1.9}) {
    auto hp = honeycomb_points(n);
    CHECK(1 / (2 * std::cos(phi_from_n(n, true))) == doctest::Approx(hp.x_c));
    CHECK(1 / (2 * std::cos(phi_from_n(n, false))) == doctest::Approx(hp.x_0));
    CHECK(loop_weight_from_phi(phi_from_n(n, false)) == doctest::Approx(n));
  }
}

TEST_CASE("boundary monomer weights in the honeycomb limit") {
  for (double n : {0.0, 0.5, 1.0, std::sqrt(2.0), 1.8}) {
    SpectralParams p{0, phi_from_n(n), 0};
    auto h = honeycomb_points(n);
    auto by1 = honeycomb_boundary_ratios(p, KVariant::BY1);
    CHECK(std::sqrt(by1[0] * h.x_c) == doctest::Approx(h.x_c).epsilon(1e-12));
    auto by2 = honeycomb_boundary_ratios(p, KVariant::BY2);
    CHECK(std::sqrt(by2[0] * h.x_c) == doctest::Approx(h.y_S).epsilon(1e-12));
  }
}

TEST_CASE("AS-point weights") {
  for (int i = 0; i < 20; ++i) {
    double n = 0.05 + 1.9 * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      double n1 = n * (0.02 + 0.96 * j / 19.0);
      for (AsBranch b : {AsBranch::blob, AsBranch::unblob}) CHECK(as_point_weights(n, n1, b).mismatch < 1e-10);
      auto a = as_point_weights(n, n1, AsBranch::blob);
      auto du = as_point_weights(n, n - n1, AsBranch::unblob);
      CHECK(a.w_blob == doctest::Approx(du.w_unblob).epsilon(1e-12));
      CHECK(a.w_unblob == doctest::Approx(du.w_blob).epsilon(1e-12));
      // the trigonometric weights are the K-matrix ratios divided by x
      SpectralParams p{0, phi_from_n(n), a.kappa};
      auto r = honeycomb_boundary_ratios(p, KVariant::BLOB1);
      double x = honeycomb_points(n).x_c;
      CHECK(r[0] / x == doctest::Approx(a.w_unblob).epsilon(1e-10));
      CHECK(r[1] / x == doctest::Approx(a.w_blob).epsilon(1e-10));
    }
  }
  for (double n : {1.1, std::sqrt(2.0), 1.7}) {
    auto a = as_point_weights(n, 1.0, AsBranch::blob);
    double xc = honeycomb_points(n).x_c;
    CHECK(a.w_blob == doctest::Approx(1 / (xc * xc)).epsilon(1e-13));
    CHECK(std::abs(a.w_unblob) < 1e-13);
    // n1 -> n: every boundary loop is blobbed and weighs n, the special point
    auto s = as_point_weights_algebraic(n, n, AsBranch::blob);
    auto h = honeycomb_points(n);
    CHECK(s[0] == doctest::Approx(h.y_S * h.y_S / (h.x_c * h.x_c)).epsilon(1e-13));
  }
}
