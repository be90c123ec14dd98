#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

#include "loopbc/cft.hpp"
#include "loopbc/transfer.hpp"
#include "brute_force_oracle.hpp"

using namespace loopbc;
using namespace loopbc::oracle;

TEST_CASE("transfer partition sums equal brute-force enumeration (exact rationals)") {
  const auto cases = enumeration_cases();
  int compared = 0;
  for (const auto& c : cases) {
    const LocalWeights<Q> kw = kernel_weights(c.m);
    for (int width = 2; width <= 6; ++width)
      for (bool bf : {false, true})
        for (int rows = 1; rows <= 3; ++rows) {
          auto plan = LayerPlan::standard(width, bf);
          Lattice lat = build_lattice(plan, rows);
          if (lat.edges > 14) continue;
          CAPTURE(c.name);
          CAPTURE(width);
          CAPTURE(rows);
          CAPTURE(bf);
          Q z = partition_sum(plan, kw, rows);
          CHECK(z == brute_force(lat, c.m));
          ++compared;
        }
  }
  CHECK(compared >= 60);
}

TEST_CASE("sector bases reached from the seed lie in the enumerated sector basis") {
  TransferParams p;
  p.n = 1.2;
  const auto ord = BoundarySpec::ordinary(0.6);
  const auto an = BoundarySpec::anisotropic(1.3, 0.4, 0.5);
  struct Case {
    BoundarySpec l, r;
    BoundaryMode mode;
    Sector s;
  };
  for (int n = 3; n <= 6; ++n) {
    for (Case c : {Case{ord, ord, BoundaryMode::blobless, {0}}, Case{ord, ord, BoundaryMode::blobless, {2}},
                   Case{an, ord, BoundaryMode::one_boundary, {0}}, Case{an, ord, BoundaryMode::one_boundary, {1, Mark::blob}},
                   Case{an, ord, BoundaryMode::one_boundary, {2, Mark::unblob}},
                   Case{an, an, BoundaryMode::two_boundary, {0}},
                   Case{an, an, BoundaryMode::two_boundary, {1, Mark::blob, Mark::unblob}}}) {
      if (c.s.strings > n) continue;
      auto t = build_transfer(n, p, c.l, c.r, c.s);
      std::set<LinkPattern::Key> keys;
      for (const auto& q : enumerate_basis(n, c.s, c.mode, true)) keys.insert(q.key());
      CAPTURE(n);
      CAPTURE(c.s.strings);
      for (const auto& q : t.basis()) CHECK(keys.count(q.key()) == 1);
      for (const auto& q : t.basis()) {
        int strings = 0;
        for (int i = 0; i < n; ++i) strings += q.link[i] == LinkPattern::kString;
        CHECK(strings == c.s.strings);
      }
    }
  }
  CHECK_THROWS_AS(build_transfer(4, p, ord, ord, {1, Mark::blob}), std::invalid_argument);
  CHECK_THROWS_AS(build_transfer(4, p, an, ord, {1}), std::invalid_argument);
  CHECK_THROWS_AS(build_transfer(4, p, BoundarySpec::open(1), an), std::invalid_argument);
}

TEST_CASE("anisotropic wall with n1 = n and w_blob = w_unblob is an ordinary wall") {
  TransferParams p;
  p.n = 1.3;
  const double x = p.monomer(), w = 1.7;
  const auto right = BoundarySpec::ordinary(x);
  for (int n = 3; n <= 8; ++n) {
    double a = leading_eigenvalue(build_transfer(n, p, BoundarySpec::anisotropic(w, w, p.n), right)).value;
    double b = leading_eigenvalue(build_transfer(n, p, BoundarySpec::ordinary(x * std::sqrt(w)), right)).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-11));
  }
}

TEST_CASE("duality n1 -> n - n1 with blob and unblob exchanged") {
  TransferParams p;
  p.n = std::sqrt(2.0);
  const auto right = BoundarySpec::ordinary(p.monomer());
  for (int n = 3; n <= 8; ++n) {
    auto a = build_transfer(n, p, BoundarySpec::anisotropic(2.1, 0.7, 0.4), right);
    auto b = build_transfer(n, p, BoundarySpec::anisotropic(0.7, 2.1, p.n - 0.4), right);
    CHECK(leading_eigenvalue(a).value == doctest::Approx(leading_eigenvalue(b).value).epsilon(1e-11));
    auto a1 = build_transfer(n, p, BoundarySpec::anisotropic(2.1, 0.7, 0.4), right, {1, Mark::blob});
    auto b1 = build_transfer(n, p, BoundarySpec::anisotropic(0.7, 2.1, p.n - 0.4), right, {1, Mark::unblob});
    CHECK(leading_eigenvalue(a1).value == doctest::Approx(leading_eigenvalue(b1).value).epsilon(1e-11));
  }
}

TEST_CASE("open wall equals an anisotropic blob wall with n1 = 1 and one more strand") {
  // w_unblob = 0 forbids unblobbed contacts; w_blob = 1/x^2 gives each contact 1/x
  for (double n : {0.6, 1.0, std::sqrt(2.0)}) {
    TransferParams p;
    p.n = n;
    const double x = p.monomer();
    const auto right = BoundarySpec::ordinary(x);
    const auto as = BoundarySpec::anisotropic(1 / (x * x), 0, 1.0);
    const auto op = BoundarySpec::open(1.0);
    for (int N = 3; N <= 7; ++N) {
      double za = partition_sum(LayerPlan::standard(N), local_weights(p, as, right), 3);
      double zb = partition_sum(LayerPlan::standard(N - 1, true), local_weights(p, op, right), 3);
      CHECK(za == doctest::Approx(zb).epsilon(1e-12));
      double la = leading_eigenvalue(build_transfer(N, p, as, right)).value;
      double lb = leading_eigenvalue(build_transfer(N - 1, p, op, right, {}, true)).value;
      CHECK(la == doctest::Approx(lb).epsilon(1e-11));
    }
  }
}

TEST_CASE("Arnoldi against dense eigensolvers") {
  SUBCASE("multiple of the identity") {
    auto r = leading_eigenvalue([](const Eigen::VectorXd& v) { Eigen::VectorXd o = 2.5 * v; return o; }, 50);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.5).epsilon(1e-14));
  }
  SUBCASE("transfer matrices at small width") {
    TransferParams p;
    p.n = 1.1;
    for (auto left : {BoundarySpec::ordinary(0.9), BoundarySpec::anisotropic(1.4, 0.3, 0.6)}) {
      for (int n = 3; n <= 5; ++n) {
        auto t = build_transfer(n, p, left, BoundarySpec::ordinary(0.5));
        Eigen::EigenSolver<Eigen::MatrixXd> es(t.dense());
        double best = 0;
        for (auto v : es.eigenvalues()) best = std::max(best, std::abs(v));
        auto r = leading_eigenvalue(t);
        CHECK(r.converged);
        CHECK(r.residual < 1e-12);
        CHECK(r.value == doctest::Approx(best).epsilon(1e-11));
        Eigen::VectorXd tv = t.apply(r.vector);
        CHECK((tv - r.value * r.vector).norm() < 1e-10 * r.value);
      }
    }
  }
  SUBCASE("a dominant complex pair is reported") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
    m(0, 1) = -2, m(1, 0) = 2;  // rotation scaled by 2: eigenvalues +-2i
    for (int i = 2; i < 6; ++i) m(i, i) = 0.5;
    auto r = leading_eigenvalue([&](const Eigen::VectorXd& v) { Eigen::VectorXd o = m * v; return o; }, 6);
    CHECK(r.complex_pair);
    CHECK_FALSE(r.converged);
  }
}

TEST_CASE("scaling fit recovers a synthetic central charge exactly") {
  const double c = -1.7, a = kHoneycombAspect;
  std::vector<int> widths{4, 5, 6, 7, 8, 9, 10};
  std::vector<double> f;
  for (int N : widths)
    f.push_back(0.3 + 0.2 / N - M_PI * c * a / (24.0 * N * N) + 0.05 / std::pow(N, 3) - 0.02 / std::pow(N, 4));
  auto fit = extract_ceff(widths, f);
  CHECK(fit.estimates.size() == 3);
  for (double e : fit.estimates) CHECK(e == doctest::Approx(c).epsilon(1e-9));
  CHECK(fit.bulk.back() == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(fit.error < 1e-9);
  CHECK_THROWS_AS(extract_ceff({4, 5}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(extract_ceff({5, 4, 6}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("zeta from the leading exponent") {
  CHECK(zeta_from_h0(0, 1.25) == doctest::Approx(1));
  CHECK(zeta_from_h0(kac_weight(1, 2, 1.25), 1.25) == doctest::Approx(3));
  CHECK(zeta_from_h0(kac_weight(2, 1, 1.25), 1.25) == doctest::Approx(6));
  CHECK(zeta_from_h0(kac_weight(1.7, 1.7, 1.25), 1.25) == doctest::Approx(1.7));
  CHECK_THROWS_AS(zeta_from_h0(-1, 1.25), std::domain_error);
  CHECK_THROWS_AS(zeta_from_h0(0, 1.0), std::domain_error);
}

TEST_CASE("ordinary strip at small widths approaches c = 7/10") {
  TransferParams p;
  auto run = ceff_scan(p, BoundarySpec::ordinary(p.monomer()), BoundarySpec::ordinary(p.monomer()),
                       {4, 5, 6, 7, 8, 9, 10});
  CHECK(run.fit.value == doctest::Approx(0.7).epsilon(0.03));
}
