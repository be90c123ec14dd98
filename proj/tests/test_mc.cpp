#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "loopbc/cft.hpp"
#include "loopbc/mc_ising.hpp"

using namespace loopbc;

namespace {

// Independent wall tracer: dual vertices are triangles keyed by their sorted site triple,
// boundary ends by the boundary bond. Curves are followed edge by edge.
struct Traced {
  int closed = 0, arcs = 0, crossing = 0, edges = 0;
};

Traced trace_walls(const SpinLattice& l) {
  using Key = std::array<int, 3>;  // {-1, a, b} marks a boundary end below, {-2, a, b} above
  std::map<Key, std::vector<int>> incident;
  std::vector<std::pair<Key, Key>> edges;
  auto tri = [](int a, int b, int c) {
    Key k{a, b, c};
    std::sort(k.begin(), k.end());
    return k;
  };
  auto add = [&](int a, int b, Key p, Key q) {
    if (l.spin[a] == l.spin[b]) return;
    edges.push_back({p, q});
    incident[p].push_back(int(edges.size()) - 1);
    incident[q].push_back(int(edges.size()) - 1);
  };
  for (int r = 0; r < l.N; ++r)
    for (int i = 0; i < l.W; ++i) {
      int a = l.site(i, r), b = l.site(i + 1, r);
      Key above = r + 1 < l.N ? tri(a, b, l.site(i, r + 1)) : Key{-2, a, b};
      Key below = r > 0 ? tri(a, b, l.site(i + 1, r - 1)) : Key{-1, a, b};
      add(a, b, above, below);
      if (r + 1 < l.N) {
        int c = l.site(i, r + 1), d = l.site(i - 1, r + 1);
        add(a, c, tri(a, b, c), tri(a, c, d));
        add(b, c, tri(a, b, c), tri(b, c, l.site(i + 1, r + 1)));
      }
    }
  Traced t;
  t.edges = int(edges.size());
  std::vector<bool> used(edges.size(), false);
  auto walk = [&](Key start, int e) {
    Key at = start;
    while (true) {
      used[e] = true;
      at = edges[e].first == at ? edges[e].second : edges[e].first;
      if (at[0] < 0) return at;
      int next = -1;
      for (int f : incident[at])
        if (!used[f]) next = f;
      if (next < 0) return at;  // closed
      e = next;
    }
  };
  for (const auto& [k, inc] : incident) {
    if (k[0] >= 0 || used[inc[0]]) continue;
    Key end = walk(k, inc[0]);
    if (end[0] < 0 && end[0] != k[0]) ++t.crossing;
    else ++t.arcs;
  }
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (!used[e]) {
      walk(edges[e].first, int(e));
      ++t.closed;
    }
  return t;
}

// Mean and batch-means error of a series.
std::pair<double, double> mean_err(const std::vector<double>& x, int batches = 40) {
  double m = 0;
  for (double v : x) m += v;
  m /= x.size();
  std::size_t b = x.size() / batches;
  double v = 0;
  for (int k = 0; k < batches; ++k) {
    double s = 0;
    for (std::size_t t = k * b; t < (k + 1) * b; ++t) s += x[t];
    v += std::pow(s / b - m, 2);
  }
  return {m, std::sqrt(v / (batches - 1) / batches)};
}

int total_bonds(int W, int N) { return W * (3 * N - 2); }

}  // namespace

TEST_CASE("geometry") {
  CHECK(std::exp(-2 * kIsingKc) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(kIsingKc == doctest::Approx(std::log(3.0) / 4).epsilon(1e-15));
  CHECK(circumference_for(2 / std::sqrt(3.0), 16) == 17);
  CHECK(aspect_ratio(17, 16) == doctest::Approx(2 / std::sqrt(3.0)));
  CHECK(circumference_for(1.0, 16, 0.0) == 14);
  SpinLattice l(5, 4, 0.3, 1);
  int nb[6];
  CHECK(l.neighbours(l.site(2, 0), nb) == 4);
  CHECK(l.neighbours(l.site(2, 1), nb) == 6);
  CHECK(l.neighbours(l.site(0, 3), nb) == 4);
  std::fill(l.spin.begin(), l.spin.end(), 1);
  CHECK(l.energy() == doctest::Approx(-0.3 * total_bonds(5, 4)));
  CHECK_THROWS_AS(SpinLattice(2, 4, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_algorithm("glauber"), std::invalid_argument);
}

TEST_CASE("hand-built wall configurations") {
  SpinLattice l(8, 6, 0.2, 1);
  std::fill(l.spin.begin(), l.spin.end(), 1);
  auto d = decompose_walls(l);
  CHECK(d.wall_edges == 0);
  CHECK(d.crossing == 0);
  CHECK(d.closed_loops + d.same_boundary_arcs == 0);

  for (int r = 0; r < l.N; ++r)
    for (int i = 0; i < l.W; ++i) l.spin[l.site(i, r)] = r % 2 ? -1 : 1;
  d = decompose_walls(l);
  CHECK(d.crossing == 0);
  CHECK(d.same_boundary_arcs == 0);
  CHECK(d.closed_loops == l.N - 1);  // one ring between consecutive rows
  CHECK(d.wall_edges == 2 * l.W * (l.N - 1));

  // a vertical band of minus spins, sheared with the rows
  for (int r = 0; r < l.N; ++r)
    for (int i = 0; i < l.W; ++i) l.spin[l.site(i - r / 2, r)] = i < 3 ? -1 : 1;
  d = decompose_walls(l);
  CHECK(d.crossing == 2);
  CHECK(d.closed_loops == 0);
  CHECK(d.same_boundary_arcs == 0);
  CHECK(d.edges_assigned == d.wall_edges);
  CHECK(d.even_degree);

  // an isolated minus spin in the bulk: one closed hexagon
  std::fill(l.spin.begin(), l.spin.end(), 1);
  l.spin[l.site(3, 2)] = -1;
  d = decompose_walls(l);
  CHECK(d.closed_loops == 1);
  CHECK(d.wall_edges == 6);
  // on the bottom row: an arc with both ends on the bottom edge
  std::fill(l.spin.begin(), l.spin.end(), 1);
  l.spin[l.site(3, 0)] = -1;
  d = decompose_walls(l);
  CHECK(d.same_boundary_arcs == 1);
  CHECK(d.wall_edges == 4);
}

TEST_CASE("wall decomposition matches an independent tracer") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int W : {3, 4, 7, 12})
    for (int N : {1, 2, 3, 6, 11})
      for (double K : {0.0, kIsingKc, 0.4}) {
        SpinLattice l(W, N, K, rng());
        for (int rep = 0; rep < 5; ++rep) {
          sweep(l, Algorithm::metropolis, 2);
          auto d = decompose_walls(l);
          auto t = trace_walls(l);
          CHECK(d.crossing == t.crossing);
          CHECK(d.closed_loops == t.closed);
          CHECK(d.same_boundary_arcs == t.arcs);
          CHECK(d.wall_edges == t.edges);
          CHECK(d.edges_assigned == d.wall_edges);
          CHECK(d.even_degree);
          CHECK(d.crossing % 2 == 0);
          // wall weight x = e^{-2K} per dual edge
          CHECK(l.energy() == doctest::Approx(-K * (total_bonds(W, N) - 2 * d.wall_edges)));
          ++checked;
        }
      }
  CHECK(checked == 300);
}

TEST_CASE("samplers against exact enumeration") {
  const int W = 4, N = 4;
  for (double K : {0.0, kIsingKc}) {
    auto ex = exact_enumeration(W, N, K);
    double psum = 0;
    for (auto [e, p] : ex.energy_distribution) psum += p;
    CHECK(psum == doctest::Approx(1.0));
    for (auto alg : {Algorithm::wolff, Algorithm::metropolis}) {
      CAPTURE(K);
      CAPTURE(int(alg));
      SpinLattice l(W, N, K, 99);
      sweep(l, alg, 200);
      std::vector<double> e, p, k, low;
      const double e_low = ex.energy_distribution.begin()->first;
      for (int t = 0; t < 60000; ++t) {
        sweep(l, alg, 1);
        auto d = decompose_walls(l);
        e.push_back(l.energy());
        p.push_back(d.crossing > 0);
        k.push_back(d.crossing);
        low.push_back(l.energy() == e_low);
      }
      auto [me, se] = mean_err(e);
      auto [mp, sp] = mean_err(p);
      auto [mk, sk] = mean_err(k);
      auto [ml, sl] = mean_err(low);
      CHECK(std::abs(me - ex.mean_energy) < 4 * se + 1e-12);
      CHECK(std::abs(mp - ex.p_cross) < 4 * sp);
      CHECK(std::abs(mk - ex.mean_k) < 4 * sk);
      CHECK(std::abs(ml - ex.energy_distribution.begin()->second) < 4 * sl + 1e-12);
    }
  }
}

TEST_CASE("zero and strong coupling") {
  SpinLattice l(12, 12, 0.0, 3);
  std::vector<double> m, c;
  for (int t = 0; t < 4000; ++t) {
    sweep(l, Algorithm::wolff, 1);
    m.push_back(l.magnetization());
    c.push_back(1 - 2.0 * l.bonds_unequal() / total_bonds(12, 12));
  }
  auto [mm, sm] = mean_err(m);
  auto [mc, sc] = mean_err(c);
  CHECK(std::abs(mm) < 4 * sm);
  CHECK(std::abs(mc) < 4 * sc);

  SpinLattice cold(12, 12, 1.5, 4);
  sweep(cold, Algorithm::wolff, 50);
  CHECK(std::abs(cold.magnetization()) > 0.99);
  McOptions o;
  o.sweeps = 400;
  o.seed = 8;
  auto r = crossing_probability_mc(2.0, 12, 1.5, o);
  CHECK(r.p_cross.value == 0.0);
}

TEST_CASE("percolation calibrates the aspect ratio") {
  McOptions o;
  o.sweeps = 20000;
  o.seed = 12;
  for (double tau : {1.0, 2.0}) {
    auto r = crossing_probability_mc(tau, 16, 0.0, o);
    double exact = crossing_probability_percolation(r.tau);
    CAPTURE(tau);
    CHECK(std::abs(r.p_cross.value - exact) < 3 * r.p_cross.stderr);
    // without the half-row margin the aspect ratio is off by a row
    double bare = crossing_probability_percolation(aspect_ratio(r.W, 16, 0.0));
    CHECK(std::abs(r.p_cross.value - bare) > 3 * r.p_cross.stderr);
  }
}

TEST_CASE("seed determinism and chains") {
  McOptions o;
  o.sweeps = 64;
  o.seed = 77;
  o.chains = 2;
  auto a = crossing_probability_mc(3.0, 8, kIsingKc, o);
  o.jobs = 2;
  auto b = crossing_probability_mc(3.0, 8, kIsingKc, o);
  CHECK(a.k_series == b.k_series);
  CHECK(a.k_series.size() == 128);
  o.seed = 78;
  auto c = crossing_probability_mc(3.0, 8, kIsingKc, o);
  CHECK(a.k_series != c.k_series);
  long total = 0;
  for (auto [k, n] : a.k_histogram) total += n;
  CHECK(total == 128);
}

TEST_CASE("autocorrelation flag") {
  McOptions o;
  o.sweeps = 64;
  o.thermalization = 0;
  o.algorithm = Algorithm::metropolis;
  o.seed = 4;
  auto r = crossing_probability_mc(10.0, 16, kIsingKc, o);
  CHECK(r.mean_k.undersampled);
  o.sweeps = 20000;
  auto iid = crossing_probability_mc(10.0, 8, 0.0, o);
  CHECK_FALSE(iid.mean_k.undersampled);
}

TEST_CASE("critical point locator diagnostics") {
  McOptions o;
  o.sweeps = 64;
  CHECK_THROWS_AS(critical_point_locator(1.0, {8, 12}, {0.2, 0.3}, o), std::invalid_argument);
  CHECK_THROWS_AS(critical_point_locator(1.0, {8, 12, 16}, {0.3, 0.2}, o), std::invalid_argument);
  auto cp = critical_point_locator(1.0, {6, 8, 10}, {0.8, 0.9}, o);
  CHECK_FALSE(cp.found);
  // a wide grid around K_c: the curves cross, and the error on P carries the K_c uncertainty
  o.sweeps = 2000;
  cp = critical_point_locator(2 / std::sqrt(3.0), {8, 12, 16}, {0.22, 0.25, 0.28, 0.31}, o);
  REQUIRE(cp.found);
  CHECK(cp.K_c > 0.22);
  CHECK(cp.K_c < 0.31);
  CHECK(cp.p_slope < 0);
  CHECK(cp.p_error == doctest::Approx(std::hypot(cp.p_stat_error, cp.p_slope * cp.error)));
  CHECK(cp.p_error > cp.p_stat_error);
}

TEST_CASE("percolation crossing density") {
  // the percolation density per unit length is sqrt(3)/2
  McOptions o;
  o.seed = 3;
  auto fit = crossing_density_extrapolated(6.0, {8, 16, 24}, 0.0, {6000, 3000, 2000}, o);
  CHECK(fit.runs.size() == 3);
  CAPTURE(fit.density);
  CAPTURE(fit.error);
  CHECK(std::abs(fit.density - std::sqrt(3.0) / 2) < 4 * fit.error);
}
