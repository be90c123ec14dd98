#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "loopbc/mc_ising.hpp"

namespace loopbc {

int circumference_for(double tau, int rows, double offset) {
  if (!(tau > 0) || rows < 2) throw std::invalid_argument("need tau > 0 and at least two rows");
  return std::max(3, int(std::lround(tau * (rows - offset) * kRowSpacing)));
}

double aspect_ratio(int circumference, int rows, double offset) {
  return circumference / ((rows - offset) * kRowSpacing);
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "wolff") return Algorithm::wolff;
  if (s == "metropolis") return Algorithm::metropolis;
  throw std::invalid_argument("unknown algorithm '" + s + "' (wolff, metropolis)");
}

SpinLattice::SpinLattice(int W_, int N_, double K_, std::uint64_t seed) : W(W_), N(N_), K(K_) {
  if (W < 3 || N < 1) throw std::invalid_argument("lattice needs W >= 3 and N >= 1");
  if (!std::isfinite(K)) throw std::invalid_argument("coupling must be finite");
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32)};
  rng.seed(seq);
  spin.resize(sites());
  for (auto& s : spin) s = (rng() & 1) ? 1 : -1;
}

int SpinLattice::neighbours(int s, int out[6]) const {
  const int i = s % W, r = s / W;
  int k = 0;
  out[k++] = site(i + 1, r);
  out[k++] = site(i - 1, r);
  if (r + 1 < N) {
    out[k++] = site(i, r + 1);
    out[k++] = site(i - 1, r + 1);
  }
  if (r > 0) {
    out[k++] = site(i, r - 1);
    out[k++] = site(i + 1, r - 1);
  }
  return k;
}

namespace {

// Each bond once: (i,r)-(i+1,r), (i,r)-(i,r+1), (i,r)-(i-1,r+1).
template <class F>
void for_each_bond(const SpinLattice& l, F f) {
  for (int r = 0; r < l.N; ++r)
    for (int i = 0; i < l.W; ++i) {
      int s = l.site(i, r);
      f(s, l.site(i + 1, r));
      if (r + 1 < l.N) {
        f(s, l.site(i, r + 1));
        f(s, l.site(i - 1, r + 1));
      }
    }
}

}  // namespace

double SpinLattice::energy() const {
  long sum = 0;
  for_each_bond(*this, [&](int a, int b) { sum += spin[a] * spin[b]; });
  return -K * double(sum);
}

int SpinLattice::bonds_unequal() const {
  int c = 0;
  for_each_bond(*this, [&](int a, int b) { c += spin[a] != spin[b]; });
  return c;
}

double SpinLattice::magnetization() const {
  long m = std::accumulate(spin.begin(), spin.end(), 0L);
  return double(m) / sites();
}

namespace {

// Flips one Wolff cluster grown from a random seed; returns its size.
long wolff_step(SpinLattice& lat, double p_add, std::vector<int>& stack) {
  std::uniform_int_distribution<int> pick(0, lat.sites() - 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int nb[6];
  int seed = pick(lat.rng);
  const std::int8_t s0 = lat.spin[seed];
  lat.spin[seed] = std::int8_t(-s0);
  stack.assign(1, seed);
  long size = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    int k = lat.neighbours(s, nb);
    for (int j = 0; j < k; ++j)
      if (lat.spin[nb[j]] == s0 && u01(lat.rng) < p_add) {
        lat.spin[nb[j]] = std::int8_t(-s0);
        stack.push_back(nb[j]);
        ++size;
      }
  }
  return size;
}

}  // namespace

void tune_wolff(SpinLattice& lat, int trial_sweeps) {
  const double p_add = 1 - std::exp(-2 * lat.K);
  std::vector<int> stack;
  long flipped = 0, clusters = 0;
  while (flipped < long(trial_sweeps) * lat.sites()) {
    flipped += wolff_step(lat, p_add, stack);
    ++clusters;
  }
  lat.clusters_per_sweep = std::max(1, int(std::lround(double(clusters) / trial_sweeps)));
}

void sweep(SpinLattice& lat, Algorithm algorithm, int count) {
  if (count < 1) throw std::invalid_argument("sweep count must be at least 1");
  if (lat.K == 0) {
    for (auto& s : lat.spin) s = (lat.rng() & 1) ? 1 : -1;
    return;
  }
  if (algorithm == Algorithm::metropolis) {
    std::uniform_int_distribution<int> pick(0, lat.sites() - 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int nb[6];
    for (int c = 0; c < count; ++c)
      for (int t = 0; t < lat.sites(); ++t) {
        int s = pick(lat.rng);
        int k = lat.neighbours(s, nb), h = 0;
        for (int j = 0; j < k; ++j) h += lat.spin[nb[j]];
        double dE = 2 * lat.K * lat.spin[s] * h;
        if (dE <= 0 || u01(lat.rng) < std::exp(-dE)) lat.spin[s] = std::int8_t(-lat.spin[s]);
      }
    return;
  }
  if (lat.clusters_per_sweep == 0) tune_wolff(lat);
  const double p_add = 1 - std::exp(-2 * lat.K);
  std::vector<int> stack;
  for (int c = 0; c < count; ++c)
    for (int t = 0; t < lat.clusters_per_sweep; ++t) wolff_step(lat, p_add, stack);
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

WallDecomposition decompose_walls(const SpinLattice& lat) {
  const int W = lat.W, N = lat.N, T = (N - 1) * W;
  // dual nodes: up triangles, down triangles, bottom stubs, top stubs
  auto up = [&](int i, int r) { return r * W + ((i % W) + W) % W; };
  auto down = [&](int i, int r) { return T + r * W + ((i % W) + W) % W; };
  const int bottom0 = 2 * T, top0 = 2 * T + W, nodes = 2 * T + 2 * W;
  UnionFind uf(nodes);
  std::vector<int> degree(nodes, 0);
  WallDecomposition d;
  auto wall = [&](int a, int b, int p, int q) {
    if (lat.spin[a] == lat.spin[b]) return;
    ++d.wall_edges;
    ++degree[p];
    ++degree[q];
    uf.unite(p, q);
  };
  for (int r = 0; r < N; ++r)
    for (int i = 0; i < W; ++i) {
      wall(lat.site(i, r), lat.site(i + 1, r), r + 1 < N ? up(i, r) : top0 + i, r > 0 ? down(i, r - 1) : bottom0 + i);
      if (r + 1 < N) {
        wall(lat.site(i, r), lat.site(i, r + 1), up(i, r), down(i - 1, r));
        wall(lat.site(i + 1, r), lat.site(i, r + 1), up(i, r), down(i, r));
      }
    }
  for (int v = 0; v < 2 * T; ++v) d.even_degree = d.even_degree && (degree[v] == 0 || degree[v] == 2);
  std::vector<int> bottom(nodes, 0), top(nodes, 0), edges(nodes, 0);
  for (int v = 0; v < nodes; ++v) {
    if (!degree[v]) continue;
    int root = uf.find(v);
    edges[root] += degree[v];
    if (v >= top0) ++top[root];
    else if (v >= bottom0) ++bottom[root];
  }
  for (int v = 0; v < nodes; ++v) {
    if (!edges[v]) continue;
    d.edges_assigned += edges[v] / 2;
    if (bottom[v] == 1 && top[v] == 1) ++d.crossing;
    else if (bottom[v] + top[v] == 0) ++d.closed_loops;
    else ++d.same_boundary_arcs;
  }
  return d;
}

namespace {

McEstimate batch_estimate(const std::vector<std::vector<double>>& chains) {
  McEstimate e;
  const int per_chain = 32;
  std::vector<double> means;
  double sum = 0, sum2 = 0;
  long n = 0, batch = 0;
  for (const auto& x : chains) {
    long b = long(x.size()) / per_chain;
    if (b < 1) throw std::invalid_argument("too few measurements for batch means");
    batch = b;
    for (int k = 0; k < per_chain; ++k) {
      double m = 0;
      for (long t = k * b; t < (k + 1) * b; ++t) m += x[t];
      means.push_back(m / b);
    }
    for (double v : x) sum += v, sum2 += v * v, ++n;
  }
  e.measurements = n;
  e.value = sum / n;
  double var = std::max(0.0, sum2 / n - e.value * e.value);
  double mb = std::accumulate(means.begin(), means.end(), 0.0) / means.size(), vb = 0;
  for (double m : means) vb += (m - mb) * (m - mb);
  vb /= (means.size() - 1);
  e.stderr = std::sqrt(std::max(vb / means.size(), var / n));
  e.tau_int = var > 0 ? std::max(0.5, 0.5 * batch * vb / var) : 0.5;
  e.undersampled = batch < 20 * e.tau_int;
  return e;
}

struct ChainResult {
  std::vector<int> k;
};

ChainResult run_chain(int W, int N, double K, const McOptions& opt, int chain) {
  std::seed_seq seq{std::uint32_t(opt.seed), std::uint32_t(opt.seed >> 32), std::uint32_t(chain), 0x5eedu};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  SpinLattice lat(W, N, K, (std::uint64_t(words[0]) << 32) | words[1]);
  int therm = int(std::ceil(opt.thermalization * opt.sweeps));
  if (therm > 0) sweep(lat, opt.algorithm, therm);
  ChainResult r;
  r.k.reserve(opt.sweeps);
  for (int t = 0; t < opt.sweeps; ++t) {
    sweep(lat, opt.algorithm, 1);
    r.k.push_back(decompose_walls(lat).crossing);
  }
  return r;
}

}  // namespace

CrossingRun crossing_probability_mc(double tau, int N, double K, const McOptions& opt) {
  if (opt.sweeps < 32 || opt.chains < 1) throw std::invalid_argument("need at least 32 sweeps and one chain");
  CrossingRun run;
  run.N = N;
  run.W = circumference_for(tau, N, opt.height_offset);
  run.K = K;
  run.tau = aspect_ratio(run.W, N, opt.height_offset);
  std::vector<ChainResult> res(opt.chains);
  const int jobs = std::max(1, std::min(opt.jobs, opt.chains));
  for (int base = 0; base < opt.chains; base += jobs) {
    std::vector<std::thread> pool;
    for (int c = base; c < std::min(opt.chains, base + jobs); ++c)
      pool.emplace_back([&, c] { res[c] = run_chain(run.W, N, K, opt, c); });
    for (auto& t : pool) t.join();
  }
  std::vector<std::vector<double>> any(opt.chains), k(opt.chains), dens(opt.chains);
  for (int c = 0; c < opt.chains; ++c)
    for (int v : res[c].k) {
      any[c].push_back(v > 0);
      k[c].push_back(v);
      dens[c].push_back(v / run.tau);
      ++run.k_histogram[v];
      run.k_series.push_back(v);
    }
  run.p_cross = batch_estimate(any);
  run.mean_k = batch_estimate(k);
  run.density = batch_estimate(dens);
  return run;
}

CrossingRun crossing_density_mc(double tau, int N, double K, const McOptions& opt) {
  return crossing_probability_mc(tau, N, K, opt);
}

DensityExtrapolation crossing_density_extrapolated(double tau, const std::vector<int>& sizes, double K,
                                                   const std::vector<int>& sweeps, const McOptions& opt) {
  if (sizes.size() < 2 || sweeps.size() != sizes.size())
    throw std::invalid_argument("need at least two sizes and one sweep count per size");
  DensityExtrapolation out;
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    McOptions o = opt;
    o.sweeps = sweeps[a];
    o.seed = opt.seed * 7919ULL + sizes[a];
    out.runs.push_back(crossing_density_mc(tau, sizes[a], K, o));
    const auto& d = out.runs.back().density;
    if (!(d.stderr > 0)) throw std::runtime_error("zero variance in the crossing density");
    double w = 1 / (d.stderr * d.stderr), x = 1.0 / sizes[a];
    sw += w, sx += w * x, sy += w * d.value, sxx += w * x * x, sxy += w * x * d.value;
  }
  double det = sw * sxx - sx * sx;
  out.density = (sxx * sy - sx * sxy) / det;
  out.slope = (sw * sxy - sx * sy) / det;
  out.error = std::sqrt(sxx / det);
  for (const auto& r : out.runs) {
    double res = (r.density.value - out.density - out.slope / r.N) / r.density.stderr;
    out.chi2 += res * res;
  }
  return out;
}

CriticalPoint critical_point_locator(double tau, const std::vector<int>& sizes, const std::vector<double>& K_grid,
                                     const McOptions& opt) {
  if (sizes.size() < 3) throw std::invalid_argument("the crossing analysis needs at least three sizes");
  if (K_grid.size() < 2 || !std::is_sorted(K_grid.begin(), K_grid.end()))
    throw std::invalid_argument("K grid must be increasing with at least two points");
  CriticalPoint cp;
  cp.sizes = sizes;
  cp.K_grid = K_grid;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    cp.curves.emplace_back();
    for (std::size_t b = 0; b < K_grid.size(); ++b) {
      McOptions o = opt;
      o.seed = opt.seed * 1000003ULL + a * 1009 + b;
      cp.curves.back().push_back(crossing_probability_mc(tau, sizes[a], K_grid[b], o));
    }
  }
  // P grows with N below K_c and shrinks above it: locate the sign change of P_{N'} - P_N
  std::vector<double> errs;
  for (std::size_t a = 0; a + 1 < sizes.size(); ++a) {
    const auto &lo = cp.curves[a], &hi = cp.curves[a + 1];
    for (std::size_t b = 0; b + 1 < K_grid.size(); ++b) {
      double d0 = hi[b].p_cross.value - lo[b].p_cross.value, d1 = hi[b + 1].p_cross.value - lo[b + 1].p_cross.value;
      if (d0 > 0 && d1 <= 0) {
        double t = d0 / (d0 - d1), dk = K_grid[b + 1] - K_grid[b];
        double s0 = std::hypot(hi[b].p_cross.stderr, lo[b].p_cross.stderr);
        double s1 = std::hypot(hi[b + 1].p_cross.stderr, lo[b + 1].p_cross.stderr);
        cp.pair_crossings.push_back(K_grid[b] + t * dk);
        errs.push_back(dk * std::hypot(s0, s1) / (d0 - d1));
        break;
      }
    }
  }
  cp.found = cp.pair_crossings.size() + 1 == sizes.size();
  if (!cp.found) return cp;
  double m = 0, e2 = 0;
  for (std::size_t i = 0; i < errs.size(); ++i) m += cp.pair_crossings[i], e2 += errs[i] * errs[i];
  cp.K_c = m / errs.size();
  double spread = 0;
  for (double k : cp.pair_crossings) spread += (k - cp.K_c) * (k - cp.K_c);
  cp.error = std::sqrt(e2 / (errs.size() * errs.size()) + spread / errs.size());
  // P interpolated to K_c on every curve
  double ps = 0, pe2 = 0, slope = 0;
  for (const auto& curve : cp.curves) {
    std::size_t b = 0;
    while (b + 2 < K_grid.size() && K_grid[b + 1] < cp.K_c) ++b;
    const double dk = K_grid[b + 1] - K_grid[b], t = (cp.K_c - K_grid[b]) / dk;
    ps += (1 - t) * curve[b].p_cross.value + t * curve[b + 1].p_cross.value;
    pe2 += std::pow((1 - t) * curve[b].p_cross.stderr, 2) + std::pow(t * curve[b + 1].p_cross.stderr, 2);
    slope += (curve[b + 1].p_cross.value - curve[b].p_cross.value) / dk;
  }
  const double curves = double(cp.curves.size());
  cp.p_at_crossing = ps / curves;
  cp.p_stat_error = std::sqrt(pe2) / curves;
  cp.p_slope = slope / curves;
  // K_c is itself uncertain and P varies steeply with K there
  cp.p_error = std::hypot(cp.p_stat_error, cp.p_slope * cp.error);
  return cp;
}

ExactObservables exact_enumeration(int W, int N, double K) {
  if (W * N > 20) throw std::invalid_argument("exact enumeration is limited to 20 sites");
  SpinLattice lat(W, N, K, 0);
  ExactObservables o;
  const long total = 1L << lat.sites();
  double z = 0;
  for (long c = 0; c < total; ++c) {
    for (int s = 0; s < lat.sites(); ++s) lat.spin[s] = (c >> s) & 1 ? 1 : -1;
    double e = lat.energy(), w = std::exp(-e);
    int k = decompose_walls(lat).crossing;
    z += w;
    o.mean_energy += w * e;
    o.p_cross += w * (k > 0);
    o.mean_k += w * k;
    o.mean_abs_m += w * std::abs(lat.magnetization());
    o.energy_distribution[e] += w;
  }
  o.mean_energy /= z;
  o.p_cross /= z;
  o.mean_k /= z;
  o.mean_abs_m /= z;
  for (auto& [e, w] : o.energy_distribution) w /= z;
  return o;
}

}  // namespace loopbc
