#pragma once
// Triangular-lattice Ising model on an annulus (periodic circumference, free top and
// bottom rows); domain walls on the dual honeycomb lattice and their crossings.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace loopbc {

// Row spacing of the unit triangular lattice; rows are sheared by half a site.
inline const double kRowSpacing = 0.8660254037844386;  // sqrt(3)/2
// Critical coupling: wall fugacity x = e^{-2K} equals 1/sqrt(3).
inline const double kIsingKc = 0.27465307216702745;  // ln(3)/4

// Physical height of N rows is (N - offset) * kRowSpacing. The default -1 puts each free
// edge half a row spacing outside the last row; calibrated on the percolation crossing formula.
inline constexpr double kDefaultHeightOffset = -1.0;

int circumference_for(double tau, int rows, double offset = kDefaultHeightOffset);
double aspect_ratio(int circumference, int rows, double offset = kDefaultHeightOffset);

enum class Algorithm { wolff, metropolis };
Algorithm parse_algorithm(const std::string& s);

struct SpinLattice {
  int W = 0;  // periodic direction
  int N = 0;  // rows between the free boundaries
  double K = 0;
  std::vector<std::int8_t> spin;  // site = r * W + i
  std::mt19937_64 rng;
  // Wolff clusters per sweep; 0 until tuned. Fixed afterwards, since a stopping rule that
  // depends on the flipped cluster sizes biases the sampled distribution.
  int clusters_per_sweep = 0;

  SpinLattice(int W, int N, double K, std::uint64_t seed);
  int sites() const { return W * N; }
  int site(int i, int r) const { return r * W + ((i % W) + W) % W; }
  // Up to six neighbours; rows outside [0, N) are absent.
  int neighbours(int s, int out[6]) const;
  double energy() const;  // -K sum over bonds of s_i s_j
  int bonds_unequal() const;
  double magnetization() const;
};

// One sweep is `sites` Metropolis attempts or clusters_per_sweep Wolff flips. At K = 0 both
// draw independent uniform spins. The first Wolff sweep tunes clusters_per_sweep.
void sweep(SpinLattice& lat, Algorithm algorithm, int count = 1);
// Sets clusters_per_sweep to sites / (mean cluster size) over `trial_sweeps` volume-sized sweeps.
void tune_wolff(SpinLattice& lat, int trial_sweeps = 20);

struct WallDecomposition {
  int closed_loops = 0;        // includes rings winding around the annulus
  int same_boundary_arcs = 0;
  int crossing = 0;            // walls joining the bottom row to the top row
  int wall_edges = 0;          // dual edges separating unequal spins
  int edges_assigned = 0;      // wall edges found in some curve (must equal wall_edges)
  bool even_degree = true;     // every triangle has 0 or 2 wall edges
};
WallDecomposition decompose_walls(const SpinLattice& lat);

struct McOptions {
  int sweeps = 10000;           // measured sweeps per chain
  double thermalization = 0.1;  // extra fraction of sweeps discarded first
  Algorithm algorithm = Algorithm::wolff;
  std::uint64_t seed = 1;
  int chains = 1;
  int jobs = 1;
  double height_offset = kDefaultHeightOffset;
};

struct McEstimate {
  double value = 0, stderr = 0;
  double tau_int = 0.5;     // integrated autocorrelation time from batch means
  long measurements = 0;
  bool undersampled = false;  // fewer than 100 autocorrelation times per batch setup
};

struct CrossingRun {
  int W = 0, N = 0;
  double K = 0, tau = 0;  // tau is the realized aspect ratio
  McEstimate p_cross;     // P(k >= 1)
  McEstimate mean_k;
  McEstimate density;     // mean_k / tau
  std::map<int, long> k_histogram;
  std::vector<int> k_series;  // chain-major measurement series
};

CrossingRun crossing_probability_mc(double tau, int N, double K, const McOptions& opt);
CrossingRun crossing_density_mc(double tau, int N, double K, const McOptions& opt);

// density_N = density + slope / N, weighted least squares over the sizes.
struct DensityExtrapolation {
  double density = 0, error = 0, slope = 0, chi2 = 0;
  std::vector<CrossingRun> runs;
};
DensityExtrapolation crossing_density_extrapolated(double tau, const std::vector<int>& sizes, double K,
                                                   const std::vector<int>& sweeps, const McOptions& opt);

struct CriticalPoint {
  double K_c = 0, error = 0;
  double analytic = kIsingKc;
  double p_at_crossing = 0;
  double p_stat_error = 0;  // from the curve errors at fixed K_c
  double p_slope = 0;       // dP/dK at K_c, averaged over sizes
  double p_error = 0;       // p_stat_error combined with p_slope * error
  bool found = false;
  std::vector<double> pair_crossings;  // between consecutive sizes
  std::vector<int> sizes;
  std::vector<double> K_grid;
  std::vector<std::vector<CrossingRun>> curves;  // [size][K]
};
CriticalPoint critical_point_locator(double tau, const std::vector<int>& sizes, const std::vector<double>& K_grid,
                                     const McOptions& opt);

// Exhaustive enumeration for small lattices (at most 20 sites).
struct ExactObservables {
  double mean_energy = 0, p_cross = 0, mean_k = 0, mean_abs_m = 0;
  std::map<double, double> energy_distribution;
};
ExactObservables exact_enumeration(int W, int N, double K);

}  // namespace loopbc
