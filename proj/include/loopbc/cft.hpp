#pragma once
// Boundary CFT of the dilute O(n) model: Coulomb-gas parameters, Kac weights,
// characters, annulus partition functions in both channels, g-factors,
// fractal dimensions, crossing formulas.

#include <string>
#include <utility>
#include <vector>

#include "loopbc/algebra.hpp"

namespace loopbc {

struct CoulombParams {
  double n = 0, gamma = 0, g = 0, c = 0;
  bool dense = false;
  double r1 = 1, r2 = 1, r12 = 1;
  double n1 = 0, n2 = 0, n12 = 0;

  // n = 2 cos gamma; g = 1 + gamma/pi (dilute) or 1 - gamma/pi (dense).
  static CoulombParams from_n(double n, bool dense = false);
  CoulombParams with_r(double r1, double r2 = 1, double r12 = 1) const;
};

double central_charge(double g);
double kac_weight(double r, double s, double g);
// Dense branch: the dilute formula at g' = 1 - gamma/pi with (r, s) swapped or not.
double dense_kac_weight(double r, double s, double gprime, bool swapped);

// Blob loop weight sin((r+1)gamma)/sin(r gamma) and its inverse on (0, pi/gamma).
double blob_weight_from_r(double r, double gamma);
double r_from_blob_weight(double n1, double gamma);
double n12_from_r(double r1, double r2, double r12, double gamma);

// Open/open parameter map: nu12/sqrt(nu1 nu2) sqrt(n+2) = 2 cos(r12 gamma/2).
double r12_from_nu(double nu12, double nu1, double nu2, double gamma);
double nu12_from_r12(double r12, double nu1, double nu2, double gamma);
// r1 of the open wall, (pi/gamma - 1)/2.
double open_r1(double gamma);

// q^exponent * sum_k coeff[k] q^k. Omitted coefficients (k > order) are
// bounded by tail_scale * p(k), p the partition numbers.
struct QSeries {
  enum class Nome { q, q_tilde };  // e^{-pi tau} or e^{-2 pi / tau}
  Nome nome = Nome::q;
  double exponent = 0;
  std::vector<double> coeff;
  double tail_scale = 0;

  static QSeries monomial(double exponent, int order, double c = 1.0);
  static QSeries inverse_euler(int order);  // 1/P(q) = prod (1-q^k)^-1
  QSeries& operator*=(double s);
  QSeries operator*(const QSeries& o) const;  // truncated to the shorter order
  int order() const { return int(coeff.size()) - 1; }
  double evaluate(double q) const;
  // Bound on the omitted terms at |q| (coefficients assumed at most
  // partition-number growth).
  double tail_bound(double q) const;
};

// Sum of series with unrelated leading exponents: each monomial c q^e of a
// character numerator becomes c q^e / P(q) truncated at q-order base + order.
struct QSum {
  static constexpr double kOmittedWindow = 400;  // monomials kept for the tail bound
  std::vector<QSeries> terms;
  std::vector<std::pair<double, double>> omitted;  // (exponent, coefficient) above the cut
  double base = 0;
  int order = 0;

  static QSum from_monomials(std::vector<std::pair<double, double>> mono, int order);
  void add(const QSeries& s) { terms.push_back(s); }
  double evaluate(double q) const;
  double tail_bound(double q) const;
  double leading_exponent() const;
  // Merged coefficients on the grid exponent0 + k step; terms off the grid throw.
  std::vector<double> coefficients(double exponent0, int order, double step = 1.0) const;
};

enum class BcPair { ord_ord, sp_ord, as_blob_ord, as_unblob_ord, as_as, open_ord, open_open };
BcPair parse_pair(const std::string& s);
std::string to_string(BcPair p);

// Character of one sector (strings, marks) as q-series including 1/P(q),
// truncated at q-order M above its leading power. For as_as the marks are
// (left, right); open_open takes the string-free sector with r12 from params.
QSum character(BcPair pair, const Sector& sector, const CoulombParams& p, int order);

// Markov-trace weighted sum of characters truncated at q-order M above the
// lowest exponent.
QSum annulus_partition(BcPair pair, const CoulombParams& p, int order);

// Closed-channel evaluation: sqrt(2/g)/eta(2i/tau) sum_p sin(...) qt^(...),
// obtained by Poisson resummation; for ord_ord, sp_ord, as_blob_ord,
// as_unblob_ord and open_ord.
double annulus_closed_channel(BcPair pair, const CoulombParams& p, double tau);
// The printed modular-transform expressions, kept separately as an oracle.
double annulus_closed_channel_printed(BcPair pair, const CoulombParams& p, double tau);

enum class Boundary { ord, sp, as_blob, as_unblob, open };
Boundary parse_boundary(const std::string& s);
double gfactor(Boundary b, const CoulombParams& p);

struct GfactorCheck {
  double direct = 0, closed = 0, relative = 0;
  double tail_bound = 0;
  int order = 0;
  double long_cylinder_ratio = 0;  // Z / (g_a g_b qt^(-c/12)) at large tau
};
GfactorCheck gfactor_consistency(BcPair pair, const CoulombParams& p, double tau, int order = 200);

double dedekind_eta(double tau, int max_terms = 2000);  // eta(i tau)

double crossing_probability_percolation(double tau);
double crossing_probability_ising(double tau);             // eta ratio
double crossing_probability_ising_characters(double tau);  // character ratio
// Rocha-Caridi character chi_{r,s} of the minimal model with g = p/p'.
double rocha_caridi(int r, int s, int p, int pp, double q, int terms = 60);

double mean_crossings_per_length(const CoulombParams& p);

struct FractalDimensions {
  double ordinary, special, as_blob_loop, as_unblob_loop, bulk;
};
FractalDimensions fractal_dimensions(const CoulombParams& p);

struct Perturbation {
  std::string label;
  double r = 0, s = 0;
  double rg_eigenvalue = 0;  // 1 - h
};
// point: "ord" (anisotropic direction), "sp-anisotropic", "sp-isotropic", "as".
Perturbation perturbation_data(const std::string& point, const CoulombParams& p);
// (1 - h_{1,3}) / (1 - h_{3,3}).
double crossover_exponent(double g);

}  // namespace loopbc
