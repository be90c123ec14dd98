#pragma once
// Quantum dimensions and the Markov-trace decomposition into sector traces.

#include <cstdint>
#include <random>
#include <vector>

#include "loopbc/algebra.hpp"

namespace loopbc {

enum class DimensionFlavor { plain, blob, unblob, open };

// plain: sin((L+1)g)/sin g; blob: sin((r1+L)g)/sin(r1 g); unblob: sin((r1-L)g)/sin(r1 g);
// open: the unblob tower at r1 = 1, so D_1 = 0. Throws std::domain_error when the
// denominator vanishes.
double quantum_dimension(int L, double gamma, DimensionFlavor flavor, double r1 = 1.0);

// Chebyshev towers as exact polynomials: D_0 = 1, D_1 = d1, D_{L+1} = n D_L - D_{L-1}.
WeightPolynomial chebyshev(int L, const WeightPolynomial& d1);

// Sector coefficient in Tr = sum_s D_s tr_s for blobless and one-boundary modes.
WeightPolynomial markov_coefficient(const Sector& s, BoundaryMode mode);

// Tr d - sum_s D_s tr_s(d), exactly.
WeightPolynomial markov_defect(const Diagram& d, BoundaryMode mode, bool dilute);

// Every planar diagram of TL_N (dense), weight 1.
std::vector<Diagram> all_tl_diagrams(int n);

// Random word in the generators of the mode (e_i, blobs, dilute pieces).
Diagram random_word(int n, int length, BoundaryMode mode, bool dilute, std::mt19937_64& rng);

struct MarkovReport {
  int diagrams = 0;
  double max_residual = 0;  // max |LHS - RHS|
  double max_lhs = 0;
  // Two-boundary mode: sector coefficients found by least squares.
  std::vector<std::pair<Sector, double>> coefficients;
};

MarkovReport markov_identity_check(int n, int trials, std::uint64_t seed, BoundaryMode mode,
                                   const LoopWeights& w, bool dilute = false, int word_length = 0);

}  // namespace loopbc
