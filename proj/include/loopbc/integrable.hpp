#pragma once
// Integrable weights of the dilute loop model on the square lattice: the bulk
// R-matrix, boundary K-matrices, and their verification by contraction in the
// dilute blob algebra.

#include <array>
#include <map>
#include <string>

#include "loopbc/algebra.hpp"

namespace loopbc {

struct SpectralParams {
  double u = 0;
  double Phi = 0;    // n = -2 cos 4Phi
  double kappa = 0;  // blob K-matrices: n1 = -sin 4(kappa-1)Phi / sin 4 kappa Phi
};

// omega_1 .. omega_6 as omega[0..5].
using PlaquetteWeights = std::array<double, 6>;

enum class KVariant { BY1, BY2, BLOB1, BLOB2 };

struct KMatrixWeights {
  std::array<double, 3> beta{};  // empty, occupied, extra weight of the blob
  KVariant variant = KVariant::BY1;
};

PlaquetteWeights bulk_weights(const SpectralParams& p);
KMatrixWeights k_weights(const SpectralParams& p, KVariant v);
KVariant parse_variant(const std::string& s);
std::string to_string(KVariant v);

// Crossing parameter of the dilute (x = x_c) or dense (x = x_0) branch.
double phi_from_n(double n, bool dilute = true);
double loop_weight_from_phi(double Phi);
double n1_from_kappa(double kappa, double Phi);
// Exact inverse on the branch 0 < 4 kappa Phi < pi; throws std::domain_error
// when sin 4 kappa Phi would vanish.
double kappa_from_n1(double n1, double Phi);

// Sum of diagrams with real coefficients under numeric loop weights.
class Element {
 public:
  Element(int strands, const LoopWeights& w) : strands_(strands), w_(w) {}
  void add(const Diagram& d, double c);
  Element operator*(const Element& upper) const;  // *this acts first
  Element operator+(const Element& o) const;
  Element scaled(double c) const;
  double max_abs_difference(const Element& o) const;
  double max_abs() const;
  int strands() const { return strands_; }
  const LoopWeights& weights() const { return w_; }
  const std::map<std::string, std::pair<Diagram, double>>& terms() const { return terms_; }
  double coefficient(const Diagram& shape) const;

 private:
  int strands_;
  LoopWeights w_;
  std::map<std::string, std::pair<Diagram, double>> terms_;
};

// Dilute identity on all strands (sum over occupations).
Element identity_element(int strands, const LoopWeights& w);
// The nine plaquettes on strands (i, i+1), spectators summed over occupation.
Element r_element(int strands, int i, const PlaquetteWeights& om, const LoopWeights& w);
// beta1 on an empty strand 0, beta2 on an occupied one, beta3 with a blob.
Element k_element(int strands, const std::array<double, 3>& beta, const LoopWeights& w);

// Joins top 0 to bottom 0 of every diagram (partial trace over the leftmost
// strand); the result acts on the remaining strands.
Element close_left(const Element& e);

// The R-matrix on two strands.
Element r_operator(const SpectralParams& p, const LoopWeights& w);
// Quarter turn of a two-strand element: SW -> SE -> NE -> NW -> SW.
Element rotate_quarter(const Element& e);

// Max |LHS - RHS| over diagram coefficients, relative to the largest LHS
// coefficient when normalize is set.
double ybe_residual(double Phi, double u, double v, double omega6_shift = 0.0);
double reflection_residual(const SpectralParams& p, double u, double v, KVariant variant);
double boundary_crossing_residual(const SpectralParams& p, KVariant variant);

struct HoneycombPoints {
  double x_c, x_0, y_S;
  bool y_S_singular;
};
HoneycombPoints honeycomb_points(double n);

enum class AsBranch { blob, unblob };
struct AsWeights {
  double w_blob, w_unblob;
  double kappa;            // from the trigonometric form
  double mismatch;         // |algebraic - trigonometric|
};
// Throws std::logic_error if the two forms differ by more than 1e-9.
AsWeights as_point_weights(double n, double n1, AsBranch branch);
// Same weights from the closed algebraic form only.
std::array<double, 2> as_point_weights_algebraic(double n, double n1, AsBranch branch);
// Honeycomb boundary weights from K(Phi/2): {x w_unblob-like, x w_blob-like}
// ratios beta2/beta1 and (beta2+beta3)/beta1.
std::array<double, 2> honeycomb_boundary_ratios(const SpectralParams& p, KVariant v);

}  // namespace loopbc
