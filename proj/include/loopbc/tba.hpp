#pragma once
// Massless boundary TBA for the O(n) model at n = 2 cos(pi/m): pseudo-energies,
// boundary free energy along the flow from AS_blob (r1 = 2S) to Ord.

#include <vector>

namespace loopbc {

struct TbaSystem {
  int m = 4;
  double spin = 0.5;        // impurity spin S, 1 <= 2S <= m-2
  double theta_max = 40;    // grid [-theta_max, theta_max]
  double dtheta = 0.05;
  std::vector<double> theta;
  std::vector<std::vector<double>> eps;  // eps[j-1][i], j = 1..m-2

  bool converged = false;
  int iterations = 0;
  double residual = 0;  // last sup-norm change

  TbaSystem(int m, double spin, double theta_max = 40, double dtheta = 0.05);
  int nodes() const { return m - 2; }
};

// Damped fixed-point iteration eps <- (1-alpha) eps + alpha RHS. Integrals
// beyond the grid use the edge values; the trapezoid sum runs over the whole lattice.
void solve(TbaSystem& s, double tol = 1e-13, int max_iter = 20000, double alpha = 0.5);

// Trapezoid sum of 1/(2 pi cosh) over the grid, which should be 1/2.
double kernel_normalization(double theta_max, double dtheta);

// 1 + x_j and 1 + y_j: the theta -> +inf and theta -> -inf plateaus.
double uv_plateau(int m, int j);
double ir_plateau(int m, int j);

struct PlateauCheck {
  std::vector<double> x, y;  // numerical, from the grid edges
  double closed_form_error = 0;  // max |1+x - uv_plateau|, |1+y - ir_plateau|
  double recursion_error = 0;    // max |x_j^2 - (1+x_{j-1})(1+x_{j+1})| and the y analogue
};
PlateauCheck plateau_check(const TbaSystem& s);

// f_boundary / T at log(T/T_K) = t.
double boundary_free_energy(const TbaSystem& s, double t);

struct FlowPoint {
  double log_t = 0, f = 0, error = 0;  // error from a coarser quadrature
};
std::vector<FlowPoint> boundary_flow(const TbaSystem& s, double t_min, double t_max, int steps);

struct FlowRatio {
  double tba_numeric = 0;  // sqrt((1+x_2S)/(1+y_2S)) from the solved plateaus
  double tba_closed = 0;   // sine form of the same ratio
  double cft = 0;          // g_ASblob / g_Ord at r1 = 2S, n = 2 cos(pi/m)
  double difference = 0;   // |tba_numeric - cft|
};
FlowRatio flow_ratio(const TbaSystem& s);
double flow_ratio_closed(int m, double spin);

struct UvExponent {
  double slope = 0;           // d log|f - f_UV| / d log(T/T_K), expected -4/(m+1)
  double exponent = 0;        // -slope
  double expected = 0;        // 4/(m+1)
  double h = 0;               // 1 - exponent/2, the perturbing operator's dimension
  double window_drift = 0;    // slope change between the two halves of the window
};
UvExponent uv_expansion_exponent(const TbaSystem& s, double t_lo = 12, double t_hi = 24);

}  // namespace loopbc
