#pragma once
// Strip transfer matrices of the dilute loop model on the honeycomb lattice,
// leading eigenvalues, and finite-size scaling.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "loopbc/algebra.hpp"
#include "loopbc/integrable.hpp"
#include "loopbc/transfer_kernel.hpp"

namespace loopbc {

struct BoundarySpec {
  enum class Kind { ordinary, special, anisotropic, open, kmatrix };
  Kind kind = Kind::ordinary;
  double y = 0;                      // ordinary: boundary monomer fugacity
  double w_blob = 0, w_unblob = 0;   // anisotropic: weight per boundary contact
  double n1 = 0;                     // anisotropic: weight of a blobbed loop
  double nu = 1;                     // open: weight of a half-loop
  std::array<double, 3> beta{1, 0, 0};  // kmatrix: raw triple, marked if beta[2] != 0

  static BoundarySpec ordinary(double y);
  static BoundarySpec special(double n);  // y = y_S
  static BoundarySpec anisotropic(double w_blob, double w_unblob, double n1);
  static BoundarySpec as_point(double n, double n1, AsBranch branch);
  static BoundarySpec open(double nu);
  static BoundarySpec kmatrix(const std::array<double, 3>& beta, double n1);
  bool marked() const;
  std::string str() const;
};

struct TransferParams {
  double n = 1.4142135623730951;
  double x = 0;  // bulk monomer fugacity; 0 selects x_c(n)
  std::optional<PlaquetteWeights> bulk;  // replaces the honeycomb weights
  double n12 = 0;    // loops carrying marks from both walls
  double nu12 = 1;   // half-loops joining two open walls
  double wall_edge = -1;  // open walls: weight of the edge to the wall, < 0 means x

  double monomer() const;
};

// Local weights for the given boundaries; the honeycomb plaquette is
// (1, x, x^2, x^2, x^2, 0) and a K side is (1, x w_unblob, x (w_blob - w_unblob))
// or (1, y^2/x, 0).
LocalWeights<double> local_weights(const TransferParams& p, const BoundarySpec& left, const BoundarySpec& right);

struct KeyHash {
  std::size_t operator()(LinkPattern::Key k) const {
    auto lo = std::uint64_t(k), hi = std::uint64_t(k >> 64);
    return std::hash<std::uint64_t>()(lo ^ (hi * 0x9e3779b97f4a7c15ULL));
  }
};

// T = second layer * first layer, stored as one sparse factor per local
// operator over the basis reachable from the sector seed.
class TransferOperator {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  int width() const { return plan_.width; }
  const LayerPlan& plan() const { return plan_; }
  const Sector& sector() const { return sector_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<LinkPattern>& basis() const { return basis_; }
  std::optional<std::size_t> index_of(const LinkPattern& p) const;
  std::size_t seed_index() const { return seed_; }
  std::size_t nonzeros() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;

  friend TransferOperator build_transfer(int, const TransferParams&, const BoundarySpec&, const BoundarySpec&,
                                         const Sector&, bool);

 private:
  LayerPlan plan_;
  Sector sector_;
  std::vector<LinkPattern> basis_;
  std::unordered_map<LinkPattern::Key, std::size_t, KeyHash> index_;
  std::size_t seed_ = 0;
  std::vector<Sparse> factors_;  // applied in order
};

// Seed pattern of a sector: strings on the first L sites.
LinkPattern sector_seed(int n, const Sector& sector);

// Throws std::invalid_argument for inadmissible sectors or boundary pairs.
TransferOperator build_transfer(int n, const TransferParams& p, const BoundarySpec& left,
                                const BoundarySpec& right, const Sector& sector = {},
                                bool boundary_first = false);

struct EigenResult {
  double value = 0;
  Eigen::VectorXd vector;
  double residual = 0;       // |T v - value v| / |value|, v normalised
  double second_modulus = 0; // next Ritz value, for the gap
  bool complex_pair = false; // the dominant Ritz value is not real
  bool converged = false;
  int iterations = 0;
};

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Restarted Arnoldi for the eigenvalue of largest modulus, started from a
// fixed positive vector.
EigenResult leading_eigenvalue(const LinearMap& op, std::size_t dim, double tol = 1e-12, int max_iter = 200,
                               int krylov = 30);
EigenResult leading_eigenvalue(const TransferOperator& t, double tol = 1e-12, int max_iter = 200);

// Aspect factor of the diagonal-to-diagonal honeycomb strip: one step of T
// advances sqrt(3) in height while a strand occupies width 3/2.
inline constexpr double kHoneycombAspect = 1.1547005383792515;  // 2/sqrt(3)

// f_N = -log(Lambda) / N.
double free_energy_per_site(double lambda, int width);

struct ScalingFit {
  std::vector<int> widths;
  std::vector<double> f;
  int terms = 5;                  // A + B/N + C/N^2 + ... up to 1/N^(terms-1)
  std::vector<int> window_end;    // largest width of each fitting window
  std::vector<double> estimates;  // c_eff per window
  std::vector<double> bulk, surface;
  double value = 0;  // estimate from the widest window
  double error = 0;  // drift between the last two windows
  bool monotone = true;  // estimates drift in one direction
};

// Solves f_N = A + B/N - pi c aspect / (24 N^2) + D/N^3 + ... on windows of
// consecutive widths; fewer widths than terms lowers the order (minimum 3).
ScalingFit extract_ceff(const std::vector<int>& widths, const std::vector<double>& f,
                        double aspect = kHoneycombAspect, int terms = 5);

// Positive root of h0 = (zeta^2 - 1)(g-1)^2 / (4g).
double zeta_from_h0(double h0, double g);

struct CeffRun {
  std::vector<int> widths;
  std::vector<double> lambda, f;
  ScalingFit fit;
};
CeffRun ceff_scan(const TransferParams& p, const BoundarySpec& left, const BoundarySpec& right,
                  const std::vector<int>& widths, const Sector& sector = {}, double aspect = kHoneycombAspect);

struct TwoBoundaryPoint {
  double r1, r2, r12;
  double n1, n2, n12;
  double ceff, ceff_error;
  double h0, zeta, zeta_error;
};
// AS_unblob on both walls, loop weights from the Coulomb-gas parameterization.
TwoBoundaryPoint two_boundary_point(double n, double r1, double r2, double r12, const std::vector<int>& widths);
std::vector<TwoBoundaryPoint> two_boundary_scan(double n, const std::vector<double>& r1_grid,
                                                const std::vector<double>& r12_grid, double r2,
                                                const std::vector<int>& widths);

struct CrossoverFit {
  std::vector<int> widths;
  // dG/dy with G = N log(Lambda_0/Lambda_1) for an isotropic wall of fugacity y,
  // dD/dDelta with D = N log(Lambda_unblob/Lambda_blob) in the one-string sector
  // of the anisotropic wall w_blob = W + Delta/2, w_unblob = W - Delta/2, n1 = n/2;
  // both at the special point, per width
  std::vector<double> dG_dy, dD_ddelta;
  // log-slopes between consecutive widths
  std::vector<double> local_y, local_delta;
  double y_y = 0, y_delta = 0, phi = 0;  // slopes extrapolated linearly in 1/N
  double phi_raw = 0;                    // from the last pair of widths
  double y_y_error = 0, y_delta_error = 0, phi_error = 0;
};
// Scaling dimensions of the isotropic and anisotropic perturbations of the
// special point from derivative scaling; right wall ordinary at x_c.
CrossoverFit crossover_exponent_fit(double n, const std::vector<int>& widths, double h = 1e-4);

}  // namespace loopbc
