#include <cmath>
#include <stdexcept>

#include "loopbc/cft.hpp"
#include "loopbc/transfer.hpp"

namespace loopbc {

namespace {

double leading(int n, const TransferParams& p, const BoundarySpec& l, const BoundarySpec& r, const Sector& s) {
  auto e = leading_eigenvalue(build_transfer(n, p, l, r, s), 1e-13, 500);
  if (!e.converged) throw std::runtime_error("eigensolver did not converge at width " + std::to_string(n));
  return e.value;
}

}  // namespace

TwoBoundaryPoint two_boundary_point(double n, double r1, double r2, double r12, const std::vector<int>& widths) {
  const auto cg = CoulombParams::from_n(n).with_r(r1, r2, r12);
  TwoBoundaryPoint pt{r1, r2, r12, cg.n1, cg.n2, cg.n12, 0, 0, 0, 0, 0};
  TransferParams p;
  p.n = n;
  p.n12 = cg.n12;
  auto run = ceff_scan(p, BoundarySpec::as_point(n, cg.n1, AsBranch::unblob),
                       BoundarySpec::as_point(n, cg.n2, AsBranch::unblob), widths);
  pt.ceff = run.fit.value;
  pt.ceff_error = run.fit.error;
  pt.h0 = (cg.c - pt.ceff) / 24;
  pt.zeta = zeta_from_h0(pt.h0, cg.g);
  // d zeta / d h0 = 2 g / ((g-1)^2 zeta)
  pt.zeta_error = 2 * cg.g / ((cg.g - 1) * (cg.g - 1) * pt.zeta) * pt.ceff_error / 24;
  return pt;
}

std::vector<TwoBoundaryPoint> two_boundary_scan(double n, const std::vector<double>& r1_grid,
                                                const std::vector<double>& r12_grid, double r2,
                                                const std::vector<int>& widths) {
  std::vector<TwoBoundaryPoint> out;
  for (double r1 : r1_grid)
    for (double r12 : r12_grid) out.push_back(two_boundary_point(n, r1, r2, r12, widths));
  return out;
}

CrossoverFit crossover_exponent_fit(double n, const std::vector<int>& widths, double h) {
  if (widths.size() < 3) throw std::invalid_argument("the crossover fit needs at least three widths");
  const auto hp = honeycomb_points(n);
  TransferParams p;
  p.n = n;
  const auto right = BoundarySpec::ordinary(hp.x_c);
  const double w_sp = hp.y_S * hp.y_S / (hp.x_c * hp.x_c);  // per-contact weight of the special wall
  CrossoverFit fit;
  fit.widths = widths;
  for (int N : widths) {
    auto G = [&](double y) {
      auto l = BoundarySpec::ordinary(y);
      return N * std::log(leading(N, p, l, right, {0}) / leading(N, p, l, right, {1}));
    };
    auto D = [&](double d) {
      auto l = BoundarySpec::anisotropic(w_sp + d / 2, w_sp - d / 2, n / 2);
      return N * std::log(leading(N, p, l, right, {1, Mark::unblob}) / leading(N, p, l, right, {1, Mark::blob}));
    };
    fit.dG_dy.push_back((G(hp.y_S + h) - G(hp.y_S - h)) / (2 * h));
    fit.dD_ddelta.push_back((D(h) - D(-h)) / (2 * h));
  }
  std::vector<double> inv_mid;
  for (std::size_t i = 1; i < widths.size(); ++i) {
    double l = std::log(double(widths[i]) / widths[i - 1]);
    fit.local_y.push_back(std::log(std::abs(fit.dG_dy[i] / fit.dG_dy[i - 1])) / l);
    fit.local_delta.push_back(std::log(std::abs(fit.dD_ddelta[i] / fit.dD_ddelta[i - 1])) / l);
    inv_mid.push_back(1 / std::sqrt(double(widths[i]) * widths[i - 1]));
  }
  // straight line through the last two slopes, evaluated at 1/N = 0
  auto extrapolate = [&](const std::vector<double>& s) {
    std::size_t k = s.size() - 1;
    double slope = (s[k] - s[k - 1]) / (inv_mid[k] - inv_mid[k - 1]);
    return s[k] - slope * inv_mid[k];
  };
  const double ry = fit.local_y.back(), rd = fit.local_delta.back();
  fit.y_y = extrapolate(fit.local_y);
  fit.y_delta = extrapolate(fit.local_delta);
  fit.phi = fit.y_y / fit.y_delta;
  fit.phi_raw = ry / rd;
  fit.y_y_error = std::abs(fit.y_y - ry);
  fit.y_delta_error = std::abs(fit.y_delta - rd);
  fit.phi_error = std::abs(fit.phi) * std::hypot(fit.y_y_error / fit.y_y, fit.y_delta_error / fit.y_delta);
  return fit;
}

}  // namespace loopbc
