#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "loopbc/cft.hpp"
#include "loopbc/tba.hpp"

namespace loopbc {

namespace {

// log(1 + e^{-e}) without overflow
double log1pe(double e) { return e > 0 ? std::log1p(std::exp(-e)) : -e + std::log1p(std::exp(e)); }

// h * sum_{k>=1} 1/(2 pi cosh(a + k h)): the trapezoid sum continued past a grid edge
double kernel_tail(double a, double h) {
  double acc = 0;
  for (int k = 1;; ++k) {
    double u = a + k * h;
    double t = h / (2 * M_PI * std::cosh(u));
    acc += t;
    if (u > 0 && t < 1e-20) break;
  }
  return acc;
}

// Trapezoid rule on the infinite lattice for (1/2pi) int dtheta' F(theta') / cosh(c - theta'),
// with F frozen at its edge values outside the grid.
Eigen::RowVectorXd kernel_row(const std::vector<double>& theta, double c, double h) {
  const auto n = Eigen::Index(theta.size());
  Eigen::RowVectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = h / (2 * M_PI * std::cosh(c - theta[i]));
  w(0) += kernel_tail(c - theta.front(), h);
  w(n - 1) += kernel_tail(theta.back() - c, h);
  return w;
}

}  // namespace

TbaSystem::TbaSystem(int m_, double spin_, double theta_max_, double dtheta_)
    : m(m_), spin(spin_), theta_max(theta_max_), dtheta(dtheta_) {
  if (m < 3) throw std::invalid_argument("m must be at least 3");
  int two_s = int(std::lround(2 * spin));
  if (std::abs(2 * spin - two_s) > 1e-12 || two_s < 1 || two_s > m - 2)
    throw std::invalid_argument("2S must be an integer in [1, m-2]");
  if (!(dtheta > 0) || !(theta_max > 0)) throw std::invalid_argument("bad rapidity grid");
  int half = int(std::lround(theta_max / dtheta));
  for (int i = -half; i <= half; ++i) theta.push_back(i * dtheta);
  eps.assign(nodes(), std::vector<double>(theta.size(), 0.0));
  for (std::size_t i = 0; i < theta.size(); ++i) eps[0][i] = std::exp(-theta[i]);
}

double kernel_normalization(double theta_max, double dtheta) {
  int half = int(std::lround(theta_max / dtheta));
  double s = 0;
  for (int i = -half; i <= half; ++i) s += (std::abs(i) == half ? 0.5 : 1.0) * dtheta / (2 * M_PI * std::cosh(i * dtheta));
  return s;
}

void solve(TbaSystem& s, double tol, int max_iter, double alpha) {
  const auto n = Eigen::Index(s.theta.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) K.row(i) = kernel_row(s.theta, s.theta[i], s.dtheta);
  const int J = s.nodes();
  std::vector<Eigen::VectorXd> e(J), L(J);
  Eigen::VectorXd drive(n);
  for (Eigen::Index i = 0; i < n; ++i) drive(i) = std::exp(-s.theta[i]);
  for (int j = 0; j < J; ++j) e[j] = Eigen::Map<Eigen::VectorXd>(s.eps[j].data(), n);
  s.converged = false;
  for (s.iterations = 1; s.iterations <= max_iter; ++s.iterations) {
    for (int j = 0; j < J; ++j) L[j] = e[j].unaryExpr([](double v) { return log1pe(v); });
    double change = 0;
    for (int j = 0; j < J; ++j) {
      Eigen::VectorXd src = Eigen::VectorXd::Zero(n);
      if (j > 0) src += L[j - 1];
      if (j + 1 < J) src += L[j + 1];
      Eigen::VectorXd rhs = -(K * src);
      if (j == 0) rhs += drive;
      Eigen::VectorXd next = (1 - alpha) * e[j] + alpha * rhs;
      // relative change where the driving term dominates
      change = std::max(change, ((next - e[j]).array().abs() / (1 + e[j].array().abs())).maxCoeff());
      e[j] = next;
    }
    s.residual = change;
    if (change < tol) {
      s.converged = true;
      break;
    }
  }
  s.iterations = std::min(s.iterations, max_iter);
  for (int j = 0; j < J; ++j) s.eps[j].assign(e[j].data(), e[j].data() + n);
}

double uv_plateau(int m, int j) {
  double r = std::sin(M_PI * (j + 1) / (m + 1)) / std::sin(M_PI / (m + 1));
  return r * r;
}

double ir_plateau(int m, int j) {
  double r = std::sin(M_PI * j / m) / std::sin(M_PI / m);
  return r * r;
}

PlateauCheck plateau_check(const TbaSystem& s) {
  PlateauCheck c;
  const int J = s.nodes();
  for (int j = 0; j < J; ++j) {
    c.x.push_back(std::exp(-s.eps[j].back()));
    c.y.push_back(std::exp(-s.eps[j].front()));
  }
  auto at = [&](const std::vector<double>& v, int j) { return j < 1 || j > J ? 0.0 : v[j - 1]; };
  for (int j = 1; j <= J; ++j) {
    c.closed_form_error = std::max(c.closed_form_error, std::abs(1 + at(c.x, j) - uv_plateau(s.m, j)));
    c.closed_form_error = std::max(c.closed_form_error, std::abs(1 + at(c.y, j) - ir_plateau(s.m, j)));
    double xj = at(c.x, j);
    c.recursion_error =
        std::max(c.recursion_error, std::abs(xj * xj - (1 + at(c.x, j - 1)) * (1 + at(c.x, j + 1))));
    if (j >= 2) {  // y_1 = 0 is imposed by the driving term
      double yj = at(c.y, j);
      c.recursion_error =
          std::max(c.recursion_error, std::abs(yj * yj - (1 + at(c.y, j - 1)) * (1 + at(c.y, j + 1))));
    }
  }
  return c;
}

namespace {

double free_energy_quadrature(const TbaSystem& s, double t, int stride) {
  const int j = int(std::lround(2 * s.spin)) - 1;
  std::vector<double> th, L;
  for (std::size_t i = 0; i < s.theta.size(); i += stride) {
    th.push_back(s.theta[i]);
    L.push_back(log1pe(s.eps[j][i]));
  }
  if ((s.theta.size() - 1) % stride != 0) throw std::logic_error("stride must divide the grid");
  auto w = kernel_row(th, t, s.dtheta * stride);
  double acc = 0;
  for (std::size_t i = 0; i < th.size(); ++i) acc += w(Eigen::Index(i)) * L[i];
  return -acc;
}

}  // namespace

double boundary_free_energy(const TbaSystem& s, double t) { return free_energy_quadrature(s, t, 1); }

std::vector<FlowPoint> boundary_flow(const TbaSystem& s, double t_min, double t_max, int steps) {
  std::vector<FlowPoint> out;
  const bool even = (s.theta.size() - 1) % 2 == 0;
  for (int k = 0; k <= steps; ++k) {
    double t = steps ? t_min + (t_max - t_min) * k / steps : t_min;
    double f = free_energy_quadrature(s, t, 1);
    double coarse = even ? free_energy_quadrature(s, t, 2) : f;
    out.push_back({t, f, std::abs(f - coarse)});
  }
  return out;
}

double flow_ratio_closed(int m, double spin) {
  double two_s = 2 * spin;
  return std::sin(M_PI * (two_s + 1) / (m + 1)) * std::sin(M_PI / m) /
         (std::sin(M_PI / (m + 1)) * std::sin(M_PI * two_s / m));
}

FlowRatio flow_ratio(const TbaSystem& s) {
  FlowRatio r;
  const int j = int(std::lround(2 * s.spin)) - 1;
  double x = std::exp(-s.eps[j].back()), y = std::exp(-s.eps[j].front());
  r.tba_numeric = std::sqrt((1 + x) / (1 + y));
  r.tba_closed = flow_ratio_closed(s.m, s.spin);
  auto p = CoulombParams::from_n(2 * std::cos(M_PI / s.m)).with_r(2 * s.spin);
  r.cft = gfactor(Boundary::as_blob, p) / gfactor(Boundary::ord, p);
  r.difference = std::abs(r.tba_numeric - r.cft);
  return r;
}

UvExponent uv_expansion_exponent(const TbaSystem& s, double t_lo, double t_hi) {
  if (t_hi > s.theta_max - 15) throw std::invalid_argument("fit window too close to the grid edge");
  const double f_uv = -0.5 * std::log(uv_plateau(s.m, int(std::lround(2 * s.spin))));
  auto fit = [&](double a, double b) {
    const int k = 40;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i <= k; ++i) {
      double t = a + (b - a) * i / k;
      double v = std::log(std::abs(boundary_free_energy(s, t) - f_uv));
      sx += t, sy += v, sxx += t * t, sxy += t * v;
    }
    double n = k + 1;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  UvExponent u;
  u.slope = fit(t_lo, t_hi);
  u.exponent = -u.slope;
  u.expected = 4.0 / (s.m + 1);
  u.h = 1 - u.exponent / 2;
  double mid = (t_lo + t_hi) / 2;
  u.window_drift = std::abs(fit(t_lo, mid) - fit(mid, t_hi));
  return u;
}

}  // namespace loopbc
