#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "loopbc/transfer.hpp"

namespace loopbc {

ScalingFit extract_ceff(const std::vector<int>& widths, const std::vector<double>& f, double aspect, int terms) {
  if (widths.size() != f.size()) throw std::invalid_argument("widths and free energies differ in length");
  if (widths.size() < 3) throw std::invalid_argument("at least three widths are needed");
  for (std::size_t i = 1; i < widths.size(); ++i)
    if (widths[i] <= widths[i - 1]) throw std::invalid_argument("widths must increase");
  ScalingFit fit;
  fit.widths = widths;
  fit.f = f;
  fit.terms = std::clamp<int>(terms, 3, int(widths.size()));
  const int k = fit.terms;
  for (std::size_t end = k - 1; end < widths.size(); ++end) {
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd b(k);
    for (int r = 0; r < k; ++r) {
      double N = widths[end + 1 - k + r];
      for (int c = 0; c < k; ++c) A(r, c) = std::pow(N, -c);
      b(r) = f[end + 1 - k + r];
    }
    Eigen::VectorXd s = A.fullPivLu().solve(b);
    fit.window_end.push_back(widths[end]);
    fit.bulk.push_back(s(0));
    fit.surface.push_back(s(1));
    fit.estimates.push_back(-24 * s(2) / (M_PI * aspect));
  }
  const auto& e = fit.estimates;
  fit.value = e.back();
  fit.error = e.size() > 1 ? std::abs(e.back() - e[e.size() - 2]) : std::abs(e.back()) * 1e-3;
  for (std::size_t i = 2; i < e.size(); ++i)
    if ((e[i] - e[i - 1]) * (e[i - 1] - e[i - 2]) < 0) fit.monotone = false;
  return fit;
}

double zeta_from_h0(double h0, double g) {
  if (!(g > 0) || g == 1) throw std::domain_error("zeta needs g > 0, g != 1");
  double d = 1 + 4 * g * h0 / ((g - 1) * (g - 1));
  if (d < 0) throw std::domain_error("negative discriminant in zeta");
  return std::sqrt(d);
}

CeffRun ceff_scan(const TransferParams& p, const BoundarySpec& left, const BoundarySpec& right,
                  const std::vector<int>& widths, const Sector& sector, double aspect) {
  CeffRun run;
  run.widths = widths;
  for (int N : widths) {
    auto t = build_transfer(N, p, left, right, sector);
    auto e = leading_eigenvalue(t);
    if (!e.converged)
      throw std::runtime_error("eigensolver did not converge at width " + std::to_string(N) +
                               (e.complex_pair ? " (complex dominant pair)" : ""));
    run.lambda.push_back(e.value);
    run.f.push_back(free_energy_per_site(e.value, N));
  }
  run.fit = extract_ceff(widths, run.f, aspect);
  return run;
}

}  // namespace loopbc
