#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "loopbc/transfer.hpp"

namespace loopbc {

EigenResult leading_eigenvalue(const LinearMap& op, std::size_t dim, double tol, int max_iter, int krylov) {
  const auto n = Eigen::Index(dim);
  const int m = int(std::min<std::size_t>(dim, std::size_t(krylov)));
  EigenResult r;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  Eigen::MatrixXd V(n, m + 1);
  int complex_restarts = 0;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    V.col(0) = v;
    int k = 0;
    for (; k < m; ++k) {
      Eigen::VectorXd w = op(V.col(k));
      for (int pass = 0; pass < 2; ++pass) {  // Gram-Schmidt with one reorthogonalisation
        Eigen::VectorXd h = V.leftCols(k + 1).transpose() * w;
        w.noalias() -= V.leftCols(k + 1) * h;
        H.col(k).head(k + 1) += h;
      }
      double beta = w.norm();
      H(k + 1, k) = beta;
      if (beta < 1e-14 * H.col(k).head(k + 1).norm()) {  // invariant subspace
        ++k;
        break;
      }
      V.col(k + 1) = w / beta;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(k, k));
    const auto& vals = es.eigenvalues();
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double ma = std::abs(vals[a]), mb = std::abs(vals[b]);
      if (ma != mb) return ma > mb;
      return vals[a].real() > vals[b].real();
    });
    std::complex<double> lead = vals[order[0]];
    r.complex_pair = std::abs(lead.imag()) > 1e-9 * std::abs(lead);
    r.second_modulus = k > 1 ? std::abs(vals[order[r.complex_pair && k > 2 ? 2 : 1]]) : 0.0;
    Eigen::VectorXcd y = es.eigenvectors().col(order[0]);
    Eigen::VectorXd yr = y.real();
    if (yr.norm() < 1e-8) yr = y.imag();
    v = V.leftCols(k) * yr;
    v /= v.norm();
    if (v.sum() < 0) v = -v;
    r.value = lead.real();
    Eigen::VectorXd tv = op(v);
    r.residual = (tv - r.value * v).norm() / std::abs(r.value);
    if (r.complex_pair) {
      if (++complex_restarts >= 3) break;  // a persistent pair is reported, not resolved
      v = V.leftCols(k) * (y.real() + y.imag());
      v /= v.norm();
      continue;
    }
    complex_restarts = 0;
    if (r.residual < tol) {
      r.converged = true;
      break;
    }
    // restart from the Ritz vector improved by one application
    v = tv / tv.norm();
  }
  r.iterations = std::min(r.iterations, max_iter);
  r.vector = v;
  return r;
}

EigenResult leading_eigenvalue(const TransferOperator& t, double tol, int max_iter) {
  return leading_eigenvalue([&t](const Eigen::VectorXd& x) { return t.apply(x); }, t.dimension(), tol, max_iter);
}

}  // namespace loopbc
