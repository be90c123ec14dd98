#include "loopbc/markov.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace loopbc {

double quantum_dimension(int L, double gamma, DimensionFlavor flavor, double r1) {
  double num, den;
  switch (flavor) {
    case DimensionFlavor::plain:
      num = std::sin((L + 1) * gamma), den = std::sin(gamma);
      break;
    case DimensionFlavor::blob:
      num = std::sin((r1 + L) * gamma), den = std::sin(r1 * gamma);
      break;
    case DimensionFlavor::unblob:
      num = std::sin((r1 - L) * gamma), den = std::sin(r1 * gamma);
      break;
    default:
      num = std::sin((1 - L) * gamma), den = std::sin(gamma);
      break;
  }
  if (std::abs(den) < 1e-14) throw std::domain_error("quantum dimension: vanishing denominator");
  return num / den;
}

WeightPolynomial chebyshev(int L, const WeightPolynomial& d1) {
  WeightPolynomial a(Rational(1)), b = d1;
  if (L == 0) return a;
  for (int k = 1; k < L; ++k) {
    WeightPolynomial c = WeightPolynomial::n() * b - a;
    a = std::move(b);
    b = std::move(c);
  }
  return b;
}

WeightPolynomial markov_coefficient(const Sector& s, BoundaryMode mode) {
  using P = WeightPolynomial;
  if (mode == BoundaryMode::two_boundary)
    throw std::invalid_argument("two-boundary coefficients have no closed form here; use markov_identity_check");
  if (s.strings == 0) return P(Rational(1));
  if (mode == BoundaryMode::blobless) return chebyshev(s.strings, P::n());
  P d1 = s.left == Mark::blob ? P::n1() : P::n() - P::n1();
  return chebyshev(s.strings, d1);
}

WeightPolynomial markov_defect(const Diagram& d, BoundaryMode mode, bool dilute) {
  WeightPolynomial r = markov_trace(d);
  for (const Sector& s : sectors(d.size, mode, dilute)) r -= markov_coefficient(s, mode) * sector_trace(d, s, mode, dilute);
  return r;
}

std::vector<Diagram> all_tl_diagrams(int n) {
  std::vector<Diagram> out;
  // A planar matching of the 2n boundary points is an arc pattern on the
  // circle, read counter-clockwise from bottom-left.
  for (const LinkPattern& p : enumerate_basis(2 * n, Sector{}, BoundaryMode::blobless, false)) {
    Diagram d(n);
    auto point = [n](int k) { return k < n ? k : 3 * n - 1 - k; };
    for (int k = 0; k < 2 * n; ++k)
      if (p.link[k] > k) d.connect(point(k), point(p.link[k]));
    out.push_back(d);
  }
  return out;
}

namespace {

// 2-site dilute pieces, indexed by (bottom occupation, choice).
Diagram dilute_piece(int n, std::uint32_t occ, int i, int choice, std::uint32_t& new_occ) {
  std::uint32_t others = occ & ~(3u << i);
  Diagram d = diagrams::identity(n, others);
  bool a = occ >> i & 1, b = occ >> (i + 1) & 1;
  int t = n + i;
  new_occ = occ;
  if (a && b) {
    if (choice == 0) {
      d.connect(i, t), d.connect(i + 1, t + 1);
    } else if (choice == 1) {
      d.connect(i, i + 1);
      new_occ = others;
    } else {
      d.connect(i, i + 1), d.connect(t, t + 1);
    }
  } else if (!a && !b) {
    if (choice == 0) return d;
    d.connect(t, t + 1);
    new_occ = others | 3u << i;
  } else {
    int from = a ? i : i + 1;
    int to = choice == 0 ? from : (a ? i + 1 : i);
    d.connect(from, n + to);
    new_occ = others | 1u << to;
  }
  return d;
}

}  // namespace

Diagram random_word(int n, int length, BoundaryMode mode, bool dilute, std::mt19937_64& rng) {
  std::uint32_t occ = (1u << n) - 1;
  if (dilute) occ = std::uniform_int_distribution<std::uint32_t>(0, occ)(rng);
  Diagram w = diagrams::identity(n, occ);
  for (int k = 0; k < length; ++k) {
    int kind = std::uniform_int_distribution<int>(0, 9)(rng);
    Diagram g;
    if (kind == 0 && mode != BoundaryMode::blobless) {
      if (!(occ & 1)) continue;
      g = diagrams::identity(n, occ);
      g.left[0] = rng() & 1 ? Mark::blob : Mark::unblob;
    } else if (kind == 1 && mode == BoundaryMode::two_boundary) {
      if (!(occ >> (n - 1) & 1)) continue;
      g = diagrams::identity(n, occ);
      g.right[n - 1] = rng() & 1 ? Mark::blob : Mark::unblob;
    } else if (n >= 2) {
      int i = std::uniform_int_distribution<int>(0, n - 2)(rng);
      if (dilute) {
        std::uint32_t next;
        g = dilute_piece(n, occ, i, std::uniform_int_distribution<int>(0, 2)(rng) % 3, next);
        occ = next;
      } else {
        g = diagrams::e(n, i);
      }
    } else {
      continue;
    }
    w = compose(w, g);
  }
  return w;
}

MarkovReport markov_identity_check(int n, int trials, std::uint64_t seed, BoundaryMode mode,
                                   const LoopWeights& w, bool dilute, int word_length) {
  std::mt19937_64 rng(seed);
  if (word_length <= 0) word_length = 3 * n;
  MarkovReport rep;
  std::vector<Sector> secs = sectors(n, mode, dilute);
  Eigen::MatrixXd A(trials, secs.size());
  Eigen::VectorXd lhs(trials);
  for (int t = 0; t < trials; ++t) {
    Diagram d = random_word(n, word_length, mode, dilute, rng);
    lhs(t) = markov_trace(d).evaluate(w);
    for (std::size_t s = 0; s < secs.size(); ++s) A(t, s) = sector_trace(d, secs[s], mode, dilute).evaluate(w);
  }
  Eigen::VectorXd coef(secs.size());
  if (mode == BoundaryMode::two_boundary) {
    coef = A.colPivHouseholderQr().solve(lhs);
  } else {
    for (std::size_t s = 0; s < secs.size(); ++s) coef(s) = markov_coefficient(secs[s], mode).evaluate(w);
  }
  Eigen::VectorXd res = lhs - A * coef;
  rep.diagrams = trials;
  rep.max_residual = trials ? res.cwiseAbs().maxCoeff() : 0.0;
  rep.max_lhs = trials ? lhs.cwiseAbs().maxCoeff() : 0.0;
  for (std::size_t s = 0; s < secs.size(); ++s) rep.coefficients.push_back({secs[s], coef(s)});
  return rep;
}

}  // namespace loopbc
