#include "loopbc/integrable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace loopbc {

PlaquetteWeights bulk_weights(const SpectralParams& p) {
  const double u = p.u, F = p.Phi;
  const double s2 = std::sin(2 * F), s3 = std::sin(3 * F);
  return {s2 * s3 + std::sin(u) * std::sin(3 * F - u),
          s2 * std::sin(3 * F - u),
          s2 * std::sin(u),
          std::sin(u) * std::sin(3 * F - u),
          std::sin(2 * F - u) * std::sin(3 * F - u),
          -std::sin(u) * std::sin(F - u)};
}

KMatrixWeights k_weights(const SpectralParams& p, KVariant v) {
  const double u = p.u, F = p.Phi, k = p.kappa;
  KMatrixWeights K;
  K.variant = v;
  switch (v) {
    case KVariant::BY1:
      K.beta = {std::sin(1.5 * F + u), std::sin(1.5 * F - u), 0.0};
      break;
    case KVariant::BY2:
      K.beta = {std::cos(1.5 * F + u), std::cos(1.5 * F - u), 0.0};
      break;
    case KVariant::BLOB1:
      K.beta = {std::sin((2 * k + 0.5) * F - u) * std::sin((2 * k - 0.5) * F + u),
                std::sin((2 * k + 0.5) * F - u) * std::sin((2 * k - 0.5) * F - u),
                std::sin(2 * u) * std::sin(4 * k * F)};
      break;
    case KVariant::BLOB2:
      K.beta = {std::cos((2 * k + 0.5) * F - u) * std::cos((2 * k - 0.5) * F + u),
                std::cos((2 * k + 0.5) * F - u) * std::cos((2 * k - 0.5) * F - u),
                -std::sin(2 * u) * std::sin(4 * k * F)};
      break;
  }
  return K;
}

KVariant parse_variant(const std::string& s) {
  if (s == "BY1") return KVariant::BY1;
  if (s == "BY2") return KVariant::BY2;
  if (s == "BLOB1") return KVariant::BLOB1;
  if (s == "BLOB2") return KVariant::BLOB2;
  throw std::invalid_argument("unknown K-matrix variant " + s);
}

std::string to_string(KVariant v) {
  switch (v) {
    case KVariant::BY1: return "BY1";
    case KVariant::BY2: return "BY2";
    case KVariant::BLOB1: return "BLOB1";
    default: return "BLOB2";
  }
}

double phi_from_n(double n, bool dilute) {
  if (n > 2 || n <= -2) throw std::domain_error("loop weight outside (-2, 2]");
  double r = std::sqrt(2 - n);
  return std::acos(std::sqrt(dilute ? 2 + r : 2 - r) / 2);
}

double loop_weight_from_phi(double Phi) { return -2 * std::cos(4 * Phi); }

double n1_from_kappa(double kappa, double Phi) {
  double d = std::sin(4 * kappa * Phi);
  if (std::abs(d) < 1e-14) throw std::domain_error("sin 4 kappa Phi vanishes");
  return -std::sin(4 * (kappa - 1) * Phi) / d;
}

double kappa_from_n1(double n1, double Phi) {
  // n1 = n/2 + sin 4Phi cot 4 kappa Phi
  double s = std::sin(4 * Phi);
  if (std::abs(s) < 1e-14) throw std::domain_error("sin 4Phi vanishes");
  double n = loop_weight_from_phi(Phi);
  return std::atan2(s, n1 - n / 2) / (4 * Phi);
}

// ---------------------------------------------------------------- Element

void Element::add(const Diagram& d, double c) {
  if (c == 0) return;
  auto key = d.key();
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    Diagram shape = d;
    shape.weight = WeightPolynomial(Rational(1));
    terms_.emplace(std::move(key), std::make_pair(std::move(shape), c));
  } else {
    it->second.second += c;
  }
}

Element Element::operator*(const Element& upper) const {
  Element out(strands_, w_);
  const auto table = loop_weight_table(w_);
  const int n = strands_;
  for (const auto& [ka, ta] : terms_) {
    const Diagram& a = ta.first;
    for (const auto& [kb, tb] : upper.terms_) {
      const Diagram& b = tb.first;
      bool match = true;
      for (int i = 0; i < n && match; ++i) match = (a.link[n + i] >= 0) == (b.link[i] >= 0);
      if (!match) continue;
      Composition c = compose_shapes(a, b);
      if (c.zero) continue;
      double coef = ta.second * tb.second;
      for (int k = 0; k < 9; ++k)
        for (int j = 0; j < c.loops[k]; ++j) coef *= table[k];
      out.add(c.diagram, coef);
    }
  }
  return out;
}

Element Element::operator+(const Element& o) const {
  Element out = *this;
  for (const auto& [k, t] : o.terms_) out.add(t.first, t.second);
  return out;
}

Element Element::scaled(double c) const {
  Element out = *this;
  for (auto& [k, t] : out.terms_) t.second *= c;
  return out;
}

double Element::coefficient(const Diagram& shape) const {
  auto it = terms_.find(shape.key());
  return it == terms_.end() ? 0.0 : it->second.second;
}

double Element::max_abs_difference(const Element& o) const {
  double m = 0;
  for (const auto& [k, t] : terms_) m = std::max(m, std::abs(t.second - o.coefficient(t.first)));
  for (const auto& [k, t] : o.terms_) m = std::max(m, std::abs(t.second - coefficient(t.first)));
  return m;
}

double Element::max_abs() const {
  double m = 0;
  for (const auto& [k, t] : terms_) m = std::max(m, std::abs(t.second));
  return m;
}

Element identity_element(int strands, const LoopWeights& w) {
  Element e(strands, w);
  for (std::uint32_t occ = 0; occ < (1u << strands); ++occ) e.add(diagrams::identity(strands, occ), 1.0);
  return e;
}

Element r_element(int strands, int i, const PlaquetteWeights& om, const LoopWeights& w) {
  Element e(strands, w);
  const int n = strands, a = i, b = i + 1, ta = n + i, tb = n + i + 1;
  const std::uint32_t mask = 3u << i;
  for (std::uint32_t occ = 0; occ < (1u << n); ++occ) {
    if (occ & mask) continue;
    Diagram base = diagrams::identity(n, occ);
    auto piece = [&](double c, auto&& build) {
      Diagram d = base;
      build(d);
      e.add(d, c);
    };
    piece(om[0], [](Diagram&) {});
    piece(om[1], [&](Diagram& d) { d.connect(a, ta); });
    piece(om[1], [&](Diagram& d) { d.connect(b, tb); });
    piece(om[2], [&](Diagram& d) { d.connect(a, b); });
    piece(om[2], [&](Diagram& d) { d.connect(ta, tb); });
    piece(om[3], [&](Diagram& d) { d.connect(a, tb); });
    piece(om[3], [&](Diagram& d) { d.connect(b, ta); });
    piece(om[4], [&](Diagram& d) { d.connect(a, ta), d.connect(b, tb); });
    piece(om[5], [&](Diagram& d) { d.connect(a, b), d.connect(ta, tb); });
  }
  return e;
}

Element k_element(int strands, const std::array<double, 3>& beta, const LoopWeights& w) {
  Element e(strands, w);
  for (std::uint32_t occ = 0; occ < (1u << strands); ++occ) {
    Diagram d = diagrams::identity(strands, occ);
    if (!(occ & 1)) {
      e.add(d, beta[0]);
      continue;
    }
    e.add(d, beta[1]);
    d.left[0] = Mark::blob;
    e.add(d, beta[2]);
  }
  return e;
}

Element close_left(const Element& e) {
  const int n = e.strands();
  if (n < 2) throw std::invalid_argument("close_left needs at least two strands");
  Element out(n - 1, e.weights());
  const auto table = loop_weight_table(e.weights());
  auto image = [n](int p) { return p < n ? p - 1 : p - 2; };
  for (const auto& [k, t] : e.terms()) {
    const Diagram& d = t.first;
    if ((d.link[0] >= 0) != (d.link[n] >= 0)) continue;
    Diagram r(n - 1);
    double coef = t.second;
    bool zero = false;
    if (d.link[0] == n) coef *= table[loop_kind(d.left[0], d.right[0])];
    for (int p = 1; p < 2 * n; ++p) {
      if (p == n || d.link[p] < 0 || r.link[image(p)] >= 0) continue;
      Mark l = d.left[std::min<int>(p, d.link[p])], rm = d.right[std::min<int>(p, d.link[p])];
      int q = d.link[p];
      while (q == 0 || q == n) {
        int other = q == 0 ? n : 0;
        int next = d.link[other];
        auto cl = combine(l, d.left[std::min(other, next)]);
        auto cr = combine(rm, d.right[std::min(other, next)]);
        if (!cl || !cr) zero = true;
        else l = *cl, rm = *cr;
        q = next;
      }
      r.connect(image(p), image(q), l, rm);
    }
    if (!zero) out.add(r, coef);
  }
  return out;
}

Element r_operator(const SpectralParams& p, const LoopWeights& w) { return r_element(2, 0, bulk_weights(p), w); }

Element rotate_quarter(const Element& e) {
  if (e.strands() != 2) throw std::invalid_argument("rotation is defined on two strands");
  // points: 0 = SW, 1 = SE, 2 = NW, 3 = NE
  const int image[4] = {1, 3, 0, 2};
  Element out(2, e.weights());
  for (const auto& [k, t] : e.terms()) {
    const Diagram& d = t.first;
    Diagram r(2);
    for (int p = 0; p < 4; ++p)
      if (d.link[p] > p) r.connect(image[p], image[d.link[p]]);
    out.add(r, t.second);
  }
  return out;
}

namespace {

LoopWeights plain_weights(double Phi) {
  double n = loop_weight_from_phi(Phi);
  return {n, n, n, n};
}

LoopWeights blob_weights(const SpectralParams& p, KVariant v) {
  double n = loop_weight_from_phi(p.Phi);
  LoopWeights w{n, n, n, n};
  if (v == KVariant::BLOB1 || v == KVariant::BLOB2) w.n1 = w.n12 = n1_from_kappa(p.kappa, p.Phi);
  return w;
}

double relative(const Element& lhs, const Element& rhs) {
  double scale = std::max({lhs.max_abs(), rhs.max_abs(), std::numeric_limits<double>::min()});
  return lhs.max_abs_difference(rhs) / scale;
}

}  // namespace

double ybe_residual(double Phi, double u, double v, double omega6_shift) {
  LoopWeights w = plain_weights(Phi);
  auto R = [&](int i, double s) {
    PlaquetteWeights om = bulk_weights({s, Phi, 0});
    om[5] += omega6_shift;
    return r_element(3, i, om, w);
  };
  Element lhs = R(0, u) * R(1, u + v) * R(0, v);
  Element rhs = R(1, v) * R(0, u + v) * R(1, u);
  return relative(lhs, rhs);
}

double reflection_residual(const SpectralParams& p, double u, double v, KVariant variant) {
  LoopWeights w = blob_weights(p, variant);
  auto K = [&](double s) {
    SpectralParams q = p;
    q.u = s;
    return k_element(2, k_weights(q, variant).beta, w);
  };
  auto R = [&](double s) { return r_element(2, 0, bulk_weights({s, p.Phi, 0}), w); };
  Element lhs = R(u - v) * K(u) * R(u + v) * K(v);
  Element rhs = K(v) * R(u + v) * K(u) * R(u - v);
  return relative(lhs, rhs);
}

double boundary_crossing_residual(const SpectralParams& p, KVariant variant) {
  LoopWeights w = blob_weights(p, variant);
  SpectralParams crossed = p;
  crossed.u = 3 * p.Phi - p.u;
  Element K = k_element(2, k_weights(crossed, variant).beta, w);
  Element R = r_element(2, 0, bulk_weights({2 * p.u, p.Phi, 0}), w);
  Element c = close_left(K * R);
  Diagram empty = diagrams::identity(1, 0), full = diagrams::identity(1, 1), blob = full;
  blob.left[0] = Mark::blob;
  const std::array<double, 3> got{c.coefficient(empty), c.coefficient(full), c.coefficient(blob)};
  const auto want = k_weights(p, variant).beta;
  // best scalar in the least-squares sense
  double num = 0, den = 0, scale = 0;
  for (int k = 0; k < 3; ++k) num += got[k] * want[k], den += want[k] * want[k], scale = std::max(scale, std::abs(got[k]));
  if (den < 1e-28) throw std::domain_error("K(u) vanishes; proportionality undefined");
  double lam = num / den, res = 0;
  for (int k = 0; k < 3; ++k) res = std::max(res, std::abs(got[k] - lam * want[k]));
  return scale > 0 ? res / scale : 0.0;
}

HoneycombPoints honeycomb_points(double n) {
  if (n > 2) throw std::domain_error("loop weight above 2");
  double r = std::sqrt(2 - n);
  HoneycombPoints h;
  h.x_c = 1 / std::sqrt(2 + r);
  h.x_0 = 1 / std::sqrt(2 - r);
  h.y_S_singular = r == 0;
  h.y_S = h.y_S_singular ? std::numeric_limits<double>::infinity() : std::pow(2 - n, -0.25);
  return h;
}

std::array<double, 2> as_point_weights_algebraic(double n, double n1, AsBranch branch) {
  double a = std::sqrt(2 - n);
  double root = std::sqrt(n1 * (n1 - n) + 1);
  double s = n1 - n / 2 + (branch == AsBranch::blob ? root : -root);
  return {1 + a / 2 + s / a, 1 + a / 2 - s / a};
}

AsWeights as_point_weights(double n, double n1, AsBranch branch) {
  if (n >= 2) throw std::domain_error("AS weights need n < 2");
  double F = phi_from_n(n, true);
  double k = kappa_from_n1(n1, F);
  double c = 2 * std::cos(F);
  AsWeights r;
  r.kappa = k;
  if (branch == AsBranch::blob) {
    r.w_blob = c * std::sin((2 * k + 1) * F) / std::sin(2 * k * F);
    r.w_unblob = c * std::sin((2 * k - 1) * F) / std::sin(2 * k * F);
  } else {
    r.w_blob = c * std::cos((2 * k + 1) * F) / std::cos(2 * k * F);
    r.w_unblob = c * std::cos((2 * k - 1) * F) / std::cos(2 * k * F);
  }
  auto alg = as_point_weights_algebraic(n, n1, branch);
  r.mismatch = std::max(std::abs(alg[0] - r.w_blob), std::abs(alg[1] - r.w_unblob));
  if (!(r.mismatch <= 1e-9 * (1 + std::abs(alg[0]) + std::abs(alg[1]))))
    throw std::logic_error("AS weight parameterizations disagree");
  return r;
}

std::array<double, 2> honeycomb_boundary_ratios(const SpectralParams& p, KVariant v) {
  SpectralParams q = p;
  q.u = p.Phi / 2;
  auto b = k_weights(q, v).beta;
  return {b[1] / b[0], (b[1] + b[2]) / b[0]};
}

}  // namespace loopbc
