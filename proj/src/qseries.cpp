#include <cmath>
#include <limits>
#include <stdexcept>

#include "loopbc/cft.hpp"

namespace loopbc {

QSeries QSeries::monomial(double exponent, int order, double c) {
  QSeries s;
  s.exponent = exponent;
  s.coeff.assign(std::size_t(order) + 1, 0.0);
  s.coeff[0] = c;
  return s;
}

QSeries QSeries::inverse_euler(int order) {
  // partition numbers from the pentagonal recursion
  QSeries s;
  s.coeff.assign(std::size_t(order) + 1, 0.0);
  s.coeff[0] = 1;
  for (int k = 1; k <= order; ++k) {
    double acc = 0;
    for (int j = 1;; ++j) {
      int a = j * (3 * j - 1) / 2, b = j * (3 * j + 1) / 2;
      if (a > k) break;
      double sign = (j % 2) ? 1.0 : -1.0;
      acc += sign * s.coeff[k - a];
      if (b <= k) acc += sign * s.coeff[k - b];
    }
    s.coeff[k] = acc;
  }
  s.tail_scale = 1;
  return s;
}

QSeries& QSeries::operator*=(double s) {
  for (double& c : coeff) c *= s;
  tail_scale *= std::abs(s);
  return *this;
}

QSeries QSeries::operator*(const QSeries& o) const {
  if (tail_scale != 0 && o.tail_scale != 0)
    throw std::logic_error("the tail of a product of two infinite series is not tracked");
  QSeries r;
  r.nome = nome;
  r.exponent = exponent + o.exponent;
  int m = std::min(order(), o.order());
  r.coeff.assign(std::size_t(m) + 1, 0.0);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; i + j <= m; ++j) r.coeff[i + j] += coeff[i] * o.coeff[j];
  // a finite factor times p(k)-bounded coefficients stays p(k)-bounded up to the factor's l1 norm
  double l1a = 0, l1b = 0;
  for (double c : coeff) l1a += std::abs(c);
  for (double c : o.coeff) l1b += std::abs(c);
  r.tail_scale = tail_scale * l1b + o.tail_scale * l1a;
  return r;
}

double QSeries::evaluate(double q) const {
  double acc = 0;
  for (int k = order(); k >= 0; --k) acc = acc * q + coeff[k];
  return acc * std::pow(q, exponent);
}

double QSeries::tail_bound(double q) const {
  if (tail_scale == 0) return 0;
  q = std::abs(q);
  if (q >= 1) return std::numeric_limits<double>::infinity();
  // p(k) < exp(pi sqrt(2k/3))
  const double lq = std::log(q);
  double sum = 0, prev = 0;
  for (int k = order() + 1; k < order() + 200000; ++k) {
    double t = std::exp(M_PI * std::sqrt(2.0 * k / 3.0) + k * lq);
    sum += t;
    if (t < prev && t < 1e-30 * sum) break;
    prev = t;
  }
  return tail_scale * sum * std::pow(q, exponent);
}

namespace {

double inverse_euler_value(double q) {
  double p = 1;
  for (int k = 1; k < 100000; ++k) {
    double t = std::pow(q, k);
    p *= 1 - t;
    if (t < 1e-18) break;
  }
  return 1 / p;
}

}  // namespace

double QSum::evaluate(double q) const {
  double acc = 0;
  for (const auto& t : terms) acc += t.evaluate(q);
  return acc;
}

double QSum::tail_bound(double q) const {
  double b = 0;
  for (const auto& t : terms) b += t.tail_bound(q);
  if (!omitted.empty()) {
    double ip = inverse_euler_value(std::abs(q));
    for (const auto& [e, c] : omitted) b += std::abs(c) * std::pow(std::abs(q), e) * ip;
  }
  return b;
}

double QSum::leading_exponent() const {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) e = std::min(e, t.exponent);
  return e;
}

std::vector<double> QSum::coefficients(double exponent0, int order, double step) const {
  std::vector<double> out(std::size_t(order) + 1, 0.0);
  for (const auto& t : terms) {
    for (int k = 0; k <= t.order(); ++k) {
      if (t.coeff[k] == 0) continue;
      double pos = (t.exponent + k - exponent0) / step;
      double idx = std::round(pos);
      if (std::abs(pos - idx) > 1e-9) throw std::invalid_argument("series term off the requested exponent grid");
      if (idx < 0 || idx > order) continue;
      out[std::size_t(idx)] += t.coeff[k];
    }
  }
  return out;
}

QSum QSum::from_monomials(std::vector<std::pair<double, double>> mono, int order) {
  QSum s;
  double emin = std::numeric_limits<double>::infinity();
  for (const auto& [e, c] : mono)
    if (c != 0) emin = std::min(emin, e);
  s.base = emin;
  s.order = order;
  const QSeries ie = QSeries::inverse_euler(order);
  for (const auto& [e, c] : mono) {
    if (c == 0) continue;
    double room = emin + order - e;
    if (room < -1e-9) {
      if (room > -kOmittedWindow) s.omitted.emplace_back(e, c);
      continue;
    }
    int m = int(std::floor(room + 1e-9));
    QSeries t = QSeries::monomial(e, m, c) * ie;
    s.add(t);
  }
  return s;
}

}  // namespace loopbc
