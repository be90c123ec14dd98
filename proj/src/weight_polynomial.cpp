#include "loopbc/algebra.hpp"

#include <cmath>
#include <sstream>

namespace loopbc {

WeightPolynomial::WeightPolynomial(const Rational& c) {
  if (c != 0) terms_[{0, 0, 0, 0}] = c;
}

WeightPolynomial WeightPolynomial::symbol(int index, int power) {
  WeightPolynomial p;
  Exponents e{0, 0, 0, 0};
  e[index] = power;
  p.terms_[e] = 1;
  return p;
}

WeightPolynomial& WeightPolynomial::operator+=(const WeightPolynomial& o) {
  for (const auto& [e, c] : o.terms_) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

WeightPolynomial& WeightPolynomial::operator-=(const WeightPolynomial& o) { return *this += -o; }

WeightPolynomial WeightPolynomial::operator-() const {
  WeightPolynomial r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

WeightPolynomial& WeightPolynomial::operator*=(const WeightPolynomial& o) {
  std::map<Exponents, Rational> out;
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e;
      for (int k = 0; k < 4; ++k) e[k] = ea[k] + eb[k];
      auto& slot = out[e];
      slot += ca * cb;
    }
  }
  std::erase_if(out, [](const auto& t) { return t.second == 0; });
  terms_ = std::move(out);
  return *this;
}

WeightPolynomial pow(const WeightPolynomial& p, int k) {
  WeightPolynomial r(Rational(1));
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

double WeightPolynomial::evaluate(const LoopWeights& w) const {
  const double v[4] = {w.n, w.n1, w.n2, w.n12};
  double s = 0;
  for (const auto& [e, c] : terms_) {
    double t = static_cast<double>(c);
    for (int k = 0; k < 4; ++k)
      if (e[k]) t *= std::pow(v[k], e[k]);
    s += t;
  }
  return s;
}

Rational WeightPolynomial::evaluate(const std::array<Rational, 4>& w) const {
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < e[k]; ++j) t *= w[k];
    s += t;
  }
  return s;
}

std::string WeightPolynomial::str() const {
  if (terms_.empty()) return "0";
  static const char* names[4] = {"n", "n1", "n2", "n12"};
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    Rational a = c < 0 ? Rational(-c) : c;
    bool unit = a == 1;
    bool any = false;
    if (!unit) os << a;
    for (int k = 0; k < 4; ++k) {
      if (!e[k]) continue;
      if (!unit || any) os << "*";
      os << names[k];
      if (e[k] > 1) os << "^" << e[k];
      any = true;
    }
    if (unit && !any) os << "1";
  }
  return os.str();
}

std::optional<Mark> combine(Mark a, Mark b) {
  if (a == Mark::none) return b;
  if (b == Mark::none || a == b) return a;
  return std::nullopt;
}

WeightPolynomial loop_weight(Mark left, Mark right) {
  using P = WeightPolynomial;
  const P n = P::n(), n1 = P::n1(), n2 = P::n2(), n12 = P::n12();
  P l = left == Mark::none ? n : left == Mark::blob ? n1 : n - n1;
  if (right == Mark::none) return l;
  if (left == Mark::none) return right == Mark::blob ? n2 : n - n2;
  // Both boundaries touched: inclusion-exclusion on the projectors.
  P bb = n12;
  P bu = n1 - n12;
  P ub = n2 - n12;
  P uu = n - n1 - n2 + n12;
  if (left == Mark::blob) return right == Mark::blob ? bb : bu;
  return right == Mark::blob ? ub : uu;
}

double loop_weight(Mark left, Mark right, const LoopWeights& w) {
  return loop_weight(left, right).evaluate(w);
}

std::array<double, 9> loop_weight_table(const LoopWeights& w) {
  std::array<double, 9> t{};
  for (int l = 0; l < 3; ++l)
    for (int r = 0; r < 3; ++r) t[3 * l + r] = loop_weight(Mark(l), Mark(r), w);
  return t;
}

}  // namespace loopbc
