#include <cmath>
#include <limits>
#include <stdexcept>

#include "loopbc/cft.hpp"
#include "loopbc/markov.hpp"

namespace loopbc {

namespace {

void check_sine(double s, const char* what) {
  if (std::abs(s) < 1e-12) throw std::domain_error(std::string("singular parameters: ") + what);
}

}  // namespace

CoulombParams CoulombParams::from_n(double n, bool dense) {
  if (!(n > -2 && n <= 2)) throw std::domain_error("n must lie in (-2, 2]");
  CoulombParams p;
  p.n = n;
  p.gamma = std::acos(n / 2);
  p.dense = dense;
  p.g = dense ? 1 - p.gamma / M_PI : 1 + p.gamma / M_PI;
  p.c = central_charge(p.g);
  return p.with_r(1, 1, 1);
}

CoulombParams CoulombParams::with_r(double r1_, double r2_, double r12_) const {
  CoulombParams p = *this;
  p.r1 = r1_;
  p.r2 = r2_;
  p.r12 = r12_;
  if (gamma > 0) {
    p.n1 = blob_weight_from_r(r1_, gamma);
    p.n2 = blob_weight_from_r(r2_, gamma);
    p.n12 = n12_from_r(r1_, r2_, r12_, gamma);
  }
  return p;
}

double central_charge(double g) {
  if (!(g > 0)) throw std::domain_error("g must be positive");
  return 1 - 6 * (g - 1) * (g - 1) / g;
}

double kac_weight(double r, double s, double g) {
  double a = g * r - s;
  return (a * a - (g - 1) * (g - 1)) / (4 * g);
}

double dense_kac_weight(double r, double s, double gprime, bool swapped) {
  return swapped ? kac_weight(s, r, gprime) : kac_weight(r, s, gprime);
}

double blob_weight_from_r(double r, double gamma) {
  double d = std::sin(r * gamma);
  check_sine(d, "sin(r gamma) = 0");
  return std::sin((r + 1) * gamma) / d;
}

double r_from_blob_weight(double n1, double gamma) {
  // n1 = cos gamma + sin gamma cot(r gamma)
  return std::atan2(std::sin(gamma), n1 - std::cos(gamma)) / gamma;
}

double n12_from_r(double r1, double r2, double r12, double gamma) {
  double d = std::sin(r1 * gamma) * std::sin(r2 * gamma);
  check_sine(d, "sin(r1 gamma) sin(r2 gamma) = 0");
  return std::sin((r1 + r2 + 1 + r12) * gamma / 2) * std::sin((r1 + r2 + 1 - r12) * gamma / 2) / d;
}

double r12_from_nu(double nu12, double nu1, double nu2, double gamma) {
  double c = nu12 / std::sqrt(nu1 * nu2) * std::sqrt(2 + 2 * std::cos(gamma)) / 2;
  if (std::abs(c) > 1) throw std::domain_error("nu12 outside the range of the open/open map");
  return 2 * std::acos(c) / gamma;
}

double nu12_from_r12(double r12, double nu1, double nu2, double gamma) {
  return 2 * std::cos(r12 * gamma / 2) * std::sqrt(nu1 * nu2) / std::sqrt(2 + 2 * std::cos(gamma));
}

double open_r1(double gamma) { return (M_PI / gamma - 1) / 2; }

BcPair parse_pair(const std::string& s) {
  if (s == "ord/ord") return BcPair::ord_ord;
  if (s == "sp/ord") return BcPair::sp_ord;
  if (s == "asb/ord" || s == "as_blob/ord") return BcPair::as_blob_ord;
  if (s == "asu/ord" || s == "as_unblob/ord") return BcPair::as_unblob_ord;
  if (s == "as/as") return BcPair::as_as;
  if (s == "open/ord") return BcPair::open_ord;
  if (s == "open/open") return BcPair::open_open;
  throw std::invalid_argument("unknown boundary pair: " + s);
}

std::string to_string(BcPair p) {
  switch (p) {
    case BcPair::ord_ord: return "ord/ord";
    case BcPair::sp_ord: return "sp/ord";
    case BcPair::as_blob_ord: return "asb/ord";
    case BcPair::as_unblob_ord: return "asu/ord";
    case BcPair::as_as: return "as/as";
    case BcPair::open_ord: return "open/ord";
    case BcPair::open_open: return "open/open";
  }
  return "?";
}

namespace {

using Monomials = std::vector<std::pair<double, double>>;

// Terms h(k) for k = k0, k0+1, ... (and downward when both_ways) until the
// exponent has passed the window above the smallest one seen.
template <class H>
void lattice_sum(Monomials& out, double shift, double coef, int k0, bool both_ways, double window, H h) {
  double lowest = std::numeric_limits<double>::infinity();
  for (int dir : {1, -1}) {
    if (dir < 0 && !both_ways) break;
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = dir > 0 ? k0 : k0 - 1;; k += dir) {
      double e = h(k) + shift;
      lowest = std::min(lowest, e);
      out.emplace_back(e, coef);
      if (e > prev && e > lowest + window) break;
      prev = e;
    }
  }
}

Monomials character_monomials(BcPair pair, const Sector& sec, const CoulombParams& p, double window) {
  const double g = p.g, sh = -p.c / 24;
  const int L = sec.strings;
  auto h = [g](double r, double s) { return kac_weight(r, s, g); };
  Monomials m;
  auto as_ord = [&](double r1, double s) {
    if (L == 0) m.emplace_back(h(r1, s) + sh, 1.0);
    else if (sec.left == Mark::blob) m.emplace_back(h(r1 + L, s) + sh, 1.0);
    else if (sec.left == Mark::unblob) m.emplace_back(h(r1 - L, s) + sh, 1.0);
    else throw std::invalid_argument("strings next to an anisotropic wall carry a mark");
  };
  switch (pair) {
    case BcPair::ord_ord:
      m = {{h(1 + L, 1) + sh, 1.0}, {h(1 + L, -1) + sh, -1.0}};
      break;
    case BcPair::sp_ord:
      m = {{h(1 + L, 2) + sh, 1.0}, {h(1 + L, -2) + sh, -1.0}};
      break;
    case BcPair::as_blob_ord: as_ord(p.r1, p.r1 + 1); break;
    case BcPair::as_unblob_ord: as_ord(p.r1, p.r1); break;
    case BcPair::open_ord: {
      double r1 = open_r1(p.gamma);
      as_ord(r1, r1 + 1);
      break;
    }
    case BcPair::open_open:
      if (L != 0) throw std::invalid_argument("open/open characters are given for the string-free sector only");
      [[fallthrough]];
    case BcPair::as_as: {
      const double r1 = p.r1, r2 = p.r2, r12 = p.r12;
      if (L == 0) {
        lattice_sum(m, sh, 1.0, 0, true, window, [&](int k) { return h(r12, r12 - 2 * k); });
        break;
      }
      double a = 0, b = 0;
      if (sec.left == Mark::blob && sec.right == Mark::blob) a = r1 + r2 - 1, b = r1 + r2 + 1;
      else if (sec.left == Mark::blob && sec.right == Mark::unblob) a = r1 - r2 - 1, b = r1 - r2 - 1;
      else if (sec.left == Mark::unblob && sec.right == Mark::blob) a = -r1 + r2 - 1, b = -r1 + r2 - 1;
      else if (sec.left == Mark::unblob && sec.right == Mark::unblob) a = -r1 - r2 - 1, b = -r1 - r2 - 3;
      else throw std::invalid_argument("strings between two anisotropic walls carry two marks");
      lattice_sum(m, sh, 1.0, 0, false, window, [&](int k) { return h(a + L, b - 2 * k); });
      break;
    }
  }
  return m;
}

}  // namespace

QSum character(BcPair pair, const Sector& sector, const CoulombParams& p, int order) {
  if (order < 1) throw std::invalid_argument("truncation order must be at least 1");
  return QSum::from_monomials(character_monomials(pair, sector, p, order + QSum::kOmittedWindow), order);
}

QSum annulus_partition(BcPair pair, const CoulombParams& p, int order) {
  if (order < 1) throw std::invalid_argument("truncation order must be at least 1");
  if (pair == BcPair::as_as || pair == BcPair::open_open)
    throw std::invalid_argument("the Markov decomposition is implemented for an ordinary right wall only");
  const double window = order + QSum::kOmittedWindow;
  const double gm = p.gamma;
  Monomials all;
  double lowest = std::numeric_limits<double>::infinity();
  auto add = [&](const Sector& s, double d) {
    if (std::abs(d) < 1e-12) return false;  // D_L vanishes up to rounding of sin(k pi)
    for (auto [e, c] : character_monomials(pair, s, p, window)) {
      all.emplace_back(e, d * c);
      lowest = std::min(lowest, e);
    }
    return true;
  };
  // sectors beyond the window contribute only to the (omitted) tail
  auto beyond = [&](std::size_t from) {
    for (std::size_t i = from; i < all.size(); ++i)
      if (all[i].first <= lowest + window) return false;
    return true;
  };
  for (int L = 0; L < 10000; ++L) {
    std::size_t before = all.size();
    bool any = false;
    switch (pair) {
      case BcPair::ord_ord:
      case BcPair::sp_ord:
        any = add({L}, quantum_dimension(L, gm, DimensionFlavor::plain));
        break;
      case BcPair::as_blob_ord:
      case BcPair::as_unblob_ord:
        if (L == 0) {
          any = add({0}, 1.0);
        } else {
          any |= add({L, Mark::blob}, quantum_dimension(L, gm, DimensionFlavor::blob, p.r1));
          any |= add({L, Mark::unblob}, quantum_dimension(L, gm, DimensionFlavor::unblob, p.r1));
        }
        break;
      case BcPair::open_ord:
        check_sine(std::sin(gm), "sin gamma = 0");
        if (L == 0) {
          any = add({0}, 1.0);
        } else {
          any |= add({L, Mark::blob}, std::sin((1 - L) * gm) / std::sin(gm));
          any |= add({L, Mark::unblob}, std::sin((1 + L) * gm) / std::sin(gm));
        }
        break;
      default: break;
    }
    if (L > 2 && any && beyond(before)) break;
  }
  return QSum::from_monomials(std::move(all), order);
}

namespace {

// sum_L sin(alpha + beta L)/den q^{h - c/24} with h - c/24 = -1/24 + g (L + delta)^2 / 4,
// Poisson-resummed: sqrt(2/g)/eta(2i/tau) sum_p sin(alpha - (beta - 2 pi p) delta)/den
// qt^{(beta - 2 pi p)^2 / (2 pi^2 g)}.
double poisson_closed(double alpha, double beta, double delta, double den, double g, double tau) {
  const double qt = std::exp(-2 * M_PI / tau);
  double sum = 0;
  for (int dir : {1, -1}) {
    for (int p = dir > 0 ? 0 : -1;; p += dir) {
      double b = beta - 2 * M_PI * p;
      double e = b * b / (2 * M_PI * M_PI * g);
      double t = std::sin(alpha - b * delta) * std::pow(qt, e);
      sum += t;
      if (std::abs(p) > 2 && std::pow(qt, e) < 1e-300) break;
      if (std::abs(p) > 2 && std::abs(t) < 1e-20 * std::abs(sum)) break;
    }
  }
  return std::sqrt(2 / g) / dedekind_eta(2 / tau) * sum / den;
}

void require_dilute(const CoulombParams& p) {
  if (p.dense) throw std::invalid_argument("closed-channel forms are implemented for the dilute branch");
}

}  // namespace

double annulus_closed_channel(BcPair pair, const CoulombParams& p, double tau) {
  require_dilute(p);
  const double gm = p.gamma, g = p.g;
  switch (pair) {
    case BcPair::ord_ord: return poisson_closed(gm, gm, 1 - 1 / g, std::sin(gm), g, tau);
    case BcPair::sp_ord: return poisson_closed(gm, gm, 1 - 2 / g, std::sin(gm), g, tau);
    case BcPair::as_blob_ord:
      return poisson_closed(p.r1 * gm, gm, p.r1 - (p.r1 + 1) / g, std::sin(p.r1 * gm), g, tau);
    case BcPair::as_unblob_ord:
      return poisson_closed(p.r1 * gm, gm, p.r1 - p.r1 / g, std::sin(p.r1 * gm), g, tau);
    case BcPair::open_ord: {
      double r1 = open_r1(gm);
      return poisson_closed(gm, -gm, r1 - (r1 + 1) / g, std::sin(gm), g, tau);
    }
    default: throw std::invalid_argument("no closed-channel form for " + to_string(pair));
  }
}

double annulus_closed_channel_printed(BcPair pair, const CoulombParams& p, double tau) {
  require_dilute(p);
  const double gm = p.gamma, g = p.g, qt = std::exp(-2 * M_PI / tau);
  double r1 = p.r1;
  if (pair == BcPair::as_unblob_ord) {  // duality r1 -> pi/gamma - r1
    r1 = M_PI / gm - r1;
    pair = BcPair::as_blob_ord;
  }
  auto term = [&](int k) -> double {
    double tp = 2 * M_PI * k;
    switch (pair) {
      case BcPair::ord_ord: return std::sin(gm / g - (g - 1) / g * tp) / std::sin(gm);
      case BcPair::sp_ord: return std::sin(2 * gm / g + (2 - g) / g * tp) / std::sin(gm);
      case BcPair::as_blob_ord: return std::sin((r1 + 1) * gm / g + (1 - r1 * (g - 1)) / g * tp) / std::sin(r1 * gm);
      case BcPair::open_ord: return std::sin(gm / 2 - M_PI * k) / std::sin(gm);
      default: throw std::invalid_argument("no printed closed-channel form for " + to_string(pair));
    }
  };
  double sum = 0;
  for (int k = -60; k <= 60; ++k) {
    double a = 2 * k + g - 1;
    sum += term(k) * std::pow(qt, a * a / (2 * g));
  }
  // qt^{-1/12} / P(qt^2) = 1 / eta(2i/tau)
  return std::sqrt(2 / g) / dedekind_eta(2 / tau) * sum;
}

Boundary parse_boundary(const std::string& s) {
  if (s == "ord") return Boundary::ord;
  if (s == "sp") return Boundary::sp;
  if (s == "asb" || s == "as_blob") return Boundary::as_blob;
  if (s == "asu" || s == "as_unblob") return Boundary::as_unblob;
  if (s == "open") return Boundary::open;
  throw std::invalid_argument("unknown boundary: " + s);
}

double gfactor(Boundary b, const CoulombParams& p) {
  const double gm = p.gamma, g = p.g, pre = std::pow(2 / g, 0.25);
  const double sg = std::sin(gm), sgg = std::sin(gm / g);
  check_sine(sg * sgg, "sin gamma sin(gamma/g) = 0");
  double v = 0;
  switch (b) {
    case Boundary::ord: v = pre * std::sqrt(sgg / sg); break;
    case Boundary::sp: v = pre * std::sin(2 * gm / g) / std::sqrt(sg * sgg); break;
    case Boundary::as_blob:
      check_sine(std::sin(p.r1 * gm), "sin(r1 gamma) = 0");
      v = pre * std::sin((p.r1 + 1) * gm / g) / std::sin(p.r1 * gm) * std::sqrt(sg / sgg);
      break;
    case Boundary::as_unblob:
      check_sine(std::sin(p.r1 * gm), "sin(r1 gamma) = 0");
      v = pre * std::sin(p.r1 * gm / g) / std::sin(p.r1 * gm) * std::sqrt(sg / sgg);
      break;
    case Boundary::open: v = pre * std::sin(gm / 2) / std::sqrt(sg * sgg); break;
  }
  return v;
}

GfactorCheck gfactor_consistency(BcPair pair, const CoulombParams& p, double tau, int order) {
  GfactorCheck r;
  r.order = order;
  const QSum z = annulus_partition(pair, p, order);
  const double q = std::exp(-M_PI * tau);
  r.direct = z.evaluate(q);
  r.tail_bound = z.tail_bound(q);
  r.closed = annulus_closed_channel(pair, p, tau);
  r.relative = std::abs(r.direct - r.closed) / std::abs(r.closed);
  if (r.tail_bound > 1e-3 * std::abs(r.direct)) throw std::runtime_error("insufficient q-series truncation");

  // long cylinder: Z -> g_a g_b qt^{-c/12}
  Boundary a = Boundary::ord;
  switch (pair) {
    case BcPair::ord_ord: a = Boundary::ord; break;
    case BcPair::sp_ord: a = Boundary::sp; break;
    case BcPair::as_blob_ord: a = Boundary::as_blob; break;
    case BcPair::as_unblob_ord: a = Boundary::as_unblob; break;
    case BcPair::open_ord: a = Boundary::open; break;
    default: break;
  }
  const double tau_lc = 0.05;
  double zl = annulus_closed_channel(pair, p, tau_lc);
  double qt = std::exp(-2 * M_PI / tau_lc);
  r.long_cylinder_ratio = zl / (gfactor(a, p) * gfactor(Boundary::ord, p) * std::pow(qt, -p.c / 12));
  return r;
}

double dedekind_eta(double tau, int max_terms) {
  if (!(tau > 0)) throw std::domain_error("tau must be positive");
  if (tau < 1) return dedekind_eta(1 / tau, max_terms) / std::sqrt(tau);
  const double q = std::exp(-2 * M_PI * tau);
  double prod = 1;
  for (int k = 1; k <= max_terms; ++k) {
    double t = std::pow(q, k);
    prod *= 1 - t;
    if (t < 1e-18) break;
  }
  return std::exp(-2 * M_PI * tau / 24) * prod;
}

double crossing_probability_percolation(double tau) {
  double e1 = dedekind_eta(tau), e2 = dedekind_eta(tau / 2), e3 = dedekind_eta(tau / 3), e6 = dedekind_eta(tau / 6);
  return e1 * e6 * e6 / (e2 * e2 * e3);
}

double crossing_probability_ising(double tau) {
  double e1 = dedekind_eta(tau), e2 = dedekind_eta(tau / 2), e6 = dedekind_eta(tau / 6), e12 = dedekind_eta(tau / 12);
  return e1 * e12 * e12 / (e2 * e2 * e6);
}

namespace {

// sum_k c_k q^{e_k - e_ref}, terms decaying as Gaussians in k
template <class H>
double gaussian_sum(double q, double e_ref, H h) {
  double s = 0;
  for (int dir : {1, -1})
    for (int k = dir > 0 ? 0 : -1;; k += dir) {
      auto [e, c] = h(k);
      double t = c * std::pow(q, e - e_ref);
      s += t;
      if (std::abs(k) > 3 && std::abs(t) < 1e-22 * (std::abs(s) + 1e-300)) break;
      if (std::abs(k) > 100000) break;
    }
  return s;
}

}  // namespace

double rocha_caridi(int r, int s, int p, int pp, double q, int /*terms*/) {
  const double g = double(p) / pp;
  const double c = central_charge(g);
  double num = gaussian_sum(q, 0.0, [&](int k) -> std::pair<double, double> {
    return {kac_weight(r + 2 * k * pp, s, g), 1.0};
  });
  num -= gaussian_sum(q, 0.0, [&](int k) -> std::pair<double, double> {
    return {kac_weight(r + 2 * k * pp, -s, g), 1.0};
  });
  double ip = 1, pq = 1;
  for (int k = 1; k < 100000; ++k) {
    double t = std::pow(q, k);
    pq *= 1 - t;
    if (t < 1e-18) break;
  }
  ip = 1 / pq;
  return std::pow(q, -c / 24) * ip * num;
}

double crossing_probability_ising_characters(double tau) {
  const double g = 4.0 / 3, q = std::exp(-M_PI * tau);
  // q^{-c/24}/P(q) cancels between numerator and denominator
  double num = gaussian_sum(q, 0.0, [&](int k) -> std::pair<double, double> {
    return {kac_weight(1, 1 + 2 * k, g), 1.0};
  });
  num -= gaussian_sum(q, 0.0, [&](int k) -> std::pair<double, double> {
    return {kac_weight(3, 3 + 2 * k, g), 1.0};
  });
  double den = 0;
  for (int s : {1, 3}) {
    den += gaussian_sum(q, 0.0, [&](int k) -> std::pair<double, double> { return {kac_weight(1 + 6 * k, s, g), 1.0}; });
    den -= gaussian_sum(q, 0.0, [&](int k) -> std::pair<double, double> { return {kac_weight(1 + 6 * k, -s, g), 1.0}; });
  }
  return num / den;
}

double mean_crossings_per_length(const CoulombParams& p) {
  return (p.g - 1) / (2 * p.g) * std::sqrt(p.n + 2) / std::sin(p.gamma / 2);
}

FractalDimensions fractal_dimensions(const CoulombParams& p) {
  const double g = p.g, r1 = p.r1;
  return {1 - kac_weight(3, 1, g), 1 - kac_weight(3, 3, g), 1 - kac_weight(2 * r1 + 1, 2 * r1 + 1, g),
          1 - kac_weight(-2 * r1 + 1, -2 * r1 - 3, g), 2 - 2 * kac_weight(1, 0, g)};
}

Perturbation perturbation_data(const std::string& point, const CoulombParams& p) {
  Perturbation r;
  if (point == "ord") r = {"Phi_{3,1}", 3, 1};
  else if (point == "sp-anisotropic" || point == "sp") r = {"Phi_{3,3}", 3, 3};
  else if (point == "sp-isotropic") r = {"Phi_{1,3}", 1, 3};
  else if (point == "as") r = {"Phi_{1,3}", 1, 3};
  else throw std::invalid_argument("unknown point: " + point);
  r.rg_eigenvalue = 1 - kac_weight(r.r, r.s, p.g);
  return r;
}

double crossover_exponent(double g) { return (1 - kac_weight(1, 3, g)) / (1 - kac_weight(3, 3, g)); }

}  // namespace loopbc
