#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "loopbc/algebra.hpp"

namespace loopbc {

namespace {

// Marks collected along one strand.
struct MarkAcc {
  Mark l = Mark::none, r = Mark::none;
  bool zero = false;
  void add(Mark a, Mark b) {
    auto x = combine(l, a), y = combine(r, b);
    if (!x || !y) zero = true;
    else l = *x, r = *y;
  }
};

// Position on the rectangle boundary, counter-clockwise from bottom-left.
int circ(int p, int n) { return p < n ? p : 3 * n - 1 - p; }

bool exposed_from(const Diagram& d, int p, int shift) {
  int n = d.size, m = 2 * n;
  auto pos = [&](int a) { return (circ(a, n) - shift + m) % m; };
  int P = pos(p), Q = pos(d.link[p]);
  if (P > Q) std::swap(P, Q);
  for (int a = 0; a < m; ++a) {
    int b = d.link[a];
    if (b < 0 || a == p || a == d.link[p]) continue;
    int R = pos(a), S = pos(b);
    if (R > S) std::swap(R, S);
    if (R < P && Q < S) return false;
  }
  return true;
}

}  // namespace

void Diagram::connect(int a, int b, Mark l, Mark r) {
  link[a] = std::int8_t(b);
  link[b] = std::int8_t(a);
  int lo = std::min(a, b);
  left[lo] = l;
  right[lo] = r;
  left[std::max(a, b)] = right[std::max(a, b)] = Mark::none;
}

bool Diagram::left_exposed(int p) const { return link[p] >= 0 && exposed_from(*this, p, 0); }
bool Diagram::right_exposed(int p) const { return link[p] >= 0 && exposed_from(*this, p, size); }

bool Diagram::planar() const {
  int n = size, m = 2 * n;
  for (int a = 0; a < m; ++a) {
    if (link[a] < 0) continue;
    if (link[a] >= m || link[link[a]] != a) return false;
    int P = std::min(circ(a, n), circ(link[a], n)), Q = std::max(circ(a, n), circ(link[a], n));
    for (int b = 0; b < m; ++b) {
      if (link[b] < 0) continue;
      int R = circ(b, n);
      int S = circ(link[b], n);
      bool in1 = P < R && R < Q, in2 = P < S && S < Q;
      if (in1 != in2 && R != P && R != Q && S != P && S != Q) return false;
    }
  }
  return true;
}

std::string Diagram::key() const {
  std::string k;
  for (int p = 0; p < 2 * size; ++p) {
    k += char(link[p] + 2);
    k += char('0' + 3 * int(left[p]) + int(right[p]));
  }
  return k;
}

std::string Diagram::str() const {
  std::ostringstream os;
  os << '[' << weight.str() << ']';
  auto name = [&](int p) { return p < size ? "b" + std::to_string(p) : "t" + std::to_string(p - size); };
  for (int p = 0; p < 2 * size; ++p) {
    if (link[p] <= p) continue;
    os << ' ' << name(p) << '-' << name(link[p]);
    if (left[p] != Mark::none) os << (left[p] == Mark::blob ? 'b' : 'u');
    if (right[p] != Mark::none) os << (right[p] == Mark::blob ? 'B' : 'U');
  }
  return os.str();
}

namespace diagrams {

Diagram identity(int n, std::uint32_t occupation) {
  Diagram d(n);
  for (int i = 0; i < n; ++i)
    if (occupation >> i & 1) d.connect(i, n + i);
  return d;
}

Diagram identity(int n) { return identity(n, n >= 32 ? ~0u : (1u << n) - 1); }

Diagram e(int n, int i) {
  Diagram d = identity(n);
  d.link[i + 1] = d.link[n + i + 1] = -1;
  d.connect(i, i + 1);
  d.connect(n + i, n + i + 1);
  return d;
}

Diagram blob(int n, Mark m) {
  Diagram d = identity(n);
  d.left[0] = m;
  return d;
}

Diagram right_blob(int n, Mark m) {
  Diagram d = identity(n);
  d.right[n - 1] = m;
  return d;
}

}  // namespace diagrams

Composition compose_shapes(const Diagram& lower, const Diagram& upper) {
  const int n = lower.size;
  if (upper.size != n) throw std::invalid_argument("diagram sizes differ");
  for (int i = 0; i < n; ++i)
    if ((lower.link[n + i] >= 0) != (upper.link[i] >= 0))
      throw std::invalid_argument("interface occupation mismatch at site " + std::to_string(i));

  Composition c;
  c.diagram = Diagram(n);
  std::array<bool, LinkPattern::kMaxSites> seen{};
  const Diagram* layer[2] = {&lower, &upper};

  // Walk from (lay, p) until leaving through an outer boundary point.
  auto walk = [&](int lay, int p, MarkAcc& acc) {
    for (;;) {
      const Diagram& d = *layer[lay];
      int q = d.link[p];
      int lo = std::min(p, q);
      acc.add(d.left[lo], d.right[lo]);
      if (lay == 0 && q < n) return q;
      if (lay == 1 && q >= n) return q;
      if (lay == 0) {
        seen[q - n] = true;
        lay = 1, p = q - n;
      } else {
        seen[q] = true;
        lay = 0, p = q + n;
      }
    }
  };

  std::array<bool, Diagram::kMaxPoints> done{};
  for (int lay = 0; lay < 2; ++lay) {
    for (int i = 0; i < n; ++i) {
      int p = lay == 0 ? i : n + i;
      if (layer[lay]->link[p] < 0 || done[p]) continue;
      MarkAcc acc;
      int q = walk(lay, p, acc);
      done[p] = done[q] = true;
      if (acc.zero) c.zero = true;
      c.diagram.connect(p, q, acc.l, acc.r);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (seen[i] || lower.link[n + i] < 0) continue;
    MarkAcc acc;
    int lay = 0, p = n + i;
    do {
      const Diagram& d = *layer[lay];
      int q = d.link[p];
      acc.add(d.left[std::min(p, q)], d.right[std::min(p, q)]);
      if (lay == 0) {
        seen[q - n] = true;
        lay = 1, p = q - n;
      } else {
        seen[q] = true;
        lay = 0, p = q + n;
      }
    } while (!(lay == 0 && p == n + i));
    if (acc.zero) c.zero = true;
    else ++c.loops[loop_kind(acc.l, acc.r)];
  }
  return c;
}

Diagram compose(const Diagram& lower, const Diagram& upper) {
  Composition c = compose_shapes(lower, upper);
  Diagram d = c.diagram;
  if (c.zero) {
    d.weight = WeightPolynomial();
    return d;
  }
  d.weight = lower.weight * upper.weight;
  for (int k = 0; k < 9; ++k)
    if (c.loops[k]) d.weight *= pow(loop_weight(Mark(k / 3), Mark(k % 3)), c.loops[k]);
  return d;
}

WeightPolynomial markov_trace(const Diagram& d) {
  const int n = d.size;
  for (int i = 0; i < n; ++i)
    if ((d.link[i] >= 0) != (d.link[n + i] >= 0)) return {};
  WeightPolynomial w = d.weight;
  std::array<bool, Diagram::kMaxPoints> seen{};
  for (int i = 0; i < n; ++i) {
    if (d.link[i] < 0 || seen[i]) continue;
    MarkAcc acc;
    int p = i;
    do {
      int q = d.link[p];
      seen[p] = seen[q] = true;
      acc.add(d.left[std::min(p, q)], d.right[std::min(p, q)]);
      p = q < n ? q + n : q - n;
    } while (p != i);
    if (acc.zero) return {};
    w *= loop_weight(acc.l, acc.r);
  }
  return w;
}

std::vector<std::pair<LinkPattern, WeightPolynomial>> act(const Diagram& d, const LinkPattern& p,
                                                          BoundaryMode mode) {
  const int n = d.size;
  if (p.size != n) throw std::invalid_argument("pattern and diagram sizes differ");
  for (int i = 0; i < n; ++i)
    if ((d.link[i] >= 0) != p.occupied(i)) return {};

  LinkPattern r(n);
  WeightPolynomial w = d.weight;
  std::array<bool, LinkPattern::kMaxSites> used{};
  std::array<bool, LinkPattern::kMaxSites> top_done{};

  auto pattern_marks = [&](int j, MarkAcc& acc) {
    int a = p.link[j] >= 0 ? std::min<int>(j, p.link[j]) : j;
    acc.add(p.left[a], p.right[a]);
  };

  for (int i = 0; i < n; ++i) {
    int t = n + i;
    if (d.link[t] < 0 || top_done[i]) continue;
    MarkAcc acc;
    int cur = t;
    for (;;) {
      int q = d.link[cur];
      acc.add(d.left[std::min(cur, q)], d.right[std::min(cur, q)]);
      if (q >= n) {
        top_done[i] = top_done[q - n] = true;
        r.link[i] = std::int8_t(q - n);
        r.link[q - n] = std::int8_t(i);
        int a = std::min(i, q - n);
        r.left[a] = acc.l, r.right[a] = acc.r;
        break;
      }
      used[q] = true;
      pattern_marks(q, acc);
      if (p.link[q] >= 0) {
        used[p.link[q]] = true;
        cur = p.link[q];
        continue;
      }
      if (p.link[q] == LinkPattern::kString) r.link[i] = LinkPattern::kString;
      else throw std::invalid_argument("act: boundary-attached strands are handled by the transfer module");
      r.left[i] = acc.l, r.right[i] = acc.r;
      top_done[i] = true;
      break;
    }
    if (acc.zero) return {};
  }

  for (int j = 0; j < n; ++j) {
    if (used[j] || !p.occupied(j)) continue;
    if (!p.is_arc(j)) return {};  // strings contracted together
    MarkAcc acc;
    int cur = j;
    do {
      used[cur] = true;
      pattern_marks(cur, acc);
      int k = p.link[cur];
      used[k] = true;
      int q = d.link[k];
      int lo = std::min(k, q);
      acc.add(d.left[lo], d.right[lo]);
      if (!p.is_arc(q)) return {};  // an arc led to a string: impossible by planarity
      cur = q;
    } while (cur != j);
    if (acc.zero) return {};
    w *= loop_weight(acc.l, acc.r);
  }

  // normal form
  std::vector<std::pair<int, bool>> expand;
  for (int i = 0; i < n; ++i) {
    bool anchor = r.link[i] > i || r.link[i] == LinkPattern::kString;
    if (!anchor) continue;
    bool le = r.left_exposed(i), re = r.right_exposed(i);
    if (r.link[i] == LinkPattern::kString) {
      le = le && r.leftmost_string() == i;
      re = re && r.rightmost_string() == i;
    }
    if (r.left[i] != Mark::none && (!le || mode == BoundaryMode::blobless))
      throw std::logic_error("left mark on a component that cannot carry it: " + r.str());
    if (r.right[i] != Mark::none && (!re || mode != BoundaryMode::two_boundary))
      throw std::logic_error("right mark on a component that cannot carry it: " + r.str());
    if (r.link[i] == LinkPattern::kString) continue;
    if (mode != BoundaryMode::blobless && le && r.left[i] == Mark::none) expand.push_back({i, true});
    if (mode == BoundaryMode::two_boundary && re && r.right[i] == Mark::none) expand.push_back({i, false});
  }
  std::vector<std::pair<LinkPattern, WeightPolynomial>> out;
  for (std::size_t m = 0; m < (std::size_t(1) << expand.size()); ++m) {
    LinkPattern s = r;
    for (std::size_t k = 0; k < expand.size(); ++k) {
      Mark mk = (m >> k) & 1 ? Mark::unblob : Mark::blob;
      (expand[k].second ? s.left : s.right)[expand[k].first] = mk;
    }
    out.push_back({s, w});
  }
  return out;
}

WeightPolynomial sector_trace(const Diagram& d, const Sector& sector, BoundaryMode mode, bool dilute) {
  WeightPolynomial tr;
  for (const LinkPattern& p : enumerate_basis(d.size, sector, mode, dilute)) {
    auto key = p.key();
    for (const auto& [q, w] : act(d, p, mode))
      if (q.key() == key) tr += w;
  }
  return tr;
}

}  // namespace loopbc
