#pragma once
// Local operators of the diagonal-to-diagonal transfer matrix acting on link
// patterns, templated on the scalar so the same code serves double-precision
// spectra and exact rational partition sums.

#include <array>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "loopbc/algebra.hpp"

namespace loopbc {

// Weights of one boundary. A K side uses the triple beta1 P0 + beta2 P1 +
// beta3 blob; an open side lets strands end on the wall.
template <class S>
struct SideWeights {
  bool open = false;
  bool marked = false;  // K side carrying blob/unblob bookkeeping
  std::array<S, 3> beta{S(1), S(0), S(0)};
  S pass = S(0);  // open: strand passes the boundary vertex
  S end = S(0);   // open: strand starts or ends on the wall
  S nu = S(1);    // open: half-loop with both ends on this wall
};

template <class S>
struct LocalWeights {
  std::array<S, 6> omega{};  // plaquette omega_1..omega_6
  std::array<S, 9> loops{};  // closed loop weight by loop_kind(left, right)
  SideWeights<S> left, right;
  S nu12 = S(1);  // half-loop joining the two walls
};

// Which operators sit in each of the two layers of one transfer step.
struct LayerPlan {
  struct Layer {
    std::vector<int> plaquettes;  // left strand of each R
    bool left = false;
    bool right = false;
  };
  int width = 0;
  Layer first, second;

  // Standard arrangement: R(0,1),R(2,3),.. then the left boundary and
  // R(1,2),R(3,4),..; the right boundary fills whichever layer leaves the
  // last strand free. boundary_first moves the left boundary to the first
  // layer (the two orders are cyclic permutations of each other).
  static LayerPlan standard(int n, bool boundary_first = false) {
    if (n < 2 || n > LinkPattern::kMaxSites) throw std::invalid_argument("width out of range");
    LayerPlan p;
    p.width = n;
    Layer a, b;
    for (int i = 0; i + 1 < n; i += 2) a.plaquettes.push_back(i);
    for (int i = 1; i + 1 < n; i += 2) b.plaquettes.push_back(i);
    b.left = true;
    (n % 2 ? a : b).right = true;
    if (boundary_first) std::swap(a, b);
    p.first = a;
    p.second = b;
    return p;
  }
};

namespace kernel {

inline bool defect(std::int8_t l) {
  return l == LinkPattern::kString || l == LinkPattern::kToLeft || l == LinkPattern::kToRight;
}

inline int anchor_of(const LinkPattern& p, int i) { return p.link[i] >= 0 ? std::min<int>(i, p.link[i]) : i; }

inline void clear_site(LinkPattern& p, int i) {
  p.link[i] = LinkPattern::kEmpty;
  p.left[i] = Mark::none;
  p.right[i] = Mark::none;
}

// Joins the components through the adjacent occupied sites i and i+1 (a cap).
// Returns false when the result vanishes; multiplies w by closed-loop weights.
template <class S>
bool cap(LinkPattern& p, int i, const LocalWeights<S>& w, S& factor) {
  const int j = i + 1;
  const std::int8_t li = p.link[i], lj = p.link[j];
  const int ai = anchor_of(p, i), aj = anchor_of(p, j);
  auto ml = combine(p.left[ai], p.left[aj]);
  auto mr = combine(p.right[ai], p.right[aj]);
  if (!ml || !mr) return false;
  if (li == j) {  // closes a loop
    factor *= w.loops[loop_kind(*ml, *mr)];
    clear_site(p, i);
    clear_site(p, j);
    return true;
  }
  if (li >= 0 && lj >= 0) {
    int k = li, m = lj;
    clear_site(p, i);
    clear_site(p, j);
    p.left[k] = p.left[m] = p.right[k] = p.right[m] = Mark::none;
    p.link[k] = std::int8_t(m);
    p.link[m] = std::int8_t(k);
    int a = std::min(k, m);
    p.left[a] = *ml;
    p.right[a] = *mr;
    return true;
  }
  if (li >= 0 || lj >= 0) {  // arc meets a defect: the defect moves to the far end
    int far = li >= 0 ? li : lj;
    std::int8_t code = li >= 0 ? lj : li;
    clear_site(p, i);
    clear_site(p, j);
    p.left[far] = p.right[far] = Mark::none;
    p.link[far] = code;
    p.left[far] = *ml;
    p.right[far] = *mr;
    return true;
  }
  // two defects
  if (li == LinkPattern::kString || lj == LinkPattern::kString) return false;
  if (*ml != Mark::none || *mr != Mark::none) throw std::logic_error("marked strand attached to an open wall");
  if (li == LinkPattern::kToLeft && lj == LinkPattern::kToLeft) factor *= w.left.nu;
  else if (li == LinkPattern::kToRight && lj == LinkPattern::kToRight) factor *= w.right.nu;
  else factor *= w.nu12;
  clear_site(p, i);
  clear_site(p, j);
  return true;
}

inline void move(LinkPattern& p, int from, int to) {
  std::int8_t l = p.link[from];
  bool carries_marks = anchor_of(p, from) == from;
  p.link[to] = l;
  if (l >= 0) p.link[l] = std::int8_t(to);
  if (carries_marks) {
    p.left[to] = p.left[from];
    p.right[to] = p.right[from];
  }
  p.link[from] = LinkPattern::kEmpty;
  p.left[from] = p.right[from] = Mark::none;
}

inline void cup(LinkPattern& p, int i) {
  p.link[i] = std::int8_t(i + 1);
  p.link[i + 1] = std::int8_t(i);
}

// Applies the blob (side 0 left, 1 right) to the component through site i.
inline bool mark(LinkPattern& p, int i, int side) {
  int a = anchor_of(p, i);
  Mark& m = side == 0 ? p.left[a] : p.right[a];
  auto c = combine(m, Mark::blob);
  if (!c) return false;
  m = *c;
  return true;
}

template <class S>
using Terms = std::vector<std::pair<LinkPattern, S>>;

template <class S>
void apply_plaquette(const Terms<S>& in, int i, const LocalWeights<S>& w, Terms<S>& out) {
  const auto& om = w.omega;
  for (const auto& [p, c] : in) {
    bool a = p.occupied(i), b = p.occupied(i + 1);
    if (!a && !b) {
      if (om[0] != S(0)) out.emplace_back(p, c * om[0]);
      if (om[2] != S(0)) {
        LinkPattern q = p;
        cup(q, i);
        out.emplace_back(q, c * om[2]);
      }
    } else if (a != b) {
      int from = a ? i : i + 1, to = a ? i + 1 : i;
      if (om[1] != S(0)) out.emplace_back(p, c * om[1]);
      if (om[3] != S(0)) {
        LinkPattern q = p;
        move(q, from, to);
        out.emplace_back(q, c * om[3]);
      }
    } else {
      if (om[4] != S(0)) out.emplace_back(p, c * om[4]);
      if (om[2] != S(0) || om[5] != S(0)) {
        LinkPattern q = p;
        S f(1);
        if (cap(q, i, w, f)) {
          if (om[2] != S(0)) out.emplace_back(q, c * f * om[2]);
          if (om[5] != S(0)) {
            LinkPattern r = q;
            cup(r, i);
            out.emplace_back(r, c * f * om[5]);
          }
        }
      }
    }
  }
}

template <class S>
void apply_side(const Terms<S>& in, int side, const SideWeights<S>& sw, const LocalWeights<S>& w, Terms<S>& out) {
  for (const auto& [p, c] : in) {
    const int s = side == 0 ? 0 : p.size - 1;
    if (!sw.open) {
      if (!p.occupied(s)) {
        if (sw.beta[0] != S(0)) out.emplace_back(p, c * sw.beta[0]);
        continue;
      }
      if (sw.beta[1] != S(0)) out.emplace_back(p, c * sw.beta[1]);
      if (sw.beta[2] != S(0)) {
        if (!sw.marked) {
          out.emplace_back(p, c * sw.beta[2]);
          continue;
        }
        LinkPattern q = p;
        if (mark(q, s, side)) out.emplace_back(q, c * sw.beta[2]);
      }
      continue;
    }
    const std::int8_t wall = side == 0 ? LinkPattern::kToLeft : LinkPattern::kToRight;
    if (!p.occupied(s)) {
      out.emplace_back(p, c);
      if (sw.end != S(0)) {
        LinkPattern q = p;
        q.link[s] = wall;
        out.emplace_back(q, c * sw.end);
      }
      continue;
    }
    if (sw.pass != S(0)) out.emplace_back(p, c * sw.pass);
    if (sw.end == S(0)) continue;
    LinkPattern q = p;
    std::int8_t l = q.link[s];
    int a = anchor_of(q, s);
    if (q.left[a] != Mark::none || q.right[a] != Mark::none)
      throw std::logic_error("marked strand reaching an open wall");
    S f = sw.end;
    if (l >= 0) {
      clear_site(q, s);
      q.left[l] = q.right[l] = Mark::none;
      q.link[l] = wall;
    } else if (l == LinkPattern::kString) {
      continue;
    } else {
      f *= (l == wall) ? sw.nu : w.nu12;
      clear_site(q, s);
    }
    out.emplace_back(q, c * f);
  }
}

// Expands unmarked exposed components into their blob and unblob parts.
template <class S>
void normalize(const LinkPattern& p, bool left_marked, bool right_marked, const S& c, Terms<S>& out) {
  int slots[2 * LinkPattern::kMaxSites];
  int count = 0;
  for (int i = 0; i < p.size; ++i) {
    if (!p.occupied(i) || anchor_of(p, i) != i) continue;
    if (p.link[i] != LinkPattern::kString && p.link[i] < 0) continue;
    bool lx = left_marked && p.left_exposed(i);
    bool rx = right_marked && p.right_exposed(i);
    if (p.left[i] != Mark::none && !lx) throw std::logic_error("left mark on unexposed component " + p.str());
    if (p.right[i] != Mark::none && !rx) throw std::logic_error("right mark on unexposed component " + p.str());
    if (p.link[i] == LinkPattern::kString) continue;  // sector marks are fixed
    if (lx && p.left[i] == Mark::none) slots[count++] = 2 * i;
    if (rx && p.right[i] == Mark::none) slots[count++] = 2 * i + 1;
  }
  for (int mask = 0; mask < (1 << count); ++mask) {
    LinkPattern q = p;
    for (int k = 0; k < count; ++k) {
      Mark m = (mask >> k) & 1 ? Mark::unblob : Mark::blob;
      int site = slots[k] / 2;
      (slots[k] % 2 ? q.right[site] : q.left[site]) = m;
    }
    out.emplace_back(q, c);
  }
}

template <class S>
Terms<S> apply_layer(const LinkPattern& p, const LayerPlan::Layer& layer, const LocalWeights<S>& w) {
  Terms<S> cur{{p, S(1)}}, next;
  for (int i : layer.plaquettes) {
    next.clear();
    apply_plaquette(cur, i, w, next);
    cur.swap(next);
  }
  if (layer.left) {
    next.clear();
    apply_side(cur, 0, w.left, w, next);
    cur.swap(next);
  }
  if (layer.right) {
    next.clear();
    apply_side(cur, 1, w.right, w, next);
    cur.swap(next);
  }
  bool lm = w.left.marked, rm = w.right.marked;
  std::map<LinkPattern::Key, std::pair<LinkPattern, S>> merged;
  Terms<S> expanded;
  for (const auto& [q, c] : cur) {
    expanded.clear();
    if (lm || rm) normalize(q, lm, rm, c, expanded);
    else expanded.emplace_back(q, c);
    for (const auto& [r, cr] : expanded) {
      auto [it, fresh] = merged.try_emplace(r.key(), r, cr);
      if (!fresh) it->second.second += cr;
    }
  }
  Terms<S> out;
  out.reserve(merged.size());
  for (auto& [k, v] : merged)
    if (v.second != S(0)) out.push_back(std::move(v));
  return out;
}

}  // namespace kernel

// <empty| T^rows |empty>, evolved without building a basis.
template <class S>
S partition_sum(const LayerPlan& plan, const LocalWeights<S>& w, int rows) {
  std::map<LinkPattern::Key, std::pair<LinkPattern, S>> state;
  LinkPattern empty(plan.width);
  state.emplace(empty.key(), std::make_pair(empty, S(1)));
  for (int t = 0; t < rows; ++t) {
    for (const auto* layer : {&plan.first, &plan.second}) {
      std::map<LinkPattern::Key, std::pair<LinkPattern, S>> next;
      for (const auto& [k, v] : state) {
        for (auto& [q, c] : kernel::apply_layer(v.first, *layer, w)) {
          auto [it, fresh] = next.try_emplace(q.key(), q, v.second * c);
          if (!fresh) it->second.second += v.second * c;
        }
      }
      state.swap(next);
    }
  }
  auto it = state.find(empty.key());
  return it == state.end() ? S(0) : it->second.second;
}

}  // namespace loopbc
