#include <algorithm>
#include <functional>
#include <stdexcept>

#include "loopbc/algebra.hpp"

namespace loopbc {

namespace {

bool is_defect(std::int8_t l) { return l == LinkPattern::kString || l == LinkPattern::kToLeft || l == LinkPattern::kToRight; }

// first site of the component through i
int anchor(const LinkPattern& p, int i) { return p.link[i] >= 0 ? std::min<int>(i, p.link[i]) : i; }

}  // namespace

int LinkPattern::string_count() const {
  int c = 0;
  for (int i = 0; i < size; ++i) c += link[i] == kString;
  return c;
}

int LinkPattern::leftmost_string() const {
  for (int i = 0; i < size; ++i)
    if (link[i] == kString) return i;
  return -1;
}

int LinkPattern::rightmost_string() const {
  for (int i = size - 1; i >= 0; --i)
    if (link[i] == kString) return i;
  return -1;
}

bool LinkPattern::left_exposed(int i) const {
  if (link[i] == kEmpty) return false;
  if (link[i] == kToLeft) return true;
  int a = anchor(*this, i);
  int b = link[i] >= 0 ? std::max<int>(i, link[i]) : i;
  for (int s = 0; s < a; ++s) {
    if (is_defect(link[s])) return false;
    if (link[s] > b) return false;  // encloses
  }
  return true;
}

bool LinkPattern::right_exposed(int i) const {
  if (link[i] == kEmpty) return false;
  if (link[i] == kToRight) return true;
  int a = anchor(*this, i);
  int b = link[i] >= 0 ? std::max<int>(i, link[i]) : i;
  for (int s = size - 1; s > b; --s) {
    if (is_defect(link[s])) return false;
    if (link[s] >= 0 && link[s] < a) return false;
  }
  return true;
}

bool LinkPattern::valid(BoundaryMode mode, std::string* why) const {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (size < 0 || size > kMaxSites) return fail("size out of range");
  for (int i = 0; i < size; ++i) {
    int l = link[i];
    if (l >= 0) {
      if (l >= size || l == i || link[l] != i) return fail("pairing is not an involution");
      for (int k = std::min(i, l) + 1; k < std::max(i, l); ++k) {
        if (is_defect(link[k])) return fail("defect enclosed by an arc");
        if (link[k] >= 0 && (link[k] < std::min(i, l) || link[k] > std::max(i, l)))
          return fail("crossing arcs");
      }
    } else if (l < kToRight) {
      return fail("bad site code");
    }
    bool first = anchor(*this, i) == i;
    if (!first && (left[i] != Mark::none || right[i] != Mark::none)) return fail("mark not on component anchor");
    if (left[i] != Mark::none) {
      if (mode == BoundaryMode::blobless) return fail("left mark in blobless mode");
      if (!left_exposed(i)) return fail("left mark on unexposed component");
      if (link[i] == kString && leftmost_string() != i) return fail("left mark on inner string");
    }
    if (right[i] != Mark::none) {
      if (mode != BoundaryMode::two_boundary) return fail("right mark outside two-boundary mode");
      if (!right_exposed(i)) return fail("right mark on unexposed component");
      if (link[i] == kString && rightmost_string() != i) return fail("right mark on inner string");
    }
  }
  return true;
}

LinkPattern::Key LinkPattern::key() const {
  Key k = 0;
  for (int i = 0; i < size; ++i) {
    unsigned code;
    int l = link[i];
    if (l == kEmpty) code = 0;
    else if (l >= 0) code = l > i ? 1 : 2;
    else if (l == kString) code = 3;
    else if (l == kToLeft) code = 4;
    else code = 5;
    code |= unsigned(left[i]) << 3;
    code |= unsigned(right[i]) << 5;
    k |= Key(code) << (7 * i);
  }
  return k;
}

LinkPattern LinkPattern::from_key(Key k, int n) {
  LinkPattern p(n);
  int stack[kMaxSites];
  int top = 0;
  for (int i = 0; i < n; ++i) {
    unsigned code = unsigned(k >> (7 * i)) & 0x7f;
    p.left[i] = Mark((code >> 3) & 3);
    p.right[i] = Mark((code >> 5) & 3);
    switch (code & 7) {
      case 0: p.link[i] = kEmpty; break;
      case 1: stack[top++] = i; break;
      case 2: {
        int j = stack[--top];
        p.link[i] = std::int8_t(j);
        p.link[j] = std::int8_t(i);
        break;
      }
      case 3: p.link[i] = kString; break;
      case 4: p.link[i] = kToLeft; break;
      default: p.link[i] = kToRight; break;
    }
  }
  return p;
}

std::string LinkPattern::str() const {
  std::string s;
  for (int i = 0; i < size; ++i) {
    int l = link[i];
    if (l == kEmpty) s += '.';
    else if (l >= 0) s += l > i ? '(' : ')';
    else if (l == kString) s += '|';
    else if (l == kToLeft) s += '<';
    else s += '>';
    if (left[i] == Mark::blob) s += 'b';
    if (left[i] == Mark::unblob) s += 'u';
    if (right[i] == Mark::blob) s += 'B';
    if (right[i] == Mark::unblob) s += 'U';
  }
  return s;
}

LinkPattern LinkPattern::parse(std::string_view s) {
  LinkPattern p;
  int stack[kMaxSites];
  int top = 0;
  int i = -1;
  for (char c : s) {
    if (c == 'b' || c == 'u' || c == 'B' || c == 'U') {
      if (i < 0) throw std::invalid_argument("mark before any site");
      Mark m = (c == 'b' || c == 'B') ? Mark::blob : Mark::unblob;
      int a = p.link[i] >= 0 ? std::min<int>(i, p.link[i]) : i;
      (c == 'b' || c == 'u' ? p.left[a] : p.right[a]) = m;
      continue;
    }
    if (c == ' ') continue;
    ++i;
    if (i >= kMaxSites) throw std::invalid_argument("too many sites");
    switch (c) {
      case '.': p.link[i] = kEmpty; break;
      case '(': stack[top++] = i; p.link[i] = kEmpty; break;
      case ')': {
        if (top == 0) throw std::invalid_argument("unbalanced ')'");
        int j = stack[--top];
        p.link[i] = std::int8_t(j);
        p.link[j] = std::int8_t(i);
        break;
      }
      case '|': p.link[i] = kString; break;
      case '<': p.link[i] = kToLeft; break;
      case '>': p.link[i] = kToRight; break;
      default: throw std::invalid_argument(std::string("unknown symbol ") + c);
    }
  }
  if (top != 0) throw std::invalid_argument("unbalanced '('");
  p.size = i + 1;
  return p;
}

std::vector<Sector> sectors(int n, BoundaryMode mode, bool dilute) {
  std::vector<Sector> out;
  for (int L = 0; L <= n; ++L) {
    if (!dilute && (n - L) % 2) continue;
    if (L == 0 || mode == BoundaryMode::blobless) {
      out.push_back({L, Mark::none, Mark::none});
      continue;
    }
    for (Mark l : {Mark::blob, Mark::unblob}) {
      if (mode == BoundaryMode::one_boundary) {
        out.push_back({L, l, Mark::none});
      } else {
        for (Mark r : {Mark::blob, Mark::unblob}) out.push_back({L, l, r});
      }
    }
  }
  return out;
}

std::vector<LinkPattern> enumerate_basis(int n, const Sector& sector, BoundaryMode mode, bool dilute) {
  if (sector.strings > n || sector.strings < 0) throw std::invalid_argument("string count exceeds site count");
  if (n > LinkPattern::kMaxSites) throw std::invalid_argument("too many sites");
  std::vector<LinkPattern> shapes;
  LinkPattern cur(n);
  int stack[LinkPattern::kMaxSites];
  std::function<void(int, int, int)> rec = [&](int i, int depth, int strings) {
    int remaining = n - i;
    if (depth > remaining) return;
    if (i == n) {
      if (depth == 0 && strings == sector.strings) shapes.push_back(cur);
      return;
    }
    if (dilute) {
      cur.link[i] = LinkPattern::kEmpty;
      rec(i + 1, depth, strings);
    }
    if (depth == 0 && strings < sector.strings) {
      cur.link[i] = LinkPattern::kString;
      rec(i + 1, depth, strings + 1);
    }
    stack[depth] = i;
    cur.link[i] = LinkPattern::kEmpty;
    rec(i + 1, depth + 1, strings);
    if (depth > 0) {
      int j = stack[depth - 1];
      cur.link[i] = std::int8_t(j);
      cur.link[j] = std::int8_t(i);
      rec(i + 1, depth - 1, strings);
      cur.link[j] = LinkPattern::kEmpty;
      stack[depth - 1] = j;
    }
    cur.link[i] = LinkPattern::kEmpty;
  };
  rec(0, 0, 0);

  std::vector<LinkPattern> out;
  for (const LinkPattern& s : shapes) {
    // sites that need a mark choice
    std::vector<std::pair<int, bool>> slots;  // (anchor site, left side?)
    LinkPattern base = s;
    int ls = s.leftmost_string(), rs = s.rightmost_string();
    if (mode != BoundaryMode::blobless) {
      for (int i = 0; i < n; ++i) {
        if (s.link[i] > i && s.left_exposed(i)) slots.push_back({i, true});
        if (mode == BoundaryMode::two_boundary && s.link[i] > i && s.right_exposed(i)) slots.push_back({i, false});
      }
      if (ls >= 0) base.left[ls] = sector.left;
      if (rs >= 0 && mode == BoundaryMode::two_boundary) base.right[rs] = sector.right;
    }
    std::size_t combos = std::size_t(1) << slots.size();
    for (std::size_t m = 0; m < combos; ++m) {
      LinkPattern p = base;
      for (std::size_t k = 0; k < slots.size(); ++k) {
        Mark mk = (m >> k) & 1 ? Mark::unblob : Mark::blob;
        (slots[k].second ? p.left : p.right)[slots[k].first] = mk;
      }
      out.push_back(p);
    }
  }
  auto order = [](const LinkPattern& a, const LinkPattern& b) {
    auto kinds = [](const LinkPattern& p) {
      std::array<int, LinkPattern::kMaxSites> k{};
      for (int i = 0; i < p.size; ++i) k[i] = p.link[i] < 0 ? p.link[i] == LinkPattern::kEmpty ? 0 : 2 : 1;
      return k;
    };
    auto ka = kinds(a), kb = kinds(b);
    if (ka != kb) return ka < kb;
    if (a.link != b.link) return a.link < b.link;
    if (a.left != b.left) return a.left < b.left;
    return a.right < b.right;
  };
  std::sort(out.begin(), out.end(), order);
  return out;
}

std::vector<LinkPattern> enumerate_basis(int n, int strings, BoundaryMode mode, bool dilute) {
  std::vector<LinkPattern> all;
  for (const Sector& s : sectors(n, mode, dilute)) {
    if (s.strings != strings) continue;
    auto b = enumerate_basis(n, s, mode, dilute);
    all.insert(all.end(), b.begin(), b.end());
  }
  return all;
}

}  // namespace loopbc
