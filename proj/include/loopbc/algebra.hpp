#pragma once
// Dilute Temperley-Lieb / blob diagram algebra.
//
// Loops touching the left boundary can carry the blob projector b or its
// complement u = 1-b; the same for the right boundary in two-boundary mode.
// A closed loop is weighted by its marks:
//   (none,none) n      (b,none) n1        (u,none) n-n1
//   (none,b) n2        (none,u) n-n2
//   (b,b) n12   (b,u) n1-n12   (u,b) n2-n12   (u,u) n-n1-n2+n12

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace loopbc {

using Rational = boost::multiprecision::cpp_rational;

struct LoopWeights {
  double n = 1.0;
  double n1 = 0.5;
  double n2 = 0.5;
  double n12 = 0.25;
};

// Polynomial in the independent symbols (n, n1, n2, n12) with rational
// coefficients. n-n1 and friends are sums, not separate symbols.
class WeightPolynomial {
 public:
  using Exponents = std::array<int, 4>;

  WeightPolynomial() = default;
  WeightPolynomial(const Rational& c);  // NOLINT: implicit constant
  WeightPolynomial(long c) : WeightPolynomial(Rational(c)) {}  // NOLINT

  static WeightPolynomial symbol(int index, int power = 1);
  static WeightPolynomial n() { return symbol(0); }
  static WeightPolynomial n1() { return symbol(1); }
  static WeightPolynomial n2() { return symbol(2); }
  static WeightPolynomial n12() { return symbol(3); }

  WeightPolynomial& operator+=(const WeightPolynomial& o);
  WeightPolynomial& operator-=(const WeightPolynomial& o);
  WeightPolynomial& operator*=(const WeightPolynomial& o);
  friend WeightPolynomial operator+(WeightPolynomial a, const WeightPolynomial& b) { return a += b; }
  friend WeightPolynomial operator-(WeightPolynomial a, const WeightPolynomial& b) { return a -= b; }
  friend WeightPolynomial operator*(WeightPolynomial a, const WeightPolynomial& b) { return a *= b; }
  WeightPolynomial operator-() const;
  bool operator==(const WeightPolynomial& o) const { return terms_ == o.terms_; }

  bool is_zero() const { return terms_.empty(); }
  double evaluate(const LoopWeights& w) const;
  Rational evaluate(const std::array<Rational, 4>& w) const;
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  std::string str() const;

 private:
  std::map<Exponents, Rational> terms_;
};

WeightPolynomial pow(const WeightPolynomial& p, int k);

enum class Mark : std::uint8_t { none = 0, blob = 1, unblob = 2 };

// Product of projectors on one loop; nullopt when b*u = 0.
std::optional<Mark> combine(Mark a, Mark b);

// Index 0..8 of a (left, right) mark pair, used for loop bookkeeping.
inline int loop_kind(Mark left, Mark right) { return 3 * int(left) + int(right); }
WeightPolynomial loop_weight(Mark left, Mark right);
double loop_weight(Mark left, Mark right, const LoopWeights& w);
std::array<double, 9> loop_weight_table(const LoopWeights& w);

enum class BoundaryMode { blobless, one_boundary, two_boundary };

// Half-diagram on N sites. link[i] is the partner site of an arc end, or one
// of the negative codes below. Marks of a component are stored at its
// leftmost site.
struct LinkPattern {
  static constexpr int kMaxSites = 16;
  static constexpr std::int8_t kEmpty = -1;
  static constexpr std::int8_t kString = -2;
  static constexpr std::int8_t kToLeft = -3;   // strand ending on the left boundary (open b.c.)
  static constexpr std::int8_t kToRight = -4;  // strand ending on the right boundary

  int size = 0;
  std::array<std::int8_t, kMaxSites> link{};
  std::array<Mark, kMaxSites> left{};
  std::array<Mark, kMaxSites> right{};

  LinkPattern() { link.fill(kEmpty); }
  explicit LinkPattern(int n) : size(n) { link.fill(kEmpty); }

  bool occupied(int i) const { return link[i] != kEmpty; }
  bool is_arc(int i) const { return link[i] >= 0; }
  int string_count() const;
  int leftmost_string() const;
  int rightmost_string() const;
  // Site i belongs to a component that can reach the left (right) wall.
  bool left_exposed(int i) const;
  bool right_exposed(int i) const;
  bool valid(BoundaryMode mode, std::string* why = nullptr) const;

  using Key = unsigned __int128;
  Key key() const;
  static LinkPattern from_key(Key k, int n);

  // Bracket notation: ( ) arc ends, . empty, | string, < > strands ending on
  // the left/right wall. A left mark follows the opening symbol as b or u,
  // a right mark as B or U.  Example: "(b.)|u(B)".
  std::string str() const;
  static LinkPattern parse(std::string_view s);

  bool operator==(const LinkPattern& o) const { return key() == o.key() && size == o.size; }
};

struct Sector {
  int strings = 0;
  Mark left = Mark::none;   // mark carried by the leftmost string
  Mark right = Mark::none;  // mark carried by the rightmost string
  bool operator<(const Sector& o) const {
    return std::tie(strings, left, right) < std::tie(o.strings, o.left, o.right);
  }
  bool operator==(const Sector& o) const = default;
};

// All sectors that exist on N sites for the given mode.
std::vector<Sector> sectors(int n, BoundaryMode mode, bool dilute);

// Canonical ordered basis of a sector. In marked modes every exposed arc
// carries b or u (never none); non-exposed arcs are unmarked.
std::vector<LinkPattern> enumerate_basis(int n, const Sector& sector, BoundaryMode mode, bool dilute);
// Convenience overload: all sectors with the given string count.
std::vector<LinkPattern> enumerate_basis(int n, int strings, BoundaryMode mode, bool dilute);

// Diagram on a rectangle with N bottom points (0..N-1) and N top points
// (N..2N-1). Marks of a connection sit at its lower-indexed point.
struct Diagram {
  static constexpr int kMaxPoints = 2 * LinkPattern::kMaxSites;
  int size = 0;
  std::array<std::int8_t, kMaxPoints> link{};
  std::array<Mark, kMaxPoints> left{};
  std::array<Mark, kMaxPoints> right{};
  WeightPolynomial weight{Rational(1)};

  Diagram() { link.fill(-1); }
  explicit Diagram(int n) : size(n) { link.fill(-1); }

  int top(int i) const { return size + i; }
  bool occupied(int p) const { return link[p] >= 0; }
  bool bottom_occupied(int i) const { return link[i] >= 0; }
  bool top_occupied(int i) const { return link[size + i] >= 0; }

  void connect(int a, int b, Mark l = Mark::none, Mark r = Mark::none);
  bool left_exposed(int p) const;
  bool right_exposed(int p) const;
  bool planar() const;

  // Connectivity and marks only (weight excluded).
  std::string key() const;
  std::string str() const;
};

namespace diagrams {
// Dilute identity with the given occupation (bit i set = site i occupied).
Diagram identity(int n, std::uint32_t occupation);
Diagram identity(int n);
Diagram e(int n, int i);             // TL generator on sites i, i+1
Diagram blob(int n, Mark m);         // left mark on site 0
Diagram right_blob(int n, Mark m);   // right mark on site n-1
}  // namespace diagrams

// Result of stacking d2 on top of d1: connectivity plus per-kind loop counts.
struct Composition {
  bool zero = false;  // b*u on some strand, or strings contracted
  Diagram diagram;    // weight left at 1
  std::array<int, 9> loops{};
};

// Throws std::invalid_argument on mismatched interface occupation.
Composition compose_shapes(const Diagram& lower, const Diagram& upper);
// Full product including weights; zero result has weight 0.
Diagram compose(const Diagram& lower, const Diagram& upper);

// Closes top i to bottom i for every site (annulus closure).
WeightPolynomial markov_trace(const Diagram& d);

// Action of a diagram (placed above) on a half-diagram. Outputs are in normal
// form for the mode; weights are polynomials.
std::vector<std::pair<LinkPattern, WeightPolynomial>> act(const Diagram& d, const LinkPattern& p,
                                                          BoundaryMode mode);

// Ordinary trace over the enumerated sector basis.
WeightPolynomial sector_trace(const Diagram& d, const Sector& sector, BoundaryMode mode, bool dilute);

}  // namespace loopbc
