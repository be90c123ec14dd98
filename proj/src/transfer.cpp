#include <cmath>
#include <sstream>
#include <stdexcept>

#include "loopbc/transfer.hpp"

namespace loopbc {

BoundarySpec BoundarySpec::ordinary(double y) {
  BoundarySpec b;
  b.kind = Kind::ordinary;
  b.y = y;
  return b;
}

BoundarySpec BoundarySpec::special(double n) {
  BoundarySpec b = ordinary(honeycomb_points(n).y_S);
  b.kind = Kind::special;
  return b;
}

BoundarySpec BoundarySpec::anisotropic(double w_blob, double w_unblob, double n1) {
  BoundarySpec b;
  b.kind = Kind::anisotropic;
  b.w_blob = w_blob;
  b.w_unblob = w_unblob;
  b.n1 = n1;
  return b;
}

BoundarySpec BoundarySpec::as_point(double n, double n1, AsBranch branch) {
  auto w = as_point_weights(n, n1, branch);
  return anisotropic(w.w_blob, w.w_unblob, n1);
}

BoundarySpec BoundarySpec::open(double nu) {
  BoundarySpec b;
  b.kind = Kind::open;
  b.nu = nu;
  return b;
}

BoundarySpec BoundarySpec::kmatrix(const std::array<double, 3>& beta, double n1) {
  BoundarySpec b;
  b.kind = Kind::kmatrix;
  b.beta = beta;
  b.n1 = n1;
  return b;
}

bool BoundarySpec::marked() const {
  return kind == Kind::anisotropic || (kind == Kind::kmatrix && beta[2] != 0);
}

std::string BoundarySpec::str() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::ordinary: s << "ordinary(y=" << y << ")"; break;
    case Kind::special: s << "special(y=" << y << ")"; break;
    case Kind::anisotropic: s << "anisotropic(w_blob=" << w_blob << ",w_unblob=" << w_unblob << ",n1=" << n1 << ")"; break;
    case Kind::open: s << "open(nu=" << nu << ")"; break;
    case Kind::kmatrix: s << "kmatrix(" << beta[0] << "," << beta[1] << "," << beta[2] << ")"; break;
  }
  return s.str();
}

double TransferParams::monomer() const { return x > 0 ? x : honeycomb_points(n).x_c; }

namespace {

SideWeights<double> side_weights(const BoundarySpec& b, double x, double wall_edge) {
  SideWeights<double> s;
  switch (b.kind) {
    case BoundarySpec::Kind::ordinary:
    case BoundarySpec::Kind::special:
      s.beta = {1, b.y * b.y / x, 0};
      break;
    case BoundarySpec::Kind::anisotropic:
      s.marked = true;
      s.beta = {1, x * b.w_unblob, x * (b.w_blob - b.w_unblob)};
      break;
    case BoundarySpec::Kind::kmatrix:
      s.marked = b.beta[2] != 0;
      s.beta = b.beta;
      break;
    case BoundarySpec::Kind::open:
      s.open = true;
      s.pass = x;
      s.end = std::sqrt(x) * wall_edge;
      s.nu = b.nu;
      break;
  }
  return s;
}

}  // namespace

LocalWeights<double> local_weights(const TransferParams& p, const BoundarySpec& left, const BoundarySpec& right) {
  double x = p.monomer();
  LocalWeights<double> w;
  if (p.bulk) w.omega = *p.bulk;
  else w.omega = {1, x, x * x, x * x, x * x, 0};
  double edge = p.wall_edge < 0 ? x : p.wall_edge;
  w.left = side_weights(left, x, edge);
  w.right = side_weights(right, x, edge);
  if ((w.left.open && w.right.marked) || (w.right.open && w.left.marked))
    throw std::invalid_argument("an open wall cannot face a marked wall");
  LoopWeights lw{p.n, left.marked() ? left.n1 : p.n, right.marked() ? right.n1 : p.n, p.n12};
  if (!(left.marked() && right.marked())) {
    // one marked wall: the other side's symbol is never produced, keep it inert
    if (!right.marked()) lw.n12 = lw.n1;
    if (!left.marked()) lw.n12 = lw.n2;
  }
  w.loops = loop_weight_table(lw);
  w.nu12 = p.nu12;
  return w;
}

LinkPattern sector_seed(int n, const Sector& sector) {
  if (sector.strings < 0 || sector.strings > n) throw std::invalid_argument("string count out of range");
  LinkPattern p(n);
  for (int i = 0; i < sector.strings; ++i) p.link[i] = LinkPattern::kString;
  if (sector.strings > 0) {
    p.left[0] = sector.left;
    p.right[sector.strings - 1] = sector.right;
  } else if (sector.left != Mark::none || sector.right != Mark::none) {
    throw std::invalid_argument("the string-free sector carries no mark");
  }
  return p;
}

std::optional<std::size_t> TransferOperator::index_of(const LinkPattern& p) const {
  auto it = index_.find(p.key());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TransferOperator::nonzeros() const {
  std::size_t s = 0;
  for (const auto& f : factors_) s += f.nonZeros();
  return s;
}

Eigen::VectorXd TransferOperator::apply(const Eigen::VectorXd& v) const {
  Eigen::VectorXd a = v, b;
  for (const auto& f : factors_) {
    b.noalias() = f * a;
    a.swap(b);
  }
  return a;
}

Eigen::MatrixXd TransferOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dimension(), dimension());
  for (const auto& f : factors_) m = f * m;
  return m;
}

TransferOperator build_transfer(int n, const TransferParams& p, const BoundarySpec& left, const BoundarySpec& right,
                                const Sector& sector, bool boundary_first) {
  if (sector.left != Mark::none && !left.marked()) throw std::invalid_argument("left sector mark needs a marked wall");
  if (sector.right != Mark::none && !right.marked())
    throw std::invalid_argument("right sector mark needs a marked wall");
  if (sector.strings > 0 && left.marked() && sector.left == Mark::none)
    throw std::invalid_argument("strings next to a marked wall need a sector mark");
  if (sector.strings > 0 && right.marked() && sector.right == Mark::none)
    throw std::invalid_argument("strings next to a marked wall need a sector mark");

  TransferOperator t;
  t.plan_ = LayerPlan::standard(n, boundary_first);
  t.sector_ = sector;
  const LocalWeights<double> w = local_weights(p, left, right);

  // one single-operator layer per factor, in application order
  std::vector<LayerPlan::Layer> ops;
  for (const auto* layer : {&t.plan_.first, &t.plan_.second}) {
    for (int i : layer->plaquettes) ops.push_back({{i}, false, false});
    if (layer->left) ops.push_back({{}, true, false});
    if (layer->right) ops.push_back({{}, false, true});
  }

  // closure of the seed under every local operator
  LinkPattern seed = sector_seed(n, sector);
  t.basis_.push_back(seed);
  t.index_.emplace(seed.key(), 0);
  for (std::size_t head = 0; head < t.basis_.size(); ++head) {
    for (const auto& op : ops) {
      for (const auto& [q, c] : kernel::apply_layer(t.basis_[head], op, w))
        if (t.index_.try_emplace(q.key(), t.basis_.size()).second) t.basis_.push_back(q);
    }
  }
  const auto dim = Eigen::Index(t.basis_.size());
  for (const auto& op : ops) {
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index col = 0; col < dim; ++col)
      for (const auto& [q, c] : kernel::apply_layer(t.basis_[col], op, w))
        trip.emplace_back(Eigen::Index(t.index_.at(q.key())), col, c);
    TransferOperator::Sparse m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    t.factors_.push_back(std::move(m));
  }
  return t;
}

double free_energy_per_site(double lambda, int width) {
  if (!(lambda > 0)) throw std::domain_error("leading eigenvalue must be positive");
  return -std::log(lambda) / width;
}

}  // namespace loopbc
