// predict, verify, transfer, mc and tba subcommands.

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <random>

#include "cli.hpp"
#include "loopbc/cft.hpp"
#include "loopbc/integrable.hpp"
#include "loopbc/markov.hpp"
#include "loopbc/mc_ising.hpp"
#include "loopbc/tba.hpp"
#include "loopbc/transfer.hpp"

namespace loopbc::cli {

namespace {

using std::numbers::pi;

void begin(Context& ctx, const std::string& command, ordered_json params) {
  ctx.command = command;
  ctx.parameters = std::move(params);
}

void finish(Context& ctx, const ordered_json& summary) {
  ctx.write_manifest();
  emit(ctx, summary);
}

Mark parse_mark(const std::string& s) {
  if (s == "none") return Mark::none;
  if (s == "blob" || s == "b") return Mark::blob;
  if (s == "unblob" || s == "u") return Mark::unblob;
  throw std::invalid_argument("unknown mark '" + s + "' (none, blob, unblob)");
}

// Every monomial of a q-series sum, merged by exponent.
std::map<double, double> monomials(const QSum& s) {
  std::map<double, double> out;
  auto add = [&](double e, double c) {
    auto it = out.lower_bound(e - 1e-9);
    if (it != out.end() && std::abs(it->first - e) < 1e-9)
      it->second += c;
    else
      out[e] = c;
  };
  for (const auto& t : s.terms)
    for (std::size_t k = 0; k < t.coeff.size(); ++k)
      if (t.coeff[k] != 0) add(t.exponent + double(k), t.coeff[k]);
  return out;
}

void write_series(Context& ctx, const QSum& s, const std::string& title, const std::string& file) {
  Table t(title, {{"power", "exponent of q = exp(-pi tau)"}, {"coefficient", "coefficient of q^power"}});
  t.note(format("truncation order %d above the leading power", s.order));
  for (auto [e, c] : monomials(s))
    if (std::abs(c) > 1e-14) t.row({num(e), num(c)});
  t.write(ctx, file);
}

ordered_json coulomb_json(const CoulombParams& p) {
  return {{"n", p.n}, {"gamma", p.gamma}, {"g", p.g}, {"c", p.c}, {"dense", p.dense},
          {"r1", p.r1}, {"r2", p.r2}, {"r12", p.r12}, {"n1", p.n1}, {"n2", p.n2}, {"n12", p.n12}};
}

// ---------------------------------------------------------------- predict

struct CoulombOpts {
  double n = std::sqrt(2.0), r1 = 1, r2 = 1, r12 = 1;
  bool dense = false;
  void add(CLI::App* c) {
    c->add_option("--n", n, "loop weight n = 2 cos gamma")->capture_default_str();
    c->add_option("--r1", r1, "left blob label, n1 = sin((r1+1) gamma)/sin(r1 gamma)")->capture_default_str();
    c->add_option("--r2", r2, "right blob label")->capture_default_str();
    c->add_option("--r12", r12, "label of loops touching both walls")->capture_default_str();
    c->add_flag("--dense", dense, "dense branch g = 1 - gamma/pi");
  }
  CoulombParams params() const { return CoulombParams::from_n(n, dense).with_r(r1, r2, r12); }
};

void add_predict(CLI::App& app, Context& ctx) {
  auto* pr = app.add_subcommand("predict", "boundary CFT predictions")->require_subcommand(1);

  {
    auto o = std::make_shared<std::array<double, 3>>(std::array<double, 3>{0, 1, 1});
    auto* c = pr->add_subcommand("kac", "Kac weight h_{r,s} = ((g r - s)^2 - (g-1)^2) / (4 g)");
    c->add_option("--g", (*o)[0], "Coulomb-gas coupling g > 0")->required()->check(CLI::PositiveNumber);
    c->add_option("--r", (*o)[1], "first Kac label (real)")->required();
    c->add_option("--s", (*o)[2], "second Kac label (real)")->required();
    c->callback([&ctx, o] {
      auto [g, r, s] = *o;
      begin(ctx, "predict kac", {{"g", g}, {"r", r}, {"s", s}});
      double h = kac_weight(r, s, g), c = central_charge(g);
      finish(ctx, {{"h", h}, {"c", c}, {"c_minus_24h", c - 24 * h}});
    });
  }

  {
    auto o = std::make_shared<CoulombOpts>();
    auto b = std::make_shared<std::string>("all");
    auto* c = pr->add_subcommand("gfactor", "boundary entropy g-factors");
    o->add(c);
    c->add_option("--boundary", *b, "ord, sp, asb, asu, open or all")->capture_default_str();
    c->callback([&ctx, o, b] {
      auto p = o->params();
      begin(ctx, "predict gfactor", {{"coulomb", coulomb_json(p)}, {"boundary", *b}});
      ordered_json out;
      for (std::string name : {"ord", "sp", "asb", "asu", "open"})
        if (*b == "all" || *b == name || parse_boundary(*b) == parse_boundary(name)) out[name] = gfactor(parse_boundary(name), p);
      finish(ctx, {{"g", out}});
    });
  }

  struct SeriesOpts {
    CoulombOpts cg;
    std::string pair = "ord/ord", left = "none", right = "none", out;
    int strings = 0, order = 40;
    double tau = 0;
  };
  auto add_series = [](CLI::App* c, SeriesOpts& o) {
    o.cg.add(c);
    c->add_option("--pair", o.pair, "ord/ord, sp/ord, asb/ord, asu/ord, as/as, open/ord, open/open")->capture_default_str();
    c->add_option("--order", o.order, "q-order kept above the leading power")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--tau", o.tau, "evaluate at q = exp(-pi tau) when > 0");
    c->add_option("--out", o.out, "CSV of (power, coefficient)");
  };

  {
    auto o = std::make_shared<SeriesOpts>();
    auto* c = pr->add_subcommand("character", "sector character as a q-series");
    add_series(c, *o);
    c->add_option("--strings", o->strings, "number of through-lines L")->capture_default_str();
    c->add_option("--left-mark", o->left, "mark of the leftmost string: none, blob, unblob")->capture_default_str();
    c->add_option("--right-mark", o->right, "mark of the rightmost string")->capture_default_str();
    c->callback([&ctx, o] {
      auto p = o->cg.params();
      Sector s{o->strings, parse_mark(o->left), parse_mark(o->right)};
      begin(ctx, "predict character",
            {{"pair", o->pair}, {"coulomb", coulomb_json(p)}, {"strings", o->strings}, {"left_mark", o->left},
             {"right_mark", o->right}});
      ctx.truncation["order"] = o->order;
      auto q = character(parse_pair(o->pair), s, p, o->order);
      ordered_json sum{{"leading_exponent", q.leading_exponent()}, {"order", q.order}};
      if (o->tau > 0) {
        double x = std::exp(-pi * o->tau);
        sum["tau"] = o->tau;
        sum["value"] = q.evaluate(x);
        sum["tail_bound"] = q.tail_bound(x);
      }
      if (!o->out.empty()) write_series(ctx, q, "character " + o->pair, o->out);
      finish(ctx, sum);
    });
  }

  {
    auto o = std::make_shared<SeriesOpts>();
    o->tau = 4;
    auto* c = pr->add_subcommand("partition", "annulus partition function in both channels");
    add_series(c, *o);
    c->callback([&ctx, o] {
      auto p = o->cg.params();
      const auto pair = parse_pair(o->pair);
      begin(ctx, "predict partition", {{"pair", o->pair}, {"coulomb", coulomb_json(p)}, {"tau", o->tau}});
      ctx.truncation["order"] = o->order;
      auto z = annulus_partition(pair, p, o->order);
      ordered_json sum{{"leading_exponent", z.leading_exponent()}};
      if (o->tau > 0) {
        const double x = std::exp(-pi * o->tau);
        sum["tau"] = o->tau;
        sum["open_channel"] = z.evaluate(x);
        sum["tail_bound"] = z.tail_bound(x);
        if (pair != BcPair::as_as && pair != BcPair::open_open) {
          auto chk = gfactor_consistency(pair, p, o->tau, o->order);
          sum["closed_channel"] = chk.closed;
          sum["relative_difference"] = chk.relative;
          sum["long_cylinder_ratio"] = chk.long_cylinder_ratio;
        }
      }
      if (!o->out.empty()) write_series(ctx, z, "annulus partition function " + o->pair, o->out);
      finish(ctx, sum);
    });
  }

  {
    auto model = std::make_shared<std::string>("ising");
    auto taus = std::make_shared<std::string>("1.1547005383792515");
    auto out = std::make_shared<std::string>();
    auto* c = pr->add_subcommand("crossing", "probability that a cluster boundary crosses the annulus");
    c->add_option("--model", *model, "ising or percolation")->capture_default_str();
    c->add_option("--tau", *taus, "aspect ratio T/L (periodic length over width): value, list or a:b:steps")
        ->capture_default_str();
    c->add_option("--out", *out, "CSV file");
    c->callback([&ctx, model, taus, out] {
      auto grid = parse_grid(*taus);
      begin(ctx, "predict crossing", {{"model", *model}, {"tau", grid}});
      if (*model != "ising" && *model != "percolation") throw std::invalid_argument("unknown model " + *model);
      Table t("crossing probability, " + *model,
              {{"tau", "T/L, periodic length over the distance between the free edges"},
               {"p_eta", "eta-ratio closed form"},
               {"p_characters", "character-ratio form (ising) or the eta form again (percolation)"}});
      ordered_json rows = ordered_json::array();
      double worst = 0;
      for (double tau : grid) {
        double a, b;
        if (*model == "ising") {
          a = crossing_probability_ising(tau);
          b = crossing_probability_ising_characters(tau);
        } else {
          a = b = crossing_probability_percolation(tau);
        }
        worst = std::max(worst, std::abs(a - b));
        t.row({num(tau), num(a), num(b)});
        rows.push_back({{"tau", tau}, {"p", a}, {"p_characters", b}});
      }
      if (worst > 1e-10)
        throw NumericalFailure("crossing formulas disagree", {{"max_difference", worst}, {"points", rows}});
      if (!out->empty()) t.write(ctx, *out);
      finish(ctx, {{"points", rows}, {"max_form_difference", worst}});
    });
  }

  {
    auto o = std::make_shared<CoulombOpts>();
    auto* c = pr->add_subcommand("fractal", "fractal dimensions, crossover exponent, crossing density");
    o->add(c);
    c->callback([&ctx, o] {
      auto p = o->params();
      begin(ctx, "predict fractal", {{"coulomb", coulomb_json(p)}});
      auto f = fractal_dimensions(p);
      ordered_json pert;
      for (std::string pt : {"ord", "sp-anisotropic", "sp-isotropic", "as"}) {
        auto d = perturbation_data(pt, p);
        pert[pt] = {{"operator", d.label}, {"rg_eigenvalue", d.rg_eigenvalue}};
      }
      finish(ctx, {{"ordinary", f.ordinary},
                   {"special", f.special},
                   {"as_blob_loop", f.as_blob_loop},
                   {"as_unblob_loop", f.as_unblob_loop},
                   {"bulk", f.bulk},
                   {"crossover_exponent", crossover_exponent(p.g)},
                   {"crossings_per_length", mean_crossings_per_length(p)},
                   {"perturbations", pert}});
    });
  }
}

// ---------------------------------------------------------------- verify

// 0 < 4 Phi < pi with sin 4 kappa Phi away from zero
struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  SpectralParams params() {
    SpectralParams p;
    p.Phi = uniform(0.05, pi / 4 - 0.02);
    do p.kappa = uniform(0.1, 3.0);
    while (std::abs(std::sin(4 * p.kappa * p.Phi)) < 0.05);
    p.u = uniform(-1, 1);
    return p;
  }
};

struct VerifyOpts {
  int trials = 100;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::string variant = "all";
};

void report(Context& ctx, ordered_json rep, double residual, double tol) {
  rep["max_residual"] = residual;
  rep["tolerance"] = tol;
  rep["pass"] = residual < tol;
  if (!(residual < tol)) throw NumericalFailure(ctx.command + " residual above tolerance", rep);
  ctx.json = true;
  finish(ctx, rep);
}

std::vector<KVariant> variants(const std::string& s) {
  if (s == "all") return {KVariant::BY1, KVariant::BY2, KVariant::BLOB1, KVariant::BLOB2};
  return {parse_variant(s)};
}

void add_verify(CLI::App& app, Context& ctx) {
  auto* ve = app.add_subcommand("verify", "equation-level checks with a JSON residual report")->require_subcommand(1);
  auto common = [](CLI::App* c, VerifyOpts& o, double tol) {
    o.tol = tol;
    c->add_option("--trials", o.trials, "random parameter draws")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    c->add_option("--tol", o.tol, "pass threshold on the max residual")->capture_default_str();
  };

  {
    auto o = std::make_shared<VerifyOpts>();
    auto* c = ve->add_subcommand("ybe", "Yang-Baxter equation of the bulk R-matrix");
    common(c, *o, 1e-12);
    c->callback([&ctx, o] {
      begin(ctx, "verify ybe", {{"trials", o->trials}});
      ctx.seeds["draws"] = o->seed;
      Draw d(o->seed);
      double worst = 0;
      ordered_json at;
      for (int t = 0; t < o->trials; ++t) {
        auto p = d.params();
        double u = d.uniform(-1, 1), v = d.uniform(-1, 1), r = ybe_residual(p.Phi, u, v);
        if (!(r <= worst)) worst = r, at = {{"Phi", p.Phi}, {"u", u}, {"v", v}};
      }
      report(ctx, {{"check", "ybe"}, {"trials", o->trials}, {"seed", o->seed}, {"worst_at", at}}, worst, o->tol);
    });
  }

  for (bool crossing : {false, true}) {
    auto o = std::make_shared<VerifyOpts>();
    auto* c = crossing ? ve->add_subcommand("crossing", "boundary crossing relation of the K-matrices")
                       : ve->add_subcommand("reflection", "reflection equation of the K-matrices");
    common(c, *o, 1e-12);
    c->add_option("--variant", o->variant, "BY1, BY2, BLOB1, BLOB2 or all")->capture_default_str();
    c->callback([&ctx, o, crossing] {
      const std::string name = crossing ? "crossing" : "reflection";
      begin(ctx, "verify " + name, {{"trials", o->trials}, {"variant", o->variant}});
      ctx.seeds["draws"] = o->seed;
      Draw d(o->seed);
      double worst = 0;
      ordered_json per = ordered_json::object();
      for (KVariant v : variants(o->variant)) {
        double w = 0;
        for (int t = 0; t < o->trials; ++t) {
          auto p = d.params();
          double a = d.uniform(-1, 1), b = d.uniform(-1, 1);
          double r = crossing ? boundary_crossing_residual(p, v) : reflection_residual(p, a, b, v);
          if (!(r <= w)) w = r;
        }
        per[to_string(v)] = w;
        if (!(w <= worst)) worst = w;
      }
      report(ctx, {{"check", name}, {"trials", o->trials}, {"seed", o->seed}, {"per_variant", per}}, worst, o->tol);
    });
  }

  {
    auto o = std::make_shared<VerifyOpts>();
    auto sites = std::make_shared<int>(6);
    auto mode = std::make_shared<std::string>("blobless");
    auto dilute = std::make_shared<bool>(false);
    auto exact = std::make_shared<bool>(false);
    auto w = std::make_shared<LoopWeights>(LoopWeights{1.3, 0.55, 0.8, 0.31});
    auto* c = ve->add_subcommand("markov", "Markov trace equals the quantum-dimension weighted sector traces");
    common(c, *o, 1e-10);
    c->add_option("--N", *sites, "number of sites")->capture_default_str()->check(CLI::Range(1, 12));
    c->add_option("--mode", *mode, "blobless, one-boundary or two-boundary")->capture_default_str();
    c->add_flag("--dilute", *dilute, "dilute diagrams (empty sites allowed)");
    c->add_flag("--exact", *exact, "every TL_N diagram in rational arithmetic (blobless, dense)");
    c->add_option("--loop-n", w->n, "numeric n")->capture_default_str();
    c->add_option("--loop-n1", w->n1, "numeric n1")->capture_default_str();
    c->add_option("--loop-n2", w->n2, "numeric n2")->capture_default_str();
    c->add_option("--loop-n12", w->n12, "numeric n12")->capture_default_str();
    c->callback([&ctx, o, sites, mode, dilute, exact, w] {
      begin(ctx, "verify markov", {{"N", *sites}, {"mode", *mode}, {"dilute", *dilute}, {"exact", *exact},
                                   {"weights", {w->n, w->n1, w->n2, w->n12}}, {"trials", o->trials}});
      if (*exact) {
        int count = 0, defects = 0;
        for (const Diagram& d : all_tl_diagrams(*sites)) {
          ++count;
          defects += !markov_defect(d, BoundaryMode::blobless, false).is_zero();
        }
        report(ctx, {{"check", "markov-exact"}, {"diagrams", count}, {"defects", defects}}, defects, 0.5);
        return;
      }
      BoundaryMode m = *mode == "blobless"       ? BoundaryMode::blobless
                       : *mode == "one-boundary" ? BoundaryMode::one_boundary
                       : *mode == "two-boundary" ? BoundaryMode::two_boundary
                                                 : throw std::invalid_argument("unknown mode " + *mode);
      ctx.seeds["words"] = o->seed;
      auto rep = markov_identity_check(*sites, o->trials, o->seed, m, *w, *dilute);
      report(ctx, {{"check", "markov"}, {"diagrams", rep.diagrams}, {"max_lhs", rep.max_lhs}}, rep.max_residual,
             o->tol);
    });
  }

  {
    auto o = std::make_shared<VerifyOpts>();
    auto grid = std::make_shared<int>(20);
    auto* c = ve->add_subcommand("as-point", "algebraic and trigonometric AS-point weights agree");
    common(c, *o, 1e-10);
    c->add_option("--grid", *grid, "points per axis of the (n, n1/n) grid")->capture_default_str();
    c->callback([&ctx, o, grid] {
      begin(ctx, "verify as-point", {{"grid", *grid}});
      double worst = 0;
      for (int i = 0; i < *grid; ++i) {
        double n = 0.05 + 1.9 * i / std::max(1, *grid - 1);
        for (int j = 0; j < *grid; ++j) {
          double n1 = n * (0.02 + 0.96 * j / std::max(1, *grid - 1));
          for (AsBranch b : {AsBranch::blob, AsBranch::unblob}) {
            double m = as_point_weights(n, n1, b).mismatch;
            if (!(m <= worst)) worst = m;
          }
        }
      }
      report(ctx, {{"check", "as-point"}, {"points", 2 * *grid * *grid}}, worst, o->tol);
    });
  }
}

// ---------------------------------------------------------------- transfer

struct TransferOpts {
  double n = std::sqrt(2.0);
  std::string widths = "4..10", out;
};

void add_transfer(CLI::App& app, Context& ctx) {
  auto* tr = app.add_subcommand("transfer", "strip transfer matrices and finite-size scaling")->require_subcommand(1);
  auto common = [](CLI::App* c, TransferOpts& o, const std::string& out) {
    o.out = out;
    c->add_option("--n", o.n, "loop weight")->capture_default_str();
    c->add_option("--L", o.widths, "strip widths a..b or a list")->capture_default_str();
    c->add_option("--out", o.out, "CSV file")->capture_default_str();
  };
  const std::vector<Table::Column> width_cols{{"width", "strip width N in strands"},
                                              {"lambda", "leading transfer-matrix eigenvalue"},
                                              {"f", "free energy per strand -log(lambda)/N"}};

  {
    auto o = std::make_shared<TransferOpts>();
    auto ys = std::make_shared<std::string>("0.2:3:14");
    auto dense = std::make_shared<bool>(false);
    auto* c = tr->add_subcommand("scan-y", "c_eff against the monomer fugacity y of the left wall");
    common(c, *o, "transfer-scan-y.csv");
    c->add_option("--y", *ys, "left-wall fugacities: a:b:steps or a list")->capture_default_str();
    c->add_flag("--dense", *dense, "bulk at x_0 instead of x_c (right wall ordinary at x_0)");
    c->callback([&ctx, o, ys, dense, width_cols] {
      auto widths = parse_int_range(o->widths);
      auto grid = parse_grid(*ys);
      begin(ctx, "transfer scan-y", {{"n", o->n}, {"widths", widths}, {"y", grid}, {"dense", *dense}});
      const auto hp = honeycomb_points(o->n);
      TransferParams p;
      p.n = o->n;
      p.x = *dense ? hp.x_0 : hp.x_c;
      const auto right = BoundarySpec::ordinary(p.x);
      auto runs = parallel_map<CeffRun>(int(grid.size()), ctx.jobs, [&](int i) {
        return ceff_scan(p, BoundarySpec::ordinary(grid[i]), right, widths);
      });
      auto cols = width_cols;
      cols.insert(cols.begin(), {"y", "monomer fugacity on the left wall"});
      cols.push_back({"ceff", "effective central charge of the widest 5-point fit window"});
      cols.push_back({"ceff_error", "drift between the last two fit windows"});
      Table t("c_eff scan, ordinary left wall of fugacity y, right wall at the bulk x", cols);
      t.note(format("x = %s, y_S = %s", num(p.x).c_str(), num(hp.y_S).c_str()));
      ordered_json pts = ordered_json::array();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = runs[i];
        for (std::size_t k = 0; k < r.widths.size(); ++k)
          t.row({num(grid[i]), std::to_string(r.widths[k]), num(r.lambda[k]), num(r.f[k]), num(r.fit.value),
                 num(r.fit.error)});
        pts.push_back({{"y", grid[i]}, {"ceff", r.fit.value}, {"error", r.fit.error}});
      }
      t.write(ctx, o->out);
      finish(ctx, {{"x", p.x}, {"y_S", hp.y_S}, {"points", pts}});
    });
  }

  {
    auto o = std::make_shared<TransferOpts>();
    o->widths = "4..9";
    auto r1s = std::make_shared<std::string>("2");
    auto r12s = std::make_shared<std::string>("0.5,1,1.5,2");
    auto r2 = std::make_shared<double>(2.0);
    auto* c = tr->add_subcommand("two-boundary", "AS_unblob on both walls: exponent zeta against r12");
    common(c, *o, "transfer-two-boundary.csv");
    c->add_option("--r1", *r1s, "left labels, list or grid")->capture_default_str();
    c->add_option("--r2", *r2, "right label")->capture_default_str();
    c->add_option("--r12", *r12s, "labels of loops touching both walls")->capture_default_str();
    c->callback([&ctx, o, r1s, r12s, r2] {
      auto widths = parse_int_range(o->widths);
      auto g1 = parse_grid(*r1s), g12 = parse_grid(*r12s);
      begin(ctx, "transfer two-boundary", {{"n", o->n}, {"widths", widths}, {"r1", g1}, {"r2", *r2}, {"r12", g12}});
      auto pts = parallel_map<TwoBoundaryPoint>(int(g1.size() * g12.size()), ctx.jobs, [&](int i) {
        return two_boundary_point(o->n, g1[i / g12.size()], *r2, g12[i % g12.size()], widths);
      });
      Table t("two-boundary scan",
              {{"r1", "left blob label"}, {"r2", "right blob label"}, {"r12", "label of doubly blobbed loops"},
               {"n1", "left blob loop weight"}, {"n2", "right blob loop weight"}, {"n12", "doubly blobbed weight"},
               {"ceff", "effective central charge"}, {"ceff_error", "fit-window drift"},
               {"h0", "(c - ceff)/24"}, {"zeta", "exponent label from h0 = (zeta^2-1)(g-1)^2/(4g)"},
               {"zeta_error", "propagated fit-window drift"}});
      ordered_json rows = ordered_json::array();
      for (const auto& p : pts) {
        t.row({num(p.r1), num(p.r2), num(p.r12), num(p.n1), num(p.n2), num(p.n12), num(p.ceff), num(p.ceff_error),
               num(p.h0), num(p.zeta), num(p.zeta_error)});
        rows.push_back({{"r1", p.r1}, {"r12", p.r12}, {"zeta", p.zeta}, {"zeta_error", p.zeta_error}});
      }
      t.write(ctx, o->out);
      finish(ctx, {{"points", rows}});
    });
  }

  {
    auto o = std::make_shared<TransferOpts>();
    auto ns = std::make_shared<std::string>("1,1.4142135623730951");
    auto* c = tr->add_subcommand("crossover", "crossover exponent phi = y_y / y_Delta at the special point");
    common(c, *o, "transfer-crossover.csv");
    c->remove_option(c->get_option("--n"));
    c->add_option("--n", *ns, "loop weights, list")->capture_default_str();
    c->callback([&ctx, o, ns] {
      auto widths = parse_int_range(o->widths);
      auto grid = parse_list(*ns);
      begin(ctx, "transfer crossover", {{"n", grid}, {"widths", widths}});
      auto fits = parallel_map<CrossoverFit>(int(grid.size()), ctx.jobs,
                                             [&](int i) { return crossover_exponent_fit(grid[i], widths); });
      Table t("crossover exponent from derivative scaling",
              {{"n", "loop weight"}, {"width", "strip width N"},
               {"dG_dy", "derivative of N log(Lambda_0/Lambda_1) in the wall fugacity at y_S"},
               {"dD_ddelta", "derivative of N log(Lambda_unblob/Lambda_blob) in the anisotropy"},
               {"local_y", "log-slope of dG_dy against the previous width"},
               {"local_delta", "log-slope of dD_ddelta against the previous width"}});
      ordered_json rows = ordered_json::array();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& f = fits[i];
        for (std::size_t k = 0; k < f.widths.size(); ++k)
          t.row({num(grid[i]), std::to_string(f.widths[k]), num(f.dG_dy[k]), num(f.dD_ddelta[k]),
                 k ? num(f.local_y[k - 1]) : "", k ? num(f.local_delta[k - 1]) : ""});
        const double g = CoulombParams::from_n(grid[i]).g;
        rows.push_back({{"n", grid[i]}, {"phi", f.phi}, {"phi_error", f.phi_error}, {"phi_raw", f.phi_raw},
                        {"y_y", f.y_y}, {"y_delta", f.y_delta}, {"phi_closed_form", crossover_exponent(g)}});
      }
      t.write(ctx, o->out);
      finish(ctx, {{"fits", rows}});
    });
  }
}

// ---------------------------------------------------------------- mc

struct McCliOpts {
  double tau = 2 / std::sqrt(3.0), K = kIsingKc;
  int N = 16;
  McOptions mc;
  std::string algorithm = "wolff", out, sizes, sweeps_list;
};

void add_mc_common(CLI::App* c, McCliOpts& o) {
  c->add_option("--tau", o.tau, "aspect ratio T/L, periodic length over width")->capture_default_str();
  c->add_option("--K", o.K, "Ising coupling (critical ln(3)/4)")->capture_default_str();
  c->add_option("--sweeps", o.mc.sweeps, "measured sweeps per chain")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--seed", o.mc.seed, "base RNG seed; chain c uses seed_seq{seed, c}")->capture_default_str();
  c->add_option("--chains", o.mc.chains, "independent chains")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--thermalization", o.mc.thermalization, "discarded fraction of sweeps")->capture_default_str();
  c->add_option("--algorithm", o.algorithm, "wolff or metropolis")->capture_default_str();
  c->add_option("--height-offset", o.mc.height_offset, "effective height (N - offset) row spacings")
      ->capture_default_str();
}

ordered_json estimate_json(const McEstimate& e) {
  return {{"value", e.value}, {"stderr", e.stderr}, {"tau_int", e.tau_int}, {"measurements", e.measurements},
          {"undersampled", e.undersampled}};
}

ordered_json run_json(const CrossingRun& r) {
  ordered_json h = ordered_json::object();
  for (auto [k, c] : r.k_histogram) h[std::to_string(k)] = c;
  return {{"W", r.W}, {"N", r.N}, {"K", r.K}, {"tau", r.tau}, {"p_cross", estimate_json(r.p_cross)},
          {"mean_k", estimate_json(r.mean_k)}, {"density", estimate_json(r.density)}, {"k_histogram", h}};
}

void prepare(Context& ctx, McCliOpts& o) {
  o.mc.algorithm = parse_algorithm(o.algorithm);
  o.mc.jobs = ctx.jobs;
  for (int c = 0; c < o.mc.chains; ++c) ctx.seeds["chain " + std::to_string(c)] = {o.mc.seed, c};
}

ordered_json mc_params(const McCliOpts& o) {
  return {{"tau", o.tau},
          {"N", o.N},
          {"K", o.K},
          {"sweeps", o.mc.sweeps},
          {"thermalization", o.mc.thermalization},
          {"chains", o.mc.chains},
          {"algorithm", o.algorithm},
          {"height_offset", o.mc.height_offset}};
}

void write_series(Context& ctx, const CrossingRun& r, int chains, const std::string& file) {
  Table t("crossings per measurement",
          {{"measurement", "index within the chain"}, {"chain", "chain index"},
           {"k", "domain walls joining the two free edges"}});
  t.note(format("W = %d N = %d K = %s realized tau = %s", r.W, r.N, num(r.K).c_str(), num(r.tau).c_str()));
  const std::size_t per = r.k_series.size() / std::max(1, chains);
  for (std::size_t i = 0; i < r.k_series.size(); ++i)
    t.row({std::to_string(i % per), std::to_string(i / per), std::to_string(r.k_series[i])});
  t.write(ctx, file);
}

void write_summary(Context& ctx, const ordered_json& s, const std::string& csv) {
  std::string file = csv.substr(0, csv.rfind('.')) + ".summary.json";
  const std::string full = ctx.path(file);
  ctx.outputs.push_back(full);
  std::ofstream(full) << s.dump(2) << "\n";
}

void add_mc(CLI::App& app, Context& ctx) {
  auto* mc = app.add_subcommand("mc", "triangular-lattice Ising Monte Carlo on an annulus")->require_subcommand(1);

  {
    auto o = std::make_shared<McCliOpts>();
    o->out = "mc-crossing.csv";
    auto* c = mc->add_subcommand("crossing", "crossing probability P(k >= 1) at one size");
    add_mc_common(c, *o);
    c->add_option("--N", o->N, "rows between the free edges")->capture_default_str();
    c->add_option("--out", o->out, "CSV of per-measurement k")->capture_default_str();
    c->callback([&ctx, o] {
      begin(ctx, "mc crossing", mc_params(*o));
      prepare(ctx, *o);
      auto r = crossing_probability_mc(o->tau, o->N, o->K, o->mc);
      ordered_json s = run_json(r);
      s["p_analytic_ising"] = crossing_probability_ising(r.tau);
      s["p_analytic_percolation"] = crossing_probability_percolation(r.tau);
      write_series(ctx, r, o->mc.chains, o->out);
      write_summary(ctx, s, o->out);
      finish(ctx, s);
    });
  }

  {
    auto o = std::make_shared<McCliOpts>();
    o->tau = 20;
    o->mc.sweeps = 4000;
    o->out = "mc-density.csv";
    auto* c = mc->add_subcommand("density", "mean number of crossings per unit length");
    add_mc_common(c, *o);
    c->add_option("--N", o->N, "rows between the free edges")->capture_default_str();
    c->add_option("--sizes", o->sizes, "several N: extrapolate density + slope/N");
    c->add_option("--sweeps-per-size", o->sweeps_list, "sweeps for each of --sizes");
    c->add_option("--out", o->out, "CSV file")->capture_default_str();
    c->callback([&ctx, o] {
      auto params = mc_params(*o);
      params["sizes"] = o->sizes;
      params["sweeps_per_size"] = o->sweeps_list;
      begin(ctx, "mc density", params);
      prepare(ctx, *o);
      const double exact = mean_crossings_per_length(CoulombParams::from_n(1.0));
      if (o->sizes.empty()) {
        auto r = crossing_density_mc(o->tau, o->N, o->K, o->mc);
        ordered_json s = run_json(r);
        s["density_analytic"] = exact;
        write_series(ctx, r, o->mc.chains, o->out);
        write_summary(ctx, s, o->out);
        finish(ctx, s);
        return;
      }
      auto sizes = parse_int_list(o->sizes);
      std::vector<int> sweeps = o->sweeps_list.empty() ? std::vector<int>(sizes.size(), o->mc.sweeps)
                                                       : parse_int_list(o->sweeps_list);
      auto ex = crossing_density_extrapolated(o->tau, sizes, o->K, sweeps, o->mc);
      Table t("crossing density per size",
              {{"N", "rows"}, {"W", "circumference in sites"}, {"tau", "realized aspect ratio"},
               {"sweeps", "measured sweeps per chain"}, {"density", "mean crossings / tau"},
               {"stderr", "batch-means error"}, {"tau_int", "integrated autocorrelation time"}});
      t.note(format("extrapolated density %s +- %s, slope %s, chi2 %s", num(ex.density).c_str(),
                    num(ex.error).c_str(), num(ex.slope).c_str(), num(ex.chi2).c_str()));
      ordered_json runs = ordered_json::array();
      for (std::size_t i = 0; i < ex.runs.size(); ++i) {
        const auto& r = ex.runs[i];
        t.row({std::to_string(r.N), std::to_string(r.W), num(r.tau), std::to_string(sweeps[i]),
               num(r.density.value), num(r.density.stderr), num(r.density.tau_int)});
        runs.push_back(run_json(r));
      }
      ordered_json s{{"density", ex.density}, {"error", ex.error}, {"slope", ex.slope}, {"chi2", ex.chi2},
                     {"density_analytic", exact}, {"runs", runs}};
      t.write(ctx, o->out);
      write_summary(ctx, s, o->out);
      finish(ctx, s);
    });
  }

  {
    auto o = std::make_shared<McCliOpts>();
    o->out = "mc-locate.csv";
    o->sizes = "16,24,32";
    auto grid = std::make_shared<std::string>();
    auto* c = mc->add_subcommand("locate", "critical coupling from crossings of P_N(K) curves");
    add_mc_common(c, *o);
    c->add_option("--sizes", o->sizes, "at least three N")->capture_default_str();
    c->add_option("--K-grid", *grid, "couplings a:b:steps (default ln(3)/4 +- 0.01 in 8 steps)");
    c->add_option("--out", o->out, "CSV file")->capture_default_str();
    c->callback([&ctx, o, grid] {
      auto sizes = parse_int_list(o->sizes);
      auto Ks = grid->empty() ? parse_grid(num(kIsingKc - 0.01) + ":" + num(kIsingKc + 0.01) + ":8") : parse_grid(*grid);
      auto params = mc_params(*o);
      params["sizes"] = sizes;
      params["K_grid"] = Ks;
      begin(ctx, "mc locate", params);
      prepare(ctx, *o);
      auto cp = critical_point_locator(o->tau, sizes, Ks, o->mc);
      Table t("crossing probability curves",
              {{"N", "rows"}, {"K", "coupling"}, {"W", "circumference"}, {"tau", "realized aspect ratio"},
               {"p_cross", "P(k >= 1)"}, {"stderr", "batch-means error"}, {"tau_int", "autocorrelation time"}});
      for (const auto& curve : cp.curves)
        for (const auto& r : curve)
          t.row({std::to_string(r.N), num(r.K), std::to_string(r.W), num(r.tau), num(r.p_cross.value),
                 num(r.p_cross.stderr), num(r.p_cross.tau_int)});
      const double exact = crossing_probability_ising(o->tau);
      ordered_json s{{"found", cp.found},
                     {"K_c", cp.K_c},
                     {"K_c_error", cp.error},
                     {"K_c_analytic", cp.analytic},
                     {"p_at_crossing", cp.p_at_crossing},
                     {"p_error", cp.p_error},
                     {"p_stat_error", cp.p_stat_error},
                     {"p_slope", cp.p_slope},
                     {"p_analytic", exact},
                     {"sigmas", cp.p_error > 0 ? std::abs(cp.p_at_crossing - exact) / cp.p_error : 0.0},
                     {"pair_crossings", cp.pair_crossings}};
      t.write(ctx, o->out);
      write_summary(ctx, s, o->out);
      if (!cp.found) {
        ctx.write_manifest();
        throw NumericalFailure("no crossing of the P_N(K) curves inside the K grid", s);
      }
      finish(ctx, s);
    });
  }
}

// ---------------------------------------------------------------- tba

void add_tba(CLI::App& app, Context& ctx) {
  auto* tb = app.add_subcommand("tba", "boundary TBA for n = 2 cos(pi/m)")->require_subcommand(1);
  struct Opts {
    int m = 5;
    double spin = 0.5, theta_max = 0, dtheta = 0.05, tol = 1e-13;
    std::string scales = "-20:20:80", out = "tba-flow.csv";
  };
  auto o = std::make_shared<Opts>();
  auto* c = tb->add_subcommand("flow", "boundary free energy along the AS_blob -> Ord flow");
  c->add_option("--m", o->m, "n = 2 cos(pi/m), m >= 3")->capture_default_str();
  c->add_option("--spin", o->spin, "impurity spin S, 1 <= 2S <= m-2; r1 = 2S")->capture_default_str();
  c->add_option("--scales", o->scales, "log(T/T_K) grid a:b:steps")->capture_default_str();
  c->add_option("--theta-max", o->theta_max, "rapidity half-width (default max(40, max|t| + 15))");
  c->add_option("--dtheta", o->dtheta, "rapidity step")->capture_default_str();
  c->add_option("--tol", o->tol, "fixed-point tolerance")->capture_default_str();
  c->add_option("--out", o->out, "CSV file")->capture_default_str();
  c->callback([&ctx, o] {
    auto grid = parse_grid(o->scales);
    double reach = 0;
    for (double t : grid) reach = std::max(reach, std::abs(t));
    const double theta = o->theta_max > 0 ? o->theta_max : std::max(40.0, reach + 15);
    begin(ctx, "tba flow", {{"m", o->m}, {"spin", o->spin}, {"scales", o->scales}, {"theta_max", theta},
                            {"dtheta", o->dtheta}});
    ctx.truncation = {{"theta_max", theta}, {"dtheta", o->dtheta}, {"tol", o->tol}};
    TbaSystem s(o->m, o->spin, theta, o->dtheta);
    solve(s, o->tol);
    if (!s.converged)
      throw NumericalFailure("TBA iteration did not converge", {{"iterations", s.iterations}, {"residual", s.residual}});
    auto pc = plateau_check(s);
    auto fr = flow_ratio(s);
    ordered_json sum{{"iterations", s.iterations},
                     {"plateau_closed_form_error", pc.closed_form_error},
                     {"plateau_recursion_error", pc.recursion_error},
                     {"g_ratio_tba", fr.tba_numeric},
                     {"g_ratio_closed", fr.tba_closed},
                     {"g_ratio_cft", fr.cft},
                     {"g_ratio_difference", fr.difference}};
    if (theta >= 39) {
      auto u = uv_expansion_exponent(s);
      sum["uv_exponent"] = u.exponent;
      sum["uv_exponent_expected"] = u.expected;
      sum["uv_window_drift"] = u.window_drift;
    }
    Table t(format("boundary free energy, m = %d, S = %s", o->m, num(o->spin).c_str()),
            {{"log_t", "log(T/T_K)"}, {"f", "boundary free energy over T"},
             {"error", "difference to a stride-2 quadrature"}});
    const double steps = grid.size() > 1 ? double(grid.size() - 1) : 0;
    for (const auto& p : boundary_flow(s, grid.front(), grid.back(), int(steps)))
      t.row({num(p.log_t), num(p.f), num(p.error)});
    t.write(ctx, o->out);
    finish(ctx, sum);
  });
}

}  // namespace

void register_predict(CLI::App& app, Context& ctx) { add_predict(app, ctx); }
void register_verify(CLI::App& app, Context& ctx) { add_verify(app, ctx); }
void register_transfer(CLI::App& app, Context& ctx) { add_transfer(app, ctx); }
void register_mc(CLI::App& app, Context& ctx) { add_mc(app, ctx); }
void register_tba(CLI::App& app, Context& ctx) { add_tba(app, ctx); }

}  // namespace loopbc::cli
