// Canned desk-scale pipelines: c_eff against y, the two-boundary exponent, the crossover-exponent
// table, the Ising crossing-probability locator and the crossing density.

#include <cmath>
#include <memory>

#include "cli.hpp"
#include "loopbc/cft.hpp"
#include "loopbc/integrable.hpp"
#include "loopbc/mc_ising.hpp"
#include "loopbc/transfer.hpp"

namespace loopbc::cli {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<double> log_grid(double a, double b, int points) {
  std::vector<double> v;
  for (int i = 0; i < points; ++i) v.push_back(a * std::pow(b / a, double(i) / (points - 1)));
  return v;
}

void fig4(Context& ctx, const std::string& widths_arg, int points) {
  auto widths = parse_int_range(widths_arg);
  ctx.command = "reproduce fig4";
  ctx.parameters = {{"n", kSqrt2}, {"widths", widths}, {"points", points}};
  const auto hp = honeycomb_points(kSqrt2);
  struct Task {
    std::string phase;
    double y;
  };
  std::vector<Task> tasks;
  for (double y : log_grid(0.1, 100, points)) tasks.push_back({"dilute", y});
  for (double y : log_grid(0.1, 10, points)) tasks.push_back({"dense", y});
  for (double y : {hp.x_c, hp.y_S, 10.0}) tasks.push_back({"dilute-reference", y});
  auto runs = parallel_map<CeffRun>(int(tasks.size()), ctx.jobs, [&](int i) {
    TransferParams p;
    p.n = kSqrt2;
    p.x = tasks[i].phase == "dense" ? hp.x_0 : hp.x_c;
    return ceff_scan(p, BoundarySpec::ordinary(tasks[i].y), BoundarySpec::ordinary(p.x), widths);
  });
  Table t("c_eff against the left-wall fugacity y at n = sqrt 2",
          {{"phase", "dilute (x = x_c) or dense (x = x_0); dilute-reference rows sit at y = x_c, y_S, 10"},
           {"y", "monomer fugacity on the left wall"},
           {"ceff", "effective central charge from the widest fit window"},
           {"ceff_error", "drift between the last two fit windows"}});
  t.note(format("widths %d..%d; y_S = %s; expected plateaus 0.7 (y < y_S), -1.7 (y = y_S), -9.8 (y >> y_S), "
                "0.5 (dense)",
                widths.front(), widths.back(), num(hp.y_S).c_str()));
  ordered_json refs = ordered_json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    t.row({tasks[i].phase, num(tasks[i].y), num(runs[i].fit.value), num(runs[i].fit.error)});
    if (tasks[i].phase == "dilute-reference")
      refs.push_back({{"y", tasks[i].y}, {"ceff", runs[i].fit.value}, {"error", runs[i].fit.error}});
  }
  t.write(ctx, "fig4.csv");
  write_plot_stub(ctx, "fig4.plot.py", ctx.path("fig4.csv"), "y", {"ceff"}, "phase");
  ctx.write_manifest();
  emit(ctx, {{"y_S", hp.y_S}, {"references", refs}});
}

void fig7(Context& ctx, const std::string& widths_arg, const std::string& r12_arg) {
  auto widths = parse_int_range(widths_arg);
  auto r12 = parse_grid(r12_arg);
  const std::vector<double> r1{1.5, 2.0, 2.5};
  ctx.command = "reproduce fig7";
  ctx.parameters = {{"n", kSqrt2}, {"widths", widths}, {"r1", r1}, {"r2", 2.0}, {"r12", r12}};
  auto pts = parallel_map<TwoBoundaryPoint>(int(r1.size() * r12.size()), ctx.jobs, [&](int i) {
    return two_boundary_point(kSqrt2, r1[i / r12.size()], 2.0, r12[i % r12.size()], widths);
  });
  Table t("two-boundary exponent zeta against r12, AS_unblob walls, n = sqrt 2",
          {{"r1", "left blob label"}, {"r12", "label of loops touching both walls"},
           {"zeta", "measured exponent label; the prediction is zeta = r12"},
           {"zeta_error", "propagated fit-window drift"}, {"ceff", "effective central charge"}});
  t.note(format("r2 = 2, widths %d..%d", widths.front(), widths.back()));
  double worst = 0;
  for (const auto& p : pts) {
    t.row({num(p.r1), num(p.r12), num(p.zeta), num(p.zeta_error), num(p.ceff)});
    worst = std::max(worst, std::abs(p.zeta - p.r12));
  }
  t.write(ctx, "fig7.csv");
  write_plot_stub(ctx, "fig7.plot.py", ctx.path("fig7.csv"), "r12", {"zeta"}, "r1");
  ctx.write_manifest();
  emit(ctx, {{"max_abs_zeta_minus_r12", worst}});
}

void phi_table(Context& ctx, const std::string& widths_arg) {
  auto widths = parse_int_range(widths_arg);
  ctx.command = "reproduce phi-table";
  ctx.parameters = {{"widths", widths}};
  // n with c = 0, 1/2, 7/10, 4/5, 6/7, 1
  const std::vector<double> ns{0.0, 1.0, kSqrt2, 2 * std::cos(M_PI / 5), std::sqrt(3.0), 2.0};
  const std::vector<double> measured{1.0, kSqrt2};
  auto fits = parallel_map<CrossoverFit>(int(measured.size()), ctx.jobs,
                                         [&](int i) { return crossover_exponent_fit(measured[i], widths); });
  Table t("crossover exponent at the special transition",
          {{"n", "loop weight"}, {"g", "Coulomb-gas coupling"}, {"c", "central charge"},
           {"y_y", "isotropic RG eigenvalue 2(g-1)/g"}, {"y_delta", "anisotropic RG eigenvalue 1 - h_{3,3}"},
           {"phi", "closed form (1 - h_{1,3}) / (1 - h_{3,3})"},
           {"phi_measured", "transfer-matrix estimate (blank if not measured)"},
           {"phi_measured_error", "extrapolation spread"}});
  t.note(format("measured on widths %d..%d", widths.front(), widths.back()));
  ordered_json rows = ordered_json::array();
  for (double n : ns) {
    auto p = CoulombParams::from_n(n);
    const double yy = perturbation_data("sp-isotropic", p).rg_eigenvalue;
    const double yd = perturbation_data("sp-anisotropic", p).rg_eigenvalue;
    std::string pm, pe;
    ordered_json row{{"n", n}, {"c", p.c}, {"phi", crossover_exponent(p.g)}};
    for (std::size_t i = 0; i < measured.size(); ++i)
      if (std::abs(measured[i] - n) < 1e-12) {
        pm = num(fits[i].phi), pe = num(fits[i].phi_error);
        row["phi_measured"] = fits[i].phi;
        row["phi_measured_error"] = fits[i].phi_error;
      }
    t.row({num(n), num(p.g), num(p.c), num(yy), num(yd), num(crossover_exponent(p.g)), pm, pe});
    rows.push_back(row);
  }
  t.write(ctx, "phi-table.csv");
  ctx.write_manifest();
  emit(ctx, {{"rows", rows}});
}

void fig13(Context& ctx, const std::string& sizes_arg, int sweeps, std::uint64_t seed) {
  auto sizes = parse_int_list(sizes_arg);
  const double tau = 2 / std::sqrt(3.0);
  std::vector<double> grid;
  for (int k = -4; k <= 4; ++k) grid.push_back(kIsingKc + 0.005 * k);
  ctx.command = "reproduce fig13";
  ctx.parameters = {{"tau", tau}, {"sizes", sizes}, {"K_grid", grid}, {"sweeps", sweeps}};
  ctx.seeds["base"] = seed;
  McOptions opt;
  opt.sweeps = sweeps;
  opt.seed = seed;
  opt.jobs = ctx.jobs;
  auto cp = critical_point_locator(tau, sizes, grid, opt);
  Table t("Ising crossing probability curves at tau = 2/sqrt 3",
          {{"N", "rows between the free edges"}, {"K", "coupling"}, {"p_cross", "P(k >= 1)"},
           {"stderr", "batch-means error"}});
  const double exact = crossing_probability_ising(tau);
  t.note(format("analytic P = %s at K_c = ln(3)/4", num(exact).c_str()));
  for (const auto& curve : cp.curves)
    for (const auto& r : curve) t.row({std::to_string(r.N), num(r.K), num(r.p_cross.value), num(r.p_cross.stderr)});
  t.write(ctx, "fig13.csv");
  write_plot_stub(ctx, "fig13.plot.py", ctx.path("fig13.csv"), "K", {"p_cross"}, "N");
  ctx.write_manifest();
  ordered_json s{{"found", cp.found},   {"K_c", cp.K_c},
                 {"K_c_error", cp.error}, {"p_at_crossing", cp.p_at_crossing},
                 {"p_error", cp.p_error}, {"p_stat_error", cp.p_stat_error},
                 {"p_analytic", exact}};
  if (!cp.found) throw NumericalFailure("no crossing of the P_N(K) curves inside the K grid", s);
  emit(ctx, s);
}

void crossing_density(Context& ctx, const std::string& sizes_arg, const std::string& sweeps_arg,
                      std::uint64_t seed) {
  auto sizes = parse_int_list(sizes_arg);
  auto sweeps = parse_int_list(sweeps_arg);
  if (sweeps.size() == 1) sweeps.assign(sizes.size(), sweeps[0]);
  ctx.command = "reproduce crossing-density";
  ctx.parameters = {{"tau", 20}, {"K", kIsingKc}, {"sizes", sizes}, {"sweeps", sweeps}};
  ctx.seeds["base"] = seed;
  McOptions opt;
  opt.seed = seed;
  opt.jobs = ctx.jobs;
  auto ex = crossing_density_extrapolated(20, sizes, kIsingKc, sweeps, opt);
  const double exact = mean_crossings_per_length(CoulombParams::from_n(1.0));
  Table t("mean crossings per unit length at tau = 20, K = ln(3)/4",
          {{"N", "rows"}, {"density", "mean number of crossing walls / tau"}, {"stderr", "batch-means error"}});
  t.note(format("1/N extrapolation %s +- %s; analytic sqrt(3)/4 = %s", num(ex.density).c_str(),
                num(ex.error).c_str(), num(exact).c_str()));
  for (const auto& r : ex.runs) t.row({std::to_string(r.N), num(r.density.value), num(r.density.stderr)});
  t.write(ctx, "crossing-density.csv");
  write_plot_stub(ctx, "crossing-density.plot.py", ctx.path("crossing-density.csv"), "N", {"density"});
  ctx.write_manifest();
  emit(ctx, {{"density", ex.density}, {"error", ex.error}, {"slope", ex.slope}, {"chi2", ex.chi2},
             {"density_analytic", exact}});
}

}  // namespace

void register_reproduce(CLI::App& app, Context& ctx) {
  auto* re = app.add_subcommand("reproduce", "canned pipelines at desk scale")->require_subcommand(1);
  struct Opts {
    std::string widths, r12 = "0.25:2.5:9", sizes, sweeps;
    int points = 13;
    std::uint64_t seed = 1;
  };

  auto a = std::make_shared<Opts>();
  a->widths = "4..10";
  auto* c = re->add_subcommand("fig4", "c_eff against y, dilute and dense, n = sqrt 2");
  c->add_option("--L", a->widths, "strip widths")->capture_default_str();
  c->add_option("--points", a->points, "grid points per phase")->capture_default_str();
  c->callback([&ctx, a] { fig4(ctx, a->widths, a->points); });

  auto b = std::make_shared<Opts>();
  b->widths = "4..9";
  c = re->add_subcommand("fig7", "two-boundary exponent zeta against r12");
  c->add_option("--L", b->widths, "strip widths")->capture_default_str();
  c->add_option("--r12", b->r12, "r12 grid")->capture_default_str();
  c->callback([&ctx, b] { fig7(ctx, b->widths, b->r12); });

  auto p = std::make_shared<Opts>();
  p->widths = "4..11";
  c = re->add_subcommand("phi-table", "crossover exponents, closed form and measured");
  c->add_option("--L", p->widths, "strip widths for the measured rows")->capture_default_str();
  c->callback([&ctx, p] { phi_table(ctx, p->widths); });

  auto f = std::make_shared<Opts>();
  f->sizes = "8,12,16";
  f->sweeps = "4000";
  c = re->add_subcommand("fig13", "Ising crossing probability curves and their crossing");
  c->add_option("--sizes", f->sizes, "row counts N")->capture_default_str();
  c->add_option("--sweeps", f->sweeps, "measured sweeps per point")->capture_default_str();
  c->add_option("--seed", f->seed, "base RNG seed")->capture_default_str();
  c->callback([&ctx, f] { fig13(ctx, f->sizes, std::stoi(f->sweeps), f->seed); });

  auto d = std::make_shared<Opts>();
  d->sizes = "12,16,24";
  d->sweeps = "6000";
  c = re->add_subcommand("crossing-density", "crossing density at tau = 20, extrapolated in 1/N");
  c->add_option("--sizes", d->sizes, "row counts N")->capture_default_str();
  c->add_option("--sweeps", d->sweeps, "sweeps, one value or one per size")->capture_default_str();
  c->add_option("--seed", d->seed, "base RNG seed")->capture_default_str();
  c->callback([&ctx, d] { crossing_density(ctx, d->sizes, d->sweeps, d->seed); });
}

}  // namespace loopbc::cli
