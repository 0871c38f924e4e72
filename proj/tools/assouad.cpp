// assouad: command-line front end.
//
// Exit codes: 0 pass, 1 mathematical failure, 2 usage or input error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "assouad/assouad.hpp"

namespace fs = std::filesystem;
using namespace assouad;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct Context {
  std::vector<std::string> argv;  // arguments after the program name, manifest flag removed
  std::string manifest_path;
  RunManifest manifest;
};

void finish_manifest(Context& ctx, std::chrono::steady_clock::time_point start) {
  if (ctx.manifest_path.empty()) return;
  ctx.manifest.parameters["argv"] = ctx.argv;
  ctx.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json_atomic(ctx.manifest_path, ctx.manifest.to_json());
}

json grid_json(const GridSpec& g) {
  return {{"n_theta", g.n_theta},
          {"spacing", g.spacing == Spacing::uniform ? "uniform" : "geometric_near_endpoints"},
          {"tolerance", g.tolerance}};
}

std::vector<double> default_thetas() {
  std::vector<double> t;
  for (int i = 1; i <= 9; ++i) t.push_back(i / 10.0);
  return t;
}

// Schedule CSV (k, t_k, r_k) back into a schedule.
RatioSchedule read_schedule(const fs::path& p, int d) {
  const CsvData csv = parse_csv(read_text(p), p.string());
  const auto it = std::find(csv.header.begin(), csv.header.end(), "t_k");
  if (it == csv.header.end()) throw ParseError(p.string() + ": no t_k column");
  const std::size_t col = static_cast<std::size_t>(it - csv.header.begin());
  std::vector<double> t;
  for (const auto& row : csv.rows) t.push_back(row[col]);
  return RatioSchedule(std::move(t), AmbientDim(d));
}

// ---------------------------------------------------------------------------

struct ValidateOpts {
  std::string input;
  int grid = 200;
  double tol = kDefaultTolerance;
  bool geometric = false;
  std::string report = "report.json";
};

int cmd_validate(const ValidateOpts& o, Context& ctx) {
  ctx.manifest.inputs = {o.input};
  ctx.manifest.outputs = {o.report};
  const SpectrumFn f = read_spectrum(o.input);
  const GridSpec g{o.grid, o.geometric ? Spacing::geometric_near_endpoints : Spacing::uniform, o.tol};
  ctx.manifest.grid = grid_json(g);
  const ValidationReport r = check_Ad(f, g);
  json j = report_to_json(r);
  j["input"] = o.input;
  write_json_atomic(o.report, j);
  for (const auto& c : r.checks) {
    std::printf("%-16s %s worst=%s", c.name.c_str(), c.passed() ? "ok  " : "FAIL", fmt17(c.worst_violation).c_str());
    if (!c.witness.empty()) {
      std::printf(" at");
      for (double w : c.witness) std::printf(" %s", fmt17(w).c_str());
    }
    std::printf("\n");
  }
  return r.passed ? kPass : kFail;
}

// ---------------------------------------------------------------------------

struct FamilyOpts {
  std::string family;
  double kappa = 1.0;
  double c = 0.5;
  double c1 = 1.0 / 3.0;
  double c2 = 0.5;
  int d = 1;
  int points = 10000;
  double eps = 0.1;
  int depth = 6;
  std::string out = "spectrum.json";
};

int cmd_family(const FamilyOpts& o, Context& ctx) {
  ctx.manifest.outputs = {o.out};
  const AmbientDim d(o.d);
  json j;
  if (o.family == "M") {
    j = spectrum_to_json(SpectrumFn(make_f({o.kappa, o.c}, d)));
    j["family"] = "M";
    j["kappa"] = o.kappa;
    j["c"] = o.c;
  } else if (o.family == "C") {
    j = spectrum_to_json(SpectrumFn(make_h({o.kappa, o.c1, o.c2}, d)));
    j["family"] = "C";
    j["kappa"] = o.kappa;
    j["c1"] = o.c1;
    j["c2"] = o.c2;
  } else if (o.family == "holder") {
    const HolderFailure h = make_holder_failure(o.points);
    j = spectrum_to_json(h.sigma);
    j["family"] = "holder";
    j["theta0"] = h.theta0;
    j["f_theta0"] = h.f_theta0;
  } else if (o.family == "nonmono") {
    const NonMonoBuild b = build_nonmonotone(SpectrumFn(make_f({o.kappa, o.c}, d)), o.eps, o.depth);
    j = spectrum_to_json(b.phi);
    j["family"] = "nonmono";
    j["target"] = {{"family", "M"}, {"kappa", o.kappa}, {"c", o.c}};
    j["eps"] = o.eps;
    j["depth"] = o.depth;
    j["eta"] = b.eta;
    json ch = json::array();
    for (const auto& c : b.choices)
      ch.push_back({{"lambda", c.lambda}, {"level", c.level}, {"y", c.y}, {"c", c.c}, {"window", {c.window_lo, c.window_hi}}});
    j["choices"] = ch;
  } else {
    std::cerr << "family: unknown family \"" << o.family << "\" (expected M, C, holder or nonmono)\n";
    return kUsage;
  }
  write_json_atomic(o.out, j);
  return kPass;
}

// ---------------------------------------------------------------------------

struct RoundtripOpts {
  std::string input;
  std::optional<double> alpha;
  double xmax = 60.0;
  double step = 0.01;
  std::vector<double> thetas = default_thetas();
  std::optional<double> tol;
  double schedule_xmax = 4.0;
  std::string out = "roundtrip.csv";
};

int cmd_roundtrip(const RoundtripOpts& o, Context& ctx) {
  ctx.manifest.inputs = {o.input};
  ctx.manifest.outputs = {o.out};
  const SpectrumFn f = read_spectrum(o.input);
  const double phi1 = f.phi_closed(1.0);
  const double alpha = o.alpha.value_or(phi1);
  if (alpha < phi1 - kDefaultTolerance) {
    std::cerr << "roundtrip: alpha " << alpha << " < phi(1) = " << phi1 << "\n";
    return kUsage;
  }
  const double tol = o.tol.value_or(f.is_exact() ? 0.01 : 0.05);
  const BuiltG b = build_g(f, alpha, std::nullopt, std::max(128.0, o.xmax + 16.0));
  const RatioSchedule s = schedule_from_g(b.g, o.schedule_xmax);

  CsvTable t({"theta", "target", "analytic", "schedule", "analytic_err", "schedule_err"});
  bool ok = true;
  for (double th : o.thetas) {
    if (!(th > 0.0 && th < 1.0)) {
      std::cerr << "roundtrip: theta " << th << " outside (0,1)\n";
      return kUsage;
    }
    // Skip the transient before block N = ceil(log(1/theta)) + 1.
    std::optional<double> x_min;
    if (!b.trivial_zero) {
      const auto n = static_cast<std::size_t>(std::ceil(-std::log(th))) + 1;
      if (n <= b.blocks.size()) x_min = b.blocks[n - 1].x_n;
    }
    const double target = f.phi(th);
    const double analytic = spectrum_from_g(b.g, th, o.xmax, o.step, x_min).value;
    const double sched = spectrum_from_schedule(s, th, th * s.t_max()).value;
    const double ea = std::abs(analytic - target), es = std::abs(sched - target);
    ok = ok && ea <= tol;
    t.row({th, target, analytic, sched, ea, es});
  }
  write_text_atomic(o.out, t.str());
  std::cout << t.str();
  ctx.manifest.parameters["tolerance"] = tol;
  return ok ? kPass : kFail;
}

// ---------------------------------------------------------------------------

struct PlotOpts {
  std::vector<std::string> inputs;
  std::string out = "fig.svg";
  bool beta = false;
  std::vector<double> secant;  // lambda, theta
  int samples = 400;
  std::string title;
};

int cmd_plot(const PlotOpts& o, Context& ctx) {
  ctx.manifest.inputs = o.inputs;
  ctx.manifest.outputs = {o.out};
  if (o.inputs.empty()) {
    std::cerr << "plot: no input curves\n";
    return kUsage;
  }
  if (!o.secant.empty() && o.secant.size() != 2) {
    std::cerr << "plot: --secant takes lambda,theta\n";
    return kUsage;
  }
  svg::Figure fig;
  fig.title = o.title;
  fig.y_label = o.beta || !o.secant.empty() ? "(1-theta) phi(theta)" : "phi(theta)";
  fig.x_min = 0.0;
  fig.x_max = 1.0;
  const bool as_beta = o.beta || !o.secant.empty();
  std::optional<SpectrumFn> first;
  for (const auto& in : o.inputs) {
    const fs::path p(in);
    if (p.extension() == ".csv") {
      const CsvData csv = parse_csv(read_text(p), in);
      fig.x_min = fig.x_max = std::nan("");
      if (csv.header[0] == "x1") {
        // Point samples: d = 1 on a baseline, otherwise the first two coordinates.
        svg::Series s{p.stem().string(), {}, {}, false, true};
        for (const auto& row : csv.rows) {
          s.xs.push_back(row[0]);
          s.ys.push_back(row.size() > 1 ? row[1] : 0.0);
        }
        fig.series.push_back(std::move(s));
        continue;
      }
      if (csv.header.size() < 2) throw ParseError(in + ": need at least two columns");
      for (std::size_t col = 1; col < csv.header.size(); ++col) {
        svg::Series s{p.stem().string() + ":" + csv.header[col], {}, {}};
        for (const auto& row : csv.rows) {
          s.xs.push_back(row[0]);
          s.ys.push_back(row[col]);
        }
        fig.series.push_back(std::move(s));
      }
      continue;
    }
    const SpectrumFn f = read_spectrum(p);
    if (!first) first = f;
    svg::Series s{p.stem().string(), {}, {}};
    for (int i = 0; i <= o.samples; ++i) {
      const double th = static_cast<double>(i) / o.samples;
      s.xs.push_back(th);
      s.ys.push_back(as_beta ? f.beta(th) : f.phi_closed(th));
    }
    fig.series.push_back(std::move(s));
  }
  if (!o.secant.empty()) {
    if (!first) throw ParseError("plot: --secant needs a spectrum JSON input");
    const double lam = o.secant[0], th = o.secant[1];
    if (!(lam > 0.0 && lam < th && th < 1.0)) {
      std::cerr << "plot: --secant needs 0 < lambda < theta < 1\n";
      return kUsage;
    }
    const double y = first->beta(lam);
    const double slope = first->phi(lam / th);
    fig.series.push_back({"slope 0", {lam, 1.0}, {y, y}, true});
    fig.series.push_back({"slope -phi(lambda/theta)", {lam, 1.0}, {y, y - slope * (1.0 - lam)}, true});
  }
  write_text_atomic(o.out, svg::render(fig));
  return kPass;
}

// ---------------------------------------------------------------------------

struct ScheduleOpts {
  std::string input;
  std::optional<double> alpha;
  double xmax = 4.0;
  std::optional<double> ratio;
  int levels = 14;
  int d = 1;
  std::string out = "schedule.csv";
};

int cmd_schedule(const ScheduleOpts& o, Context& ctx) {
  ctx.manifest.outputs = {o.out};
  std::optional<RatioSchedule> s;
  if (o.ratio) {
    s = RatioSchedule::constant(*o.ratio, o.levels, AmbientDim(o.d));
  } else {
    if (o.input.empty()) {
      std::cerr << "schedule: give a spectrum file or --ratio\n";
      return kUsage;
    }
    ctx.manifest.inputs = {o.input};
    const SpectrumFn f = read_spectrum(o.input);
    const double alpha = o.alpha.value_or(f.phi_closed(1.0));
    const BuiltG b = build_g(f, alpha, std::nullopt, std::max(128.0, o.xmax + 16.0));
    s = schedule_from_g(b.g, o.xmax);
    const ValidationReport r = check_discretization(*s, b.g);
    const CheckResult& c = r.checks.front();
    std::printf("levels %d, discretization %s (worst %s)\n", s->levels(), c.passed() ? "ok" : "FAIL",
                fmt17(c.worst_violation).c_str());
    if (!r.passed) {
      write_text_atomic(o.out, schedule_csv(*s));
      return kFail;
    }
  }
  write_text_atomic(o.out, schedule_csv(*s));
  return kPass;
}

// ---------------------------------------------------------------------------

struct PointsOpts {
  std::string schedule;
  int d = 1;
  int level = 6;
  std::size_t max_points = 100000;
  bool subsample = false;
  std::string out = "points.csv";
};

int cmd_points(const PointsOpts& o, Context& ctx) {
  ctx.manifest.inputs = {o.schedule};
  ctx.manifest.outputs = {o.out};
  const RatioSchedule s = read_schedule(o.schedule, o.d);
  const auto pts = sample_points(s, o.level, o.max_points, o.subsample);
  write_text_atomic(o.out, points_csv(pts, o.d));
  return kPass;
}

// ---------------------------------------------------------------------------

int run(std::vector<std::string> args, int depth = 0);

int cmd_replay(const std::string& path, int depth) {
  if (depth > 0) {
    std::cerr << "replay: nested replay is not allowed\n";
    return kUsage;
  }
  const RunManifest m = RunManifest::from_json(parse_json(read_text(path), path));
  if (!m.parameters.contains("argv") || !m.parameters["argv"].is_array())
    throw ParseError(path + ": manifest has no recorded argv");
  return run(m.parameters["argv"].get<std::vector<std::string>>(), depth + 1);
}

int run(std::vector<std::string> args, int depth) {
  CLI::App app{"Assouad spectra: validation, families, growth functions and Moran sets"};
  app.require_subcommand(1);
  Context ctx;
  std::string manifest;
  app.add_option("--manifest", manifest, "write a run manifest (JSON) to this path");

  ValidateOpts vo;
  auto* v = app.add_subcommand("validate", "check a spectrum against the A_d inequality");
  v->add_option("spectrum", vo.input, "spectrum JSON")->required();
  v->add_option("--grid", vo.grid, "interior theta points")->check(CLI::PositiveNumber);
  v->add_option("--tol", vo.tol, "tolerance");
  v->add_flag("--geometric", vo.geometric, "refine geometrically near 0 and 1");
  v->add_option("--report", vo.report, "report path");

  FamilyOpts fo;
  auto* f = app.add_subcommand("family", "emit a family member as spectrum JSON");
  f->add_option("--family", fo.family, "M, C, holder or nonmono")->required();
  f->add_option("--kappa", fo.kappa);
  f->add_option("--c", fo.c);
  f->add_option("--c1", fo.c1);
  f->add_option("--c2", fo.c2);
  f->add_option("--d", fo.d);
  f->add_option("--points", fo.points, "table size for holder");
  f->add_option("--eps", fo.eps, "nonmono: sup-norm budget");
  f->add_option("--depth", fo.depth, "nonmono: dyadic depth");
  f->add_option("--out", fo.out);

  RoundtripOpts ro;
  auto* r = app.add_subcommand("roundtrip", "spectrum -> growth function -> estimated spectrum");
  r->add_option("spectrum", ro.input)->required();
  r->add_option("--alpha", ro.alpha, "upper growth rate (default phi(1))");
  r->add_option("--xmax", ro.xmax);
  r->add_option("--step", ro.step);
  r->add_option("--thetas", ro.thetas)->delimiter(',');
  r->add_option("--tol", ro.tol, "analytic tolerance (default 0.01, 0.05 for tables)");
  r->add_option("--schedule-xmax", ro.schedule_xmax);
  r->add_option("--out", ro.out);

  PlotOpts po;
  auto* p = app.add_subcommand("plot", "SVG figure of spectra (JSON) or CSV columns");
  p->add_option("inputs", po.inputs);
  p->add_option("--out", po.out);
  p->add_flag("--beta", po.beta, "plot (1-theta) phi");
  p->add_option("--secant", po.secant, "lambda,theta: draw the two bounding lines")->delimiter(',');
  p->add_option("--samples", po.samples)->check(CLI::PositiveNumber);
  p->add_option("--title", po.title);

  ScheduleOpts so;
  auto* s = app.add_subcommand("schedule", "ratio schedule CSV (k, t_k, r_k)");
  s->add_option("spectrum", so.input);
  s->add_option("--alpha", so.alpha);
  s->add_option("--xmax", so.xmax);
  s->add_option("--ratio", so.ratio, "constant ratio instead of a spectrum");
  s->add_option("--levels", so.levels);
  s->add_option("--d", so.d);
  s->add_option("--out", so.out);

  PointsOpts pto;
  auto* pt = app.add_subcommand("points", "corner points of a Moran level");
  pt->add_option("schedule", pto.schedule, "schedule CSV")->required();
  pt->add_option("--d", pto.d);
  pt->add_option("--level", pto.level);
  pt->add_option("--max-points", pto.max_points);
  pt->add_flag("--subsample", pto.subsample);
  pt->add_option("--out", pto.out);

  std::string replay_path;
  auto* rp = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  rp->add_option("manifest", replay_path)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--manifest" && i + 1 < args.size()) {
      ++i;
      continue;
    }
    if (args[i].rfind("--manifest=", 0) == 0) continue;
    ctx.argv.push_back(args[i]);
  }
  ctx.manifest_path = manifest;
  const auto start = std::chrono::steady_clock::now();
  int code = kUsage;
  try {
    if (*v) ctx.manifest.command = "validate", code = cmd_validate(vo, ctx);
    else if (*f) ctx.manifest.command = "family", code = cmd_family(fo, ctx);
    else if (*r) ctx.manifest.command = "roundtrip", code = cmd_roundtrip(ro, ctx);
    else if (*p) ctx.manifest.command = "plot", code = cmd_plot(po, ctx);
    else if (*s) ctx.manifest.command = "schedule", code = cmd_schedule(so, ctx);
    else if (*pt) ctx.manifest.command = "points", code = cmd_points(pto, ctx);
    else if (*rp) return cmd_replay(replay_path, depth);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConstructionError& e) {
    std::cerr << "construction failed: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (code != kUsage) finish_manifest(ctx, start);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}
