#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qes/asymptotics.hpp"
#include "qes/crossings.hpp"
#include "qes/export.hpp"
#include "qes/monodromy.hpp"
#include "qes/service.hpp"
#include "qes/spectrum.hpp"

namespace qes::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  int m = 1;
  std::vector<double> b{0.0, 0.0};
  std::string out_dir;
  std::string format;
  double merge_tol = 1e-8;
  double accuracy = 1e-11;
  double radius_fraction = 0.05;
  double gap_fraction = 0.5;
  double max_step = 0.02;
  double min_step = 1e-6;
  double step_fraction = 1e-3;
  double capture_steps = 5.0;
  double leg_tol = 0.1;
  int grid = 30;
  int local_grid = 17;
  int samples = 400;

  Complex b_value() const { return {b.empty() ? 0.0 : b[0], b.size() > 1 ? b[1] : 0.0}; }

  MonodromyOptions monodromy() const {
    MonodromyOptions o;
    o.radius_fraction = radius_fraction;
    o.track.gap_fraction = gap_fraction;
    o.track.max_step = max_step;
    o.track.min_step = min_step;
    return o;
  }

  TrajectoryOptions trajectory() const {
    TrajectoryOptions o;
    o.step_fraction = step_fraction;
    o.capture_steps = capture_steps;
    return o;
  }
};

/// Routes each output either to stdout (one format) or to files under --out.
class Sink {
 public:
  Sink(const RunConfig& cfg, std::vector<std::string> formats, std::ostream& out, std::ostream& err)
      : dir_(cfg.out_dir), format_(cfg.format), formats_(std::move(formats)), out_(out), err_(err) {
    if (!format_.empty() && std::find(formats_.begin(), formats_.end(), format_) == formats_.end())
      throw InvalidArgument("format " + format_ + " is not available for this command");
  }

  bool to_stdout() const { return dir_.empty(); }

  bool wants(const std::string& f) const {
    if (!format_.empty()) return f == format_;
    return dir_.empty() ? f == formats_.front() : true;
  }

  void emit(const std::string& stem, const std::string& ext, const std::string& content) {
    if (!wants(ext)) return;
    if (dir_.empty()) {
      out_ << content;
      return;
    }
    std::filesystem::create_directories(dir_);
    const auto path = std::filesystem::path(dir_) / (stem + "." + ext);
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + path.string());
    err_ << "wrote " << path.string() << '\n';
  }

 private:
  std::string dir_, format_;
  std::vector<std::string> formats_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string fmt_complex(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g%+gi", z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag());
  return buf;
}

std::string csv_line(std::initializer_list<double> values) {
  std::string line;
  char buf[40];
  for (const double v : values) {
    std::snprintf(buf, sizeof buf, "%.15g", v == 0.0 ? 0.0 : v);
    if (!line.empty()) line += ',';
    line += buf;
  }
  return line + '\n';
}

json pair(Complex z) { return json::array({z.real(), z.imag()}); }

json pairs(const std::vector<Complex>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back(pair(z));
  return a;
}

std::vector<Complex> scaled_spectrum(int m, Complex b, const RunConfig& cfg) {
  SpectrumOptions so;
  so.accuracy = cfg.accuracy;
  return scaled_eigenvalues(SexticProblem(m), b, so).eigenvalues;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, bool scaled, std::ostream& out, std::ostream& err) {
  Sink sink(cfg, {"csv", "json", "svg"}, out, err);
  const Complex b = cfg.b_value();
  const SexticProblem prob(cfg.m);
  SpectrumOptions so;
  so.accuracy = cfg.accuracy;
  const Spectrum s = scaled ? scaled_eigenvalues(prob, b, so) : eigenvalues(prob, b, so);
  const std::string stem = "spectrum_m" + std::to_string(cfg.m) + (scaled ? "_scaled" : "");
  sink.emit(stem, "csv", spectrum_csv(s));
  sink.emit(stem, "json", spectrum_json(cfg.m, b, scaled, s));
  const std::vector<ScatterLayer> layers{{s.eigenvalues, "#1f77b4", 2.5, "eigenvalues"}};
  sink.emit(stem, "svg",
            scatter_svg(layers, (scaled ? "scaled spectrum, m = " : "spectrum, m = ") + std::to_string(cfg.m) +
                                    ", b = " + fmt_complex(b)));
  return ok;
}

int cmd_crossings(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Sink sink(cfg, {"csv", "json", "svg"}, out, err);
  CrossingOptions co;
  co.merge_tol = cfg.merge_tol;
  const CrossingSet cs = crossing_set(cfg.m, co);
  const std::string stem = "crossings_m" + std::to_string(cfg.m);
  sink.emit(stem, "csv", crossings_csv(std::span<const CrossingSet>(&cs, 1)));
  sink.emit(stem, "json", crossings_json(cs));
  std::vector<Complex> upper, lower;
  for (const auto& c : cs.points) (c.b.imag() > 0.0 ? upper : lower).push_back(c.b);
  const std::vector<ScatterLayer> layers{{upper, "#d62728", 2.5, "upper half plane"},
                                         {lower, "#999999", 2.5, "conjugates"}};
  sink.emit(stem, "svg", scatter_svg(layers, "level crossings, m = " + std::to_string(cfg.m)));

  int total = 0;
  for (const auto& c : cs.points) total += c.multiplicity;
  err << "m = " << cfg.m << ": " << total << " crossings, " << upper.size() << " upper, row sizes";
  for (const auto& r : cs.rows) err << ' ' << r.size();
  err << (cs.rows_match ? " (expected)" : " (unexpected)") << '\n';
  for (const auto& w : cs.warnings) err << "warning: " << w << '\n';
  return cs.warnings.empty() ? ok : conjecture;
}

int cmd_monodromy(const RunConfig& cfg, bool all, int row, int position, std::ostream& out, std::ostream& err) {
  Sink sink(cfg, {"json", "csv", "svg"}, out, err);
  if (!all && (row < 1 || position < 1)) throw InvalidArgument("monodromy: give --all or both --row and --position");
  if (all && sink.to_stdout() && sink.wants("svg"))
    throw InvalidArgument("monodromy --all writes one SVG per crossing; use --out DIR");
  const CrossingSet cs = crossing_set(cfg.m);
  const auto opts = cfg.monodromy();

  std::vector<std::pair<int, int>> targets;
  if (all) {
    for (const auto& r : cs.rows)
      for (const int i : r) targets.emplace_back(cs.points[i].row, cs.points[i].position);
  } else {
    targets.emplace_back(row, position);
  }

  json results = json::array();
  std::string csv = "m,row,position,re_b,im_b,first,second,conjectured_first,conjectured_second,match\n";
  int mismatches = 0;
  for (const auto& [l, k] : targets) {
    MonodromyResult r;
    bool transposition = true;
    try {
      r = monodromy_permutation(cs, l, k, opts);
    } catch (const MonodromyViolation& v) {
      transposition = false;
      r.row = l, r.position = k, r.braid = v.braid();
      err << "violation: " << v.what() << '\n';
    }
    const auto conj = conjectured_transposition(cfg.m, l, k);
    const bool match = transposition && r.transposition == conj;
    if (!match) ++mismatches;
    for (const auto& c : cs.points)
      if (c.b.imag() > 0.0 && c.row == l && c.position == k) r.crossing = c.b;
    json entry{{"row", l},
               {"position", k},
               {"crossing", pair(r.crossing)},
               {"transposition", transposition ? json::array({r.transposition.first, r.transposition.second})
                                               : json(nullptr)},
               {"conjectured", json::array({conj.first, conj.second})},
               {"match", match},
               {"braid", json::parse(braid_json(r.braid))}};
    results.push_back(std::move(entry));
    char buf[200];
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.15g,%.15g,%d,%d,%d,%d,%d\n", cfg.m, l, k, r.crossing.real(),
                  r.crossing.imag(), r.transposition.first, r.transposition.second, conj.first, conj.second,
                  match ? 1 : 0);
    csv += buf;
    sink.emit("monodromy_m" + std::to_string(cfg.m) + "_row" + std::to_string(l) + "_pos" + std::to_string(k), "svg",
              braid_svg(r.braid));
  }
  const std::string stem = "monodromy_m" + std::to_string(cfg.m) + (all ? "" : "_row" + std::to_string(row) +
                                                                               "_pos" + std::to_string(position));
  sink.emit(stem, "json", json{{"m", cfg.m}, {"results", results}}.dump());
  sink.emit(stem, "csv", csv);
  err << "m = " << cfg.m << ": " << targets.size() - mismatches << " of " << targets.size()
      << " loops give the conjectured transposition\n";
  return mismatches == 0 ? ok : conjecture;
}

int cmd_oval(const RunConfig& cfg, int spectrum_m, std::ostream& out, std::ostream& err) {
  Sink sink(cfg, {"csv", "json", "svg"}, out, err);
  const Complex b = cfg.b_value();
  const CubicOval oval = gamma_oval(b, cfg.samples);
  std::string csv = "nu,re,im\n";
  for (std::size_t i = 0; i < oval.points.size(); ++i)
    csv += csv_line({oval.nu[i], oval.points[i].real(), oval.points[i].imag()});
  std::vector<Complex> cloud;
  if (spectrum_m > 0) cloud = scaled_spectrum(spectrum_m, b, cfg);
  json j{{"b", pair(b)},
         {"nu_range", {oval.nu_begin, oval.nu_end}},
         {"points", pairs(oval.points)},
         {"foci", pairs({oval.foci.begin(), oval.foci.end()})}};
  if (spectrum_m > 0) j["scaled_spectrum"] = {{"m", spectrum_m}, {"eigenvalues", pairs(cloud)}};
  const std::string stem = "oval";
  sink.emit(stem, "csv", csv);
  sink.emit(stem, "json", j.dump());
  const std::vector<std::vector<Complex>> curves{oval.points};
  const std::vector<ScatterLayer> markers{{cloud, "#1f77b4", 1.8, spectrum_m > 0 ? "scaled spectrum" : ""},
                                          {{oval.foci.begin(), oval.foci.end()}, "#d62728", 4.0, "foci"}};
  sink.emit(stem, "svg", curves_svg(curves, markers, "oval and foci, b = " + fmt_complex(b)));
  return ok;
}

int cmd_foci(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Sink sink(cfg, {"csv", "json"}, out, err);
  const Complex b = cfg.b_value();
  const auto f = foci(b);
  const auto crit = critical_lambdas(b);
  std::string csv = "kind,re,im\n";
  const char* names[] = {"origin", "focus_plus", "focus_minus"};
  for (int k = 0; k < 3; ++k) csv += std::string(names[k]) + ',' + csv_line({f[k].real(), f[k].imag()});
  for (int k = 0; k < 2; ++k) csv += "critical_" + std::to_string(k + 1) + ',' + csv_line({crit[k].real(), crit[k].imag()});
  json j{{"b", pair(b)}, {"foci", pairs({f.begin(), f.end()})}, {"critical_lambdas", pairs({crit.begin(), crit.end()})}};
  if (b.imag() == 0.0) {
    const auto [l, r] = support_interval_real(b.real());
    j["support_interval"] = {l, r};
    csv += "support_left," + csv_line({l, 0.0}) + "support_right," + csv_line({r, 0.0});
  }
  sink.emit("foci", "csv", csv);
  sink.emit("foci", "json", j.dump());
  return ok;
}

int cmd_support(const RunConfig& cfg, int expect_legs, std::ostream& out, std::ostream& err) {
  Sink sink(cfg, {"csv", "json", "svg"}, out, err);
  const Complex b = cfg.b_value();
  const auto g = support_geometry(b, cfg.grid, 0.5, 0.2, cfg.local_grid, cfg.trajectory());
  std::string csv = "re,im,scan\n";
  auto tagged = [&](const std::vector<Complex>& pts, const char* tag) {
    for (const auto& p : pts) {
      std::string line = csv_line({p.real(), p.imag()});
      line.pop_back();
      csv += line + ',' + tag + '\n';
    }
  };
  tagged(g.points, "coarse");
  tagged(g.local_points, "local");
  const int legs = g.legs(cfg.leg_tol);
  json j{{"b", pair(b)},
         {"grid", cfg.grid},
         {"step", g.step},
         {"points", pairs(g.points)},
         {"local_points", pairs(g.local_points)},
         {"ends", pairs({g.ends.begin(), g.ends.end()})},
         {"end_distance", g.distance},
         {"tolerance", cfg.leg_tol},
         {"legs", legs}};
  sink.emit("support", "csv", csv);
  sink.emit("support", "json", j.dump());
  const std::vector<ScatterLayer> layers{{g.points, "#1f77b4", 2.5, "support (grid)"},
                                         {g.local_points, "#2ca02c", 1.2, "support (local)"},
                                         {{g.ends.begin(), g.ends.end()}, "#d62728", 4.0, "0 and foci"}};
  sink.emit("support", "svg", scatter_svg(layers, "support scan, b = " + fmt_complex(b)));
  char buf[200];
  std::snprintf(buf, sizeof buf, "end distances: origin %.4f, focus+ %.4f, focus- %.4f; legs %d\n", g.distance[0],
                g.distance[1], g.distance[2], legs);
  err << buf;
  if (expect_legs > 0 && legs != expect_legs) {
    err << "support geometry: expected " << expect_legs << " legs, found " << legs << '\n';
    return conjecture;
  }
  return ok;
}

int cmd_cauchy(const RunConfig& cfg, const std::vector<std::string>& zs, int spectrum_m, std::ostream& out,
               std::ostream& err) {
  Sink sink(cfg, {"csv", "json"}, out, err);
  const Complex b = cfg.b_value();
  std::vector<Complex> points;
  for (const auto& z : zs) points.push_back(parse_complex(z));
  if (points.empty()) {
    // A ring at 1.5 times the support radius about its centre.
    const auto oval = gamma_oval(b, 200);
    Complex centre = 0.0;
    for (const auto& p : oval.points) centre += p;
    centre /= static_cast<double>(oval.points.size());
    double radius = 0.0;
    for (const auto& p : oval.points) radius = std::max(radius, std::abs(p - centre));
    for (int k = 0; k < 16; ++k) points.push_back(centre + 1.5 * radius * std::polar(1.0, 2 * std::numbers::pi * k / 16));
  }
  std::vector<Complex> cloud;
  if (spectrum_m > 0) cloud = scaled_spectrum(spectrum_m, b, cfg);
  std::string csv = spectrum_m > 0 ? "re_z,im_z,re_c,im_c,re_empirical,im_empirical,relative_error\n"
                                   : "re_z,im_z,re_c,im_c\n";
  json rows = json::array();
  for (const auto& z : points) {
    const Complex c = cauchy_transform(b, z);
    json row{{"z", pair(z)}, {"cauchy", pair(c)}};
    if (spectrum_m > 0) {
      const Complex e = empirical_cauchy(cloud, z);
      const double rel = std::abs(c - e) / std::abs(e);
      csv += csv_line({z.real(), z.imag(), c.real(), c.imag(), e.real(), e.imag(), rel});
      row["empirical"] = pair(e);
      row["relative_error"] = rel;
    } else {
      csv += csv_line({z.real(), z.imag(), c.real(), c.imag()});
    }
    rows.push_back(std::move(row));
  }
  sink.emit("cauchy", "csv", csv);
  sink.emit("cauchy", "json", json{{"b", pair(b)}, {"spectrum_m", spectrum_m}, {"values", rows}}.dump());
  return ok;
}

int cmd_trajectories(const RunConfig& cfg, const std::vector<double>& lambda, std::ostream& out,
                     std::ostream& err) {
  Sink sink(cfg, {"json", "svg"}, out, err);
  if (lambda.empty()) throw InvalidArgument("trajectories: --lambda re,im is required");
  const Complex b = cfg.b_value();
  const Complex l(lambda[0], lambda.size() > 1 ? lambda[1] : 0.0);
  auto opts = cfg.trajectory();
  opts.keep_paths = true;
  const auto topo = trace_horizontal_trajectories(b, l, opts);
  static const char* outcomes[] = {"captured", "escaped", "exhausted"};
  json rays = json::array();
  std::vector<std::vector<Complex>> paths;
  for (const auto& r : topo.rays) {
    rays.push_back({{"origin", r.origin},
                    {"outcome", outcomes[static_cast<int>(r.outcome)]},
                    {"target", r.target},
                    {"mass", r.mass},
                    {"path", pairs(r.path)}});
    paths.push_back(r.path);
  }
  json conns = json::array();
  for (const auto& c : topo.connections) conns.push_back({{"from", c.from}, {"to", c.to}, {"mass", c.mass}});
  json j{{"b", pair(b)},
         {"lambda", pair(l)},
         {"zeros", pairs({topo.zeros.begin(), topo.zeros.end()})},
         {"pole", pair(topo.pole)},
         {"connections", conns},
         {"zero_zero", topo.zero_zero},
         {"zero_pole", topo.zero_pole},
         {"ambiguous", topo.ambiguous},
         {"degenerate", topo.degenerate},
         {"total_mass", topo.total_mass},
         {"in_support", topo.in_support},
         {"rays", rays}};
  sink.emit("trajectories", "json", j.dump());
  const std::vector<ScatterLayer> markers{{{topo.zeros.begin(), topo.zeros.end()}, "#d62728", 4.0, "zeros"},
                                          {{topo.pole}, "#000000", 4.0, "pole"}};
  sink.emit("trajectories", "svg",
            curves_svg(paths, markers, "critical trajectories, b = " + fmt_complex(b) + ", L = " + fmt_complex(l)));
  err << "connections " << topo.connections.size() << ", total mass " << topo.total_mass
      << (topo.in_support ? ", in the support\n" : ", not in the support\n");
  return ok;
}

int cmd_quartic(const RunConfig& cfg, int from, int to, int count, std::ostream& out, std::ostream& err) {
  Sink sink(cfg, {"csv", "json", "svg"}, out, err);
  if (from < 1 || to < from) throw InvalidArgument("quartic: need 1 <= --from <= --to");
  std::vector<QuarticMap> maps;
  CrossingOptions co;
  co.merge_tol = cfg.merge_tol;
  for (int m = from; m <= to; ++m) maps.push_back(quartic_map(crossing_set(m, co)));
  std::string csv = "m,re_beta,im_beta\n";
  json jm = json::array();
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  std::vector<ScatterLayer> layers;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& q = maps[i];
    for (const auto& z : q.betas) csv += std::to_string(q.m) + ',' + csv_line({z.real(), z.imag()});
    jm.push_back({{"m", q.m}, {"n", q.n}, {"betas", pairs(q.betas)}});
    layers.push_back({q.betas, colors[i % 7], 2.0, "m = " + std::to_string(q.m)});
  }
  json drift = json::array();
  for (std::size_t i = 0; i + 1 < maps.size(); ++i) {
    const double d = beta_drift(maps[i].betas, maps[i + 1].betas, count);
    drift.push_back({{"from", maps[i].m}, {"to", maps[i + 1].m}, {"value", d}});
    err << "drift " << maps[i].m << " -> " << maps[i + 1].m << ": " << d << '\n';
  }
  const std::string stem = "quartic_m" + std::to_string(from) + "_" + std::to_string(to);
  sink.emit(stem, "csv", csv);
  sink.emit(stem, "json", json{{"maps", jm}, {"drift_count", count}, {"drift", drift}}.dump());
  sink.emit(stem, "svg", scatter_svg(layers, "crossings in the quartic parameter"));
  return ok;
}

int cmd_serve(const std::string& bind, int port, int max_m, std::ostream& err) {
  ServiceConfig sc;
  sc.max_m = max_m;
  Service service(sc);
  err << "serving on http://" << bind << ':' << port << '\n';
  err.flush();
  if (!service.listen(bind, port)) throw std::runtime_error("cannot listen on " + bind + ":" + std::to_string(port));
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Spectra, level crossings and monodromy of the even quasi-exactly solvable sextic", "qes");
  app.fallthrough();
  app.require_subcommand(1);
  RunConfig cfg;
  app.set_config("--config", "", "flat key=value file setting any option below");
  app.add_option("--m", cfg.m, "polynomial degree parameter")->check(CLI::Range(1, 100000));
  app.add_option("--b", cfg.b, "complex parameter as re,im")->delimiter(',')->expected(1, 2);
  app.add_option("--out", cfg.out_dir, "write files into this directory instead of stdout");
  app.add_option("--format", cfg.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  const auto positive = CLI::PositiveNumber;
  app.add_option("--merge-tol,--merge_tol", cfg.merge_tol)->check(positive);
  app.add_option("--accuracy", cfg.accuracy)->check(positive);
  app.add_option("--radius-fraction,--radius_fraction", cfg.radius_fraction)->check(positive);
  app.add_option("--gap-fraction,--gap_fraction", cfg.gap_fraction)->check(positive);
  app.add_option("--max-step,--max_step", cfg.max_step)->check(positive);
  app.add_option("--min-step,--min_step", cfg.min_step)->check(positive);
  app.add_option("--step-fraction,--step_fraction", cfg.step_fraction)->check(positive);
  app.add_option("--capture-steps,--capture_steps", cfg.capture_steps)->check(positive);
  app.add_option("--leg-tol,--leg_tol", cfg.leg_tol)->check(positive);
  app.add_option("--grid", cfg.grid)->check(CLI::Range(2, 10000));
  app.add_option("--local-grid,--local_grid", cfg.local_grid)->check(CLI::Range(2, 10000));
  app.add_option("--samples", cfg.samples)->check(CLI::Range(2, 10000000));

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues at one b");
  bool scaled = false;
  spectrum->add_flag("--scaled", scaled, "spectrum of the rescaled matrix");

  auto* crossings = app.add_subcommand("crossings", "level crossing points");

  auto* monodromy = app.add_subcommand("monodromy", "permutations around crossings");
  bool all = false;
  int row = 0, position = 0;
  monodromy->add_flag("--all", all, "every upper crossing");
  monodromy->add_option("--row", row)->check(CLI::PositiveNumber);
  monodromy->add_option("--position", position)->check(CLI::PositiveNumber);

  auto* asymptotics = app.add_subcommand("asymptotics", "limit of the scaled spectra");
  asymptotics->require_subcommand(1);
  int spectrum_m = 0, expect_legs = 0;
  std::vector<std::string> zs;
  std::vector<double> lambda;
  auto* oval = asymptotics->add_subcommand("oval", "oval of the nodal cubic with its foci");
  oval->add_option("--with-spectrum-m", spectrum_m, "overlay the scaled spectrum of this m")->check(CLI::PositiveNumber);
  auto* foci_cmd = asymptotics->add_subcommand("foci", "foci and critical eigenvalues");
  auto* support = asymptotics->add_subcommand("support", "support scan by trajectory topology");
  support->add_option("--expect-legs", expect_legs, "exit 4 unless this many legs are found")
      ->check(CLI::IsMember({1, 3}));
  auto* cauchy = asymptotics->add_subcommand("cauchy", "Cauchy transform of the limit measure");
  cauchy->add_option("--z", zs, "evaluation points re,im (default: a ring outside the support)");
  cauchy->add_option("--with-spectrum-m", spectrum_m, "compare with the scaled spectrum of this m")
      ->check(CLI::PositiveNumber);
  auto* trajectories = asymptotics->add_subcommand("trajectories", "critical horizontal trajectories");
  trajectories->add_option("--lambda", lambda, "limiting eigenvalue re,im")->delimiter(',')->expected(1, 2);

  auto* quartic = app.add_subcommand("quartic", "crossings in the quartic parameter");
  int from = 6, to = 10, count = 10;
  quartic->add_option("--from", from);
  quartic->add_option("--to", to);
  quartic->add_option("--drift-count", count)->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "HTTP service");
  std::string bind = "127.0.0.1";
  int port = 8080, max_m = 25;
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--bind", bind);
  serve->add_option("--max-m", max_m)->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (*spectrum) return cmd_spectrum(cfg, scaled, out, err);
    if (*crossings) return cmd_crossings(cfg, out, err);
    if (*monodromy) return cmd_monodromy(cfg, all, row, position, out, err);
    if (*oval) return cmd_oval(cfg, spectrum_m, out, err);
    if (*foci_cmd) return cmd_foci(cfg, out, err);
    if (*support) return cmd_support(cfg, expect_legs, out, err);
    if (*cauchy) return cmd_cauchy(cfg, zs, spectrum_m, out, err);
    if (*trajectories) return cmd_trajectories(cfg, lambda, out, err);
    if (*quartic) return cmd_quartic(cfg, from, to, count, out, err);
    if (*serve) return cmd_serve(bind, port, max_m, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\nRun with --help for more information.\n";
    return usage;
  } catch (const ConjectureViolation& e) {
    err << "conjecture violation: " << e.what() << '\n';
    return conjecture;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return usage;
}

}  // namespace qes::cli
