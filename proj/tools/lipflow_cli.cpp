// Scenario runner for the gradient-constrained minimizing-movements solver:
// parses a flat key-value configuration, executes the requested pipelines
// (domain check, slope certification, solve, energy bookkeeping, barrier
// construction and verification), and writes plain-text tables plus a
// manifest into the output directory.
//
// Exit codes: 0 all checks pass, 1 at least one check failed,
// 2 configuration or precondition errors.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "lipflow/lipflow.hpp"

namespace fs = std::filesystem;
using namespace lipflow;

namespace {

struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Runner {
  std::string config_path;
  std::string out_dir = "out";
  unsigned seed = 0;
  bool quiet = false;

  Manifest manifest;
  std::vector<CheckRow> rows;

  void note(const std::string& name, double value, double threshold, bool pass) {
    rows.push_back({name, value, threshold, pass});
    if (!quiet)
      std::printf("[%s] %-28s value=%s threshold=%s\n", pass ? "PASS" : "FAIL", name.c_str(),
                  format_number(value).c_str(), format_number(threshold).c_str());
  }

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }

  void write_summary() {
    std::ofstream out(fs::path(out_dir) / "summary.csv");
    out << "check,value,threshold,pass\n";
    for (const auto& r : rows)
      out << r.name << "," << format_number(r.value) << "," << format_number(r.threshold) << ","
          << (r.pass ? 1 : 0) << "\n";
    manifest.add_file("summary.csv", "verification summary, one row per check");
  }

  void finish() {
    write_summary();
    manifest.write(fs::path(out_dir) / "manifest.txt");
  }
};

void export_mesh(Runner& r, const Mesh& mesh) {
  std::vector<std::vector<double>> vrows, srows;
  for (int i = 0; i < mesh.n_vertices(); ++i)
    vrows.push_back({mesh.vertices[i].x, mesh.vertices[i].y, double(mesh.is_boundary[i])});
  for (const auto& s : mesh.simplices)
    srows.push_back({double(s[0]), double(s[1]), double(s[2])});
  write_table(fs::path(r.out_dir) / "mesh_vertices.dat", "x1 x2 is_boundary", vrows);
  write_table(fs::path(r.out_dir) / "mesh_simplices.dat", "v0 v1 v2", srows);
  r.manifest.add_file("mesh_vertices.dat", "mesh vertices");
  r.manifest.add_file("mesh_simplices.dat", "mesh simplices (vertex indices)");
}

void export_certificate(Runner& r, const SlopeCertificate& cert, const std::string& name) {
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < cert.times.size(); ++k) {
    rows.push_back({cert.times[k], cert.w_minus[k].x, cert.w_minus[k].y, cert.w_plus[k].x,
                    cert.w_plus[k].y, cert.Q});
  }
  write_table(fs::path(r.out_dir) / name, "t wminus1 wminus2 wplus1 wplus2 Q", rows);
  r.manifest.add_file(name, "slope certificate time series");
}

void export_trajectory(Runner& r, const Trajectory& traj, const Mesh& mesh) {
  for (int i = 0; i <= traj.last_index(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "step_%03d.dat", i);
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < mesh.n_vertices(); ++k)
      rows.push_back({mesh.vertices[k].x, mesh.vertices[k].y, traj.steps[i][k]});
    write_table(fs::path(r.out_dir) / name, "x1 x2 u", rows);
    r.manifest.add_file(name, "nodal solution at step " + std::to_string(i));
  }
}

void export_energy(Runner& r, const EnergyReport& rep) {
  std::ofstream out(fs::path(r.out_dir) / "energy.csv");
  out << "i,energy,increment,slack\n";
  double cum_inc = 0.0, cum_data = 0.0;
  for (const auto& row : rep.rows) {
    cum_inc += row.increment;
    cum_data += row.data_term;
    double slack = rep.rows[0].energy + cum_data - row.energy - cum_inc;
    out << row.i << "," << format_number(row.energy) << "," << format_number(row.increment) << ","
        << format_number(slack) << "\n";
  }
  r.manifest.add_file("energy.csv", "per-step energies, increments, estimate slack");
}

void export_conjugate_table(Runner& r, const ConvexIntegrand& f, double radius, int n) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 eta{-radius + 2 * radius * i / (n - 1), -radius + 2 * radius * j / (n - 1)};
      rows.push_back({eta.x, eta.y, conjugate(f, eta)});
    }
  write_table(fs::path(r.out_dir) / "conjugate.dat", "eta1 eta2 fstar", rows);
  r.manifest.add_file("conjugate.dat", "sampled convex conjugate");
}

bool is_worked_example(const Scenario& s) {
  return s.integrand.name == "quadratic" && s.domain.name == "disk" &&
         s.data.name == "rotating" && std::abs(s.domain.diam - 2.0) < 1e-12 &&
         norm(s.domain.boundary(M_PI) - Vec2{-1.0, 0.0}) < 1e-9 &&
         norm(s.x_o - Vec2{-1.0, 0.0}) < 1e-9 && std::abs(s.data.grad_g_sup - 1.0) < 1e-9;
}

void figure_traces(Runner& r, const Scenario& s, const Barrier& b,
                   const std::vector<double>& times) {
  int idx = 0;
  for (double t : times) {
    char name[64];
    std::snprintf(name, sizeof name, "trace_t%02d.dat", idx);
    std::vector<std::vector<double>> rows;
    bool worked = is_worked_example(s) && b.sign == BarrierSign::lower;
    Vec2 center{2.0 / b.alpha, 0.0};
    double radius = 1.0 + 2.0 / b.alpha;
    for (int j = 0; j < 256; ++j) {
      double th = 2.0 * M_PI * j / 256;
      Vec2 x = s.domain.boundary(th);
      // the comparison-set boundary: closed-form ball for the worked
      // example, ray bisection otherwise
      Vec2 xt = worked ? center + radius * Vec2{std::cos(th), std::sin(th)}
                       : sublevel_boundary_point(b, t, {std::cos(th), std::sin(th)});
      rows.push_back({th, s.data.g(x, t), b.eval(x, t), b.eval(xt, t)});
    }
    write_table(fs::path(r.out_dir) / name,
                "theta g_on_boundary v_on_boundary v_on_comparison_set_boundary", rows);
    r.manifest.add_file(name, "barrier trace at t = " + format_number(t));

    // nodal dump of the barrier over the comparison set: polar grid from
    // y(t) out to the traced boundary
    std::snprintf(name, sizeof name, "barrier_field_t%02d.dat", idx++);
    std::vector<std::vector<double>> field;
    Vec2 origin = b.y(t);
    for (int j = 0; j < 64; ++j) {
      double th = 2.0 * M_PI * j / 64;
      Vec2 dir{std::cos(th), std::sin(th)};
      Vec2 edge = worked ? center + radius * dir : sublevel_boundary_point(b, t, dir);
      for (int i = 1; i <= 16; ++i) {
        Vec2 x = origin + (double(i) / 16) * (edge - origin);
        field.push_back({x.x, x.y, b.eval(x, t)});
      }
    }
    write_table(fs::path(r.out_dir) / name, "x1 x2 v", field);
    r.manifest.add_file(name, "barrier values on the comparison set at t = " + format_number(t));
  }
}

int do_run(Runner& r, bool domain_only, bool certify_only, bool barrier_only) {
  Config cfg;
  std::unique_ptr<Scenario> s;
  try {
    cfg = Config::parse_file(r.config_path);
    s = build_scenario(cfg, r.seed);
  } catch (Error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }
  for (const auto& [k, v] : cfg.kv) r.manifest.params[k] = v;
  r.manifest.params["seed"] = std::to_string(r.seed);
  fs::create_directories(r.out_dir);

  // domain admissibility gates everything else
  if (cfg.flag("checks.domain", true)) {
    auto rep = check_domain(s->domain, cfg.integer("checks.domain_samples", 256));
    r.note("domain.R_uniform_convexity", rep.worst_slack, 1e-8, rep.pass);
    if (!rep.pass && !domain_only) {
      std::fprintf(stderr,
                   "precondition failed: the domain is not R-uniformly convex "
                   "(worst slack %g at R = %g)\n",
                   rep.worst_slack, s->domain.R);
      r.finish();
      return 2;
    }
  }
  if (domain_only) {
    r.finish();
    return r.all_pass() ? 0 : 1;
  }

  // slope certification at the pinned boundary point
  SlopeCertificate cert;
  if (cfg.flag("checks.bsc", true) || barrier_only || certify_only) {
    try {
      cert = certify_tbsc(s->data, s->domain, s->x_o, cfg.integer("bsc.time_samples", 65),
                          cfg.integer("bsc.boundary_samples", 256));
      cert = widen_slopes(cert, s->data, s->domain);
      r.note("bsc.Q", cert.Q, cfg.num("bsc.max_Q", 1e3), cert.Q <= cfg.num("bsc.max_Q", 1e3));
      export_certificate(r, cert, "certificate.dat");
    } catch (Infeasible& e) {
      std::fprintf(stderr, "t-BSC certification failed: %s (t = %g)\n", e.what(), e.t);
      r.finish();
      return 2;
    }
  }
  if (certify_only) {
    r.finish();
    return r.all_pass() ? 0 : 1;
  }

  // barrier construction + verification
  if (cfg.flag("checks.barrier", true) || barrier_only) {
    double alpha_user = s->barrier_alpha;
    double alpha0 = alpha_min(s->integrand, s->domain, s->data, cert);
    double alpha = std::max(alpha_user, alpha0);
    Barrier lower = build(s->integrand, s->domain, s->data, cert, alpha, BarrierSign::lower);
    Barrier upper = build(s->integrand, s->domain, s->data, cert, -alpha, BarrierSign::upper);
    for (const Barrier* b : {&lower, &upper}) {
      std::string tag = b->sign == BarrierSign::lower ? "barrier.lower." : "barrier.upper.";
      auto rep = verify(*b, s->integrand, s->domain, s->data,
                        cfg.integer("barrier.space_samples", 48),
                        cfg.integer("barrier.time_samples", 64));
      r.note(tag + "pin_err", rep.pin_err, 1e-10, rep.pin_err <= 1e-10);
      r.note(tag + "ordering_viol", rep.ordering_viol, 1e-9, rep.ordering_viol <= 1e-9);
      r.note(tag + "subsol_viol", rep.subsol_viol, 1e-6, rep.subsol_viol <= 1e-6);
      r.note(tag + "lip_const", rep.lip_const, b->lip_budget + 1e-8,
             rep.lip_const <= b->lip_budget + 1e-8);
    }
    if (is_worked_example(*s)) {
      // cross-check the explicit representative of the worked scenario
      Barrier cat = rotating_disk_barrier(std::max(alpha_user, 1.0), s->data.T);
      auto rep = verify(cat, s->integrand, s->domain, s->data, 48, 64);
      r.note("barrier.worked.pin_err", rep.pin_err, 1e-12, rep.pin_err <= 1e-12);
      r.note("barrier.worked.ordering_viol", rep.ordering_viol, 1e-10,
             rep.ordering_viol <= 1e-10);
      r.note("barrier.worked.subsol_viol", rep.subsol_viol, 1e-8, rep.subsol_viol <= 1e-8);
      r.note("barrier.worked.lip_const", rep.lip_const, cat.lip_budget + 1e-9,
             rep.lip_const <= cat.lip_budget + 1e-9);
      auto sub = sublevel_geometry(cat, s->domain, 0.0, 256);
      r.note("barrier.worked.sublevel_pin", std::abs(sub.x_o_defining_value), 1e-10,
             sub.x_o_on_boundary);
      r.note("barrier.worked.sublevel_contained", sub.worst_defining_value, 1e-9,
             sub.omega_contained);
      if (!s->trace_times.empty()) figure_traces(r, *s, cat, s->trace_times);
    } else if (!s->trace_times.empty()) {
      figure_traces(r, *s, lower, s->trace_times);
    }
  }
  if (barrier_only) {
    r.finish();
    return r.all_pass() ? 0 : 1;
  }

  // minimizing-movements solve and its bookkeeping
  if (cfg.flag("checks.solve", true)) {
    if (s->mesh.n_vertices() == 0) {
      std::fprintf(stderr, "configuration error: checks.solve needs mesh.target_edge\n");
      return 2;
    }
    export_mesh(r, s->mesh);
    Trajectory traj;
    try {
      traj = solve(s->solver);
    } catch (InfeasibleConstraint& e) {
      std::fprintf(stderr,
                   "precondition failed: L = %g does not dominate the data slopes (%s)\n",
                   s->solver.L, e.what());
      r.finish();
      return 2;
    } catch (Error& e) {
      std::fprintf(stderr, "solver failure: %s\n", e.what());
      r.finish();
      return 1;
    }
    export_trajectory(r, traj, s->mesh);

    double lip = 0.0;
    for (const auto& u : traj.steps) lip = std::max(lip, discrete_lipschitz(u, s->mesh));
    r.note("solve.max_lipschitz", lip, s->solver.L + 1e-8, lip <= s->solver.L + 1e-8);

    if (cfg.flag("checks.energy", true)) {
      try {
        auto rep = energy_report(traj, s->solver);
        r.note("energy.worst_slack", rep.worst_slack, -1e-7, rep.worst_slack >= -1e-7);
        export_energy(r, rep);
      } catch (EstimateViolated& e) {
        r.note("energy.worst_slack", -1.0, -1e-7, false);
        std::fprintf(stderr, "energy estimate violated at step %d\n", e.step);
      }
    }
    if (cfg.flag("checks.initial", true)) {
      double v = initial_attainment(traj, s->solver);
      double cap = cfg.num("checks.initial_cap", 1.0);
      r.note("initial.attainment", v, cap, v <= cap);
    }
  }

  if (cfg.flag("output.conjugate_table", false))
    export_conjugate_table(r, s->integrand, cfg.num("output.conjugate_radius", 3.0),
                           cfg.integer("output.conjugate_n", 33));

  r.finish();
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-constrained minimizing movements with conjugate barriers"};
  app.require_subcommand(1);

  Runner r;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", r.config_path, "run configuration file")->required();
    sub->add_option("--out", r.out_dir, "output directory");
    sub->add_option("--seed", r.seed, "mesh jitter seed");
    sub->add_flag("--quiet", r.quiet, "suppress per-check output");
  };

  auto* run_cmd = app.add_subcommand("run", "full pipeline: solve + checks + exports");
  add_common(run_cmd);
  auto* dom_cmd = app.add_subcommand("check-domain", "R-uniform convexity check only");
  add_common(dom_cmd);
  auto* bsc_cmd = app.add_subcommand("certify-bsc", "slope certification only");
  add_common(bsc_cmd);
  auto* bar_cmd = app.add_subcommand("barrier", "barrier construction and verification");
  add_common(bar_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(r, false, false, false);
    if (dom_cmd->parsed()) return do_run(r, true, false, false);
    if (bsc_cmd->parsed()) return do_run(r, false, true, false);
    if (bar_cmd->parsed()) return do_run(r, false, false, true);
  } catch (Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
