// Acceptance suite: one test case per criterion, executed in order, each
// printing a single PASS/FAIL line with its runtime.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

#include "lipflow/lipflow.hpp"
#include "support/oracles.hpp"

using namespace lipflow;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const char* what, bool pass, double seconds) {
  std::printf("criterion %2d: %s  (%s, %.2f s)\n", criterion, pass ? "PASS" : "FAIL", what,
              seconds);
  std::fflush(stdout);
}

// The reference scenario of criteria 3, 4 and 7: disk mesh with target edge
// 0.05, h = pi/128, T = pi/2, quadratic integrand, rotating datum.
struct BigScenario {
  ConvexDomain dom = disk_domain({0, 0}, 1.0);
  ConvexIntegrand f = quadratic_integrand();
  BoundaryDatum data;
  Mesh mesh;
  SolverConfig cfg;
  Trajectory traj;  // solved at L = 4

  BigScenario() {
    data = rotating_datum(dom, 1.0, 1.0, M_PI / 2);
    mesh = mesh_domain(dom, 0.05);
    cfg = SolverConfig{M_PI / 128, 4.0, &mesh, &f, &data};
    cfg.inner_tol = 1e-10;
    traj = solve(cfg);
  }
};

BigScenario& big() {
  static BigScenario s;
  return s;
}

}  // namespace

TEST_CASE("criterion 1: worked barrier reproduction at alpha = 2") {
  Stopwatch timer;
  auto dom = disk_domain({0, 0}, 1.0);
  auto f = quadratic_integrand();
  auto data = rotating_datum(dom, 1.0, 1.0, M_PI);
  auto b = rotating_disk_barrier(2.0, M_PI);

  // (a) explicit representatives to machine precision
  double rep_err = 0.0;
  for (int k = 0; k <= 128; ++k) {
    double t = M_PI * k / 128;
    Vec2 y{1.0 - std::cos(t), -std::sin(t)};
    rep_err = std::max(rep_err, norm(b.y(t) - y));
    rep_err = std::max(rep_err, std::abs(b.c(t) - (2.5 - std::cos(t))));
  }
  bool pass_a = rep_err <= 1e-14;

  // (b) comparison set = B_2((1,0)): defining equality on its boundary
  double ball_err = 0.0;
  for (int k = 0; k < 16; ++k) {
    double t = M_PI * k / 16;
    for (int j = 0; j < 256; ++j) {
      double th = 2.0 * M_PI * j / 256;
      Vec2 p = Vec2{1.0, 0.0} + 2.0 * Vec2{std::cos(th), std::sin(th)};
      double affine = b.g_at_xo(t) + dot(b.affine_slope(t), p - b.x_o);
      ball_err = std::max(ball_err, std::abs(b.eval(p, t) - affine));
    }
  }
  bool pass_b = ball_err <= 1e-9;

  // (c) pinning over 128 times
  double pin = 0.0;
  for (int k = 0; k < 128; ++k) {
    double t = M_PI * k / 128;
    pin = std::max(pin, std::abs(b.eval(b.x_o, t) - data.g(b.x_o, t)));
  }
  bool pass_c = pin <= 1e-12;

  // (d), (e), (f) via the verification sweep (64 x 128 samples)
  auto rep = verify(b, f, dom, data, 64, 128);
  bool pass_d = rep.ordering_viol <= 1e-10;
  bool pass_e = rep.subsol_viol <= 1e-8;
  bool pass_f = rep.lip_const <= 3.0 + 1e-12;

  bool pass = pass_a && pass_b && pass_c && pass_d && pass_e && pass_f;
  report(1, "worked barrier, all six claims", pass, timer.seconds());
  CHECK(pass_a);
  CHECK(pass_b);
  CHECK(pass_c);
  CHECK(pass_d);
  CHECK(pass_e);
  CHECK(pass_f);
  CHECK(timer.seconds() < 5.0);
}

TEST_CASE("criterion 2: sub-threshold alpha fails the sub-solution claim") {
  Stopwatch timer;
  auto dom = disk_domain({0, 0}, 1.0);
  auto f = quadratic_integrand();
  auto data = rotating_datum(dom, 1.0, 1.0, M_PI);
  auto b = rotating_disk_barrier(0.5, M_PI);
  auto rep = verify(b, f, dom, data, 64, 128);
  bool pass = rep.subsol_viol > 0.4;
  report(2, "alpha = 0.5 rejected by the residual", pass, timer.seconds());
  CHECK(pass);
  CHECK(timer.seconds() < 5.0);
}

TEST_CASE("criterion 3: heat-equation oracle within 5 percent") {
  Stopwatch timer;
  auto& s = big();
  int ell = s.traj.last_index();
  double tau = s.cfg.h / 8.0;
  auto cn = oracle::crank_nicolson(s.mesh, s.data, tau, 8 * ell);

  double err2 = 0.0, ref2 = 0.0;
  for (int i = 1; i <= ell; ++i) {
    const Field& mm = s.traj.steps[i];
    const Field& ref = cn[8 * i];
    for (int k = 0; k < s.mesh.n_vertices(); ++k) {
      double d = mm[k] - ref[k];
      err2 += s.cfg.h * s.mesh.lumped_mass[k] * d * d;
      ref2 += s.cfg.h * s.mesh.lumped_mass[k] * ref[k] * ref[k];
    }
  }
  double rel = std::sqrt(err2 / ref2);
  bool pass = rel <= 0.05;
  char what[96];
  std::snprintf(what, sizeof what, "relative L2 error %.4f vs Crank-Nicolson", rel);
  report(3, what, pass, timer.seconds());
  CHECK(pass);
  CHECK(timer.seconds() < 120.0);
}

TEST_CASE("criterion 4: telescoped energy estimate") {
  Stopwatch timer;
  auto& s = big();
  bool pass = false;
  double slack = -1.0;
  try {
    auto rep = energy_report(s.traj, s.cfg, 1e-7);
    slack = rep.worst_slack;
    pass = rep.worst_slack >= -1e-7;
  } catch (EstimateViolated&) {
    pass = false;
  }
  char what[96];
  std::snprintf(what, sizeof what, "worst slack %.3e", slack);
  report(4, what, pass, timer.seconds());
  CHECK(pass);
}

TEST_CASE("criterion 5: per-step minimality against the dense oracle") {
  Stopwatch timer;
  auto dom = disk_domain({0, 0}, 1.0);
  auto mesh = mesh_domain(dom, 0.45);
  auto f = quadratic_integrand();
  auto data = constant_datum(dom, 0.0, 1.0);
  REQUIRE(mesh.n_vertices() <= 40);

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  bool pass = true;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    double L = 1.0, h = 0.02;
    Vec2 a{0.6 * uni(rng), 0.6 * uni(rng)};
    Field gi = interpolate(mesh, [&](Vec2 p) { return dot(a, p); });
    Field up = gi;
    for (int k = 0; k < mesh.n_vertices(); ++k)
      if (!mesh.is_boundary[k]) up[k] += 1.5 * uni(rng);

    SolverConfig cfg{h, L, &mesh, &f, &data};
    cfg.inner_tol = 1e-8;
    Field u = step(up, gi, cfg);
    auto q = oracle::qp_oracle(mesh, up, gi, h, L);
    pass = pass && q.kkt_residual <= 1e-8 && q.max_violation <= 1e-8;

    detail::StepObjective obj{&mesh, &f, &up, h, 0.0, 0.0};
    double rel = std::abs(obj.value(u) - obj.value(q.v)) / (1.0 + std::abs(obj.value(q.v)));
    worst = std::max(worst, rel);
    pass = pass && rel <= 1e-6;
  }
  char what[96];
  std::snprintf(what, sizeof what, "worst relative objective gap %.2e", worst);
  report(5, what, pass, timer.seconds());
  CHECK(pass);
  CHECK(timer.seconds() < 30.0);
}

TEST_CASE("criterion 6: comparison and maximum principles, shift equivariance") {
  Stopwatch timer;
  auto dom = disk_domain({0, 0}, 1.0);
  auto mesh = mesh_domain(dom, 0.1);
  auto f = quadratic_integrand();
  auto data = rotating_datum(dom, 1.0, 1.0, M_PI / 4);
  BoundaryDatum data_up = data;
  auto base = data;
  data_up.g = [base](Vec2 x, double t) { return base.g(x, t) + 0.1; };
  data_up.g0 = [base](Vec2 x) { return base.g0(x) + 0.1; };

  SolverConfig cfg{M_PI / 64, 4.0, &mesh, &f, &data};
  cfg.inner_tol = 1e-12;
  SolverConfig cfg_up = cfg;
  cfg_up.data = &data_up;
  auto lo = solve(cfg);
  auto hi = solve(cfg_up);

  auto cmp = comparison_test(lo, hi, cfg.inner_tol);
  bool pass_order = cmp.max_violation <= 1e-6;

  double drift = 0.0;
  for (size_t i = 0; i < lo.steps.size(); ++i)
    for (size_t k = 0; k < lo.steps[i].size(); ++k)
      drift = std::max(drift, std::abs(hi.steps[i][k] - lo.steps[i][k] - 0.1));
  bool pass_shift = drift <= 1e-10;

  auto mp = max_principle_test(lo, hi, 1e-6);
  bool pass_mp = mp.interior_sup <= mp.boundary_sup + 1e-6;

  bool pass = pass_order && pass_shift && pass_mp;
  char what[96];
  std::snprintf(what, sizeof what, "ordering %.1e, shift drift %.1e", cmp.max_violation, drift);
  report(6, what, pass, timer.seconds());
  CHECK(pass_order);
  CHECK(pass_shift);
  CHECK(pass_mp);
  CHECK(timer.seconds() < 120.0);
}

TEST_CASE("criterion 7: the gradient constraint is inactive and L-independent") {
  Stopwatch timer;
  auto& s = big();
  double c_ref = 0.0;
  for (const auto& u : s.traj.steps)
    c_ref = std::max(c_ref, discrete_lipschitz(u, s.mesh));

  bool pass = c_ref < 4.0;
  double max_diff = 0.0;
  for (double L : {2.0, 3.0, 8.0}) {
    SolverConfig cfg = s.cfg;
    cfg.L = L;
    auto traj = solve(cfg);
    double cL = 0.0, diff = 0.0;
    for (size_t i = 0; i < traj.steps.size(); ++i) {
      cL = std::max(cL, discrete_lipschitz(traj.steps[i], s.mesh));
      for (size_t k = 0; k < traj.steps[i].size(); ++k)
        diff = std::max(diff, std::abs(traj.steps[i][k] - s.traj.steps[i][k]));
    }
    max_diff = std::max(max_diff, diff);
    pass = pass && std::abs(cL - c_ref) <= 1e-6 && cL < L;
  }

  bool rejected = false;
  try {
    SolverConfig cfg = s.cfg;
    cfg.L = 0.5;
    solve(cfg);
  } catch (InfeasibleConstraint&) {
    rejected = true;
  }
  pass = pass && rejected;

  char what[96];
  std::snprintf(what, sizeof what, "computed C %.4f, max nodal spread %.1e", c_ref, max_diff);
  report(7, what, pass, timer.seconds());
  CHECK(pass);
  CHECK(timer.seconds() < 300.0);
}

TEST_CASE("criterion 8: mollifier suite") {
  Stopwatch timer;
  bool pass = true;

  // ODE identity on an analytic series
  {
    std::vector<double> times, vals;
    for (int i = 0; i <= 64; ++i) {
      times.push_back(2.0 * i / 64);
      vals.push_back(std::sin(times.back()));
    }
    auto v = scalar_series(times, vals, 0.0);
    double h = 0.3;
    auto w = mollify(v, h);
    auto d = mollify_time_derivative(v, h);
    for (size_t k = 0; k < times.size(); ++k) {
      double residual = d.values[k][0] - (vals[k] - w.values[k][0]) / h;
      pass = pass && std::abs(residual) <= 1e-8;
    }
  }
  // closed form t - h(1 - e^{-t/h})
  {
    std::vector<double> times;
    for (int i = 0; i <= 16; ++i) times.push_back(i / 16.0);
    auto w = mollify(scalar_series(times, times, 0.0), 0.5);
    for (size_t k = 0; k < times.size(); ++k) {
      double t = times[k];
      pass = pass && std::abs(w.values[k][0] - (t - 0.5 * (1 - std::exp(-t / 0.5)))) <= 1e-10;
    }
  }
  // norm bound for r in {1, 2, inf}, including the pure-initial equality case
  {
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(i / 40.0);
    auto v0 = scalar_series(times, std::vector<double>(times.size(), 0.0), 2.0);
    std::vector<double> vals;
    for (double t : times) vals.push_back(std::cos(2 * t) + 0.3 * t);
    auto v1 = scalar_series(times, vals, vals[0]);
    for (double r : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
      auto rep0 = mollifier_norm_check(v0, 0.3, r, 1.0);
      auto rep1 = mollifier_norm_check(v1, 0.3, r, 1.0);
      pass = pass && rep0.lhs <= rep0.rhs + 1e-8 && rep1.lhs <= rep1.rhs + 1e-8;
    }
  }
  report(8, "ODE identity, closed form, norm bounds", pass, timer.seconds());
  CHECK(pass);
  CHECK(timer.seconds() < 5.0);
}

TEST_CASE("criterion 9: conjugate suite") {
  Stopwatch timer;
  bool pass = true;
  auto fq = quadratic_integrand(false);
  auto f4 = quartic_integrand(false);

  // Fenchel-Young equality cases
  for (auto& f : {fq, f4}) {
    for (double r : {0.5, 1.5, 3.0}) {
      for (int j = 0; j < 8; ++j) {
        double th = 2.0 * M_PI * j / 8 + 0.05;
        Vec2 xi{r * std::cos(th), r * std::sin(th)};
        double gap = f.eval(xi) + conjugate(f, f.grad(xi)) - dot(xi, f.grad(xi));
        pass = pass && std::abs(gap) <= 1e-8;
      }
    }
  }
  // gradient inversion on 1.1 <= |xi| <= 5
  for (auto& f : {fq, f4}) {
    for (double r : {1.1, 2.0, 3.5, 5.0}) {
      for (int j = 0; j < 16; ++j) {
        double th = 2.0 * M_PI * j / 16;
        Vec2 xi{r * std::cos(th), r * std::sin(th)};
        pass = pass && norm(grad_conjugate(f, f.grad(xi)) - xi) <= 1e-6;
      }
    }
  }
  // quartic conjugate against the closed form on a grid
  for (double r : {0.5, 1.0, 2.0, 4.0, 6.0}) {
    for (int j = 0; j < 12; ++j) {
      double th = 2.0 * M_PI * j / 12;
      Vec2 eta{r * std::cos(th), r * std::sin(th)};
      double closed = 0.75 * std::pow(norm2(eta), 2.0 / 3.0);
      pass = pass && std::abs(conjugate(f4, eta) - closed) <= 1e-6;
    }
  }
  report(9, "Fenchel-Young, inversion, quartic closed form", pass, timer.seconds());
  CHECK(pass);
  CHECK(timer.seconds() < 10.0);
}

TEST_CASE("criterion 10: slope certification") {
  Stopwatch timer;
  auto dom = disk_domain({0, 0}, 1.0);
  auto data = rotating_datum(dom, 1.0, 1.0, M_PI);

  bool pass = true;
  auto cert = certify_tbsc(data, dom, {-1.0, 0.0}, 65, 256);
  pass = pass && std::abs(cert.Q - 1.0) <= 1e-6;
  for (size_t k = 0; k < cert.times.size(); ++k) {
    Vec2 a{std::cos(cert.times[k]), std::sin(cert.times[k])};
    pass = pass && norm(cert.w_minus[k] - a) <= 1e-6 && norm(cert.w_plus[k] - a) <= 1e-6;
  }

  // a non't-BSC datum: cone apex on the boundary has no upper slope there
  bool infeasible_side = false;
  try {
    auto cusp = cusp_datum(dom, {-1.0, 0.0});
    certify_tbsc(cusp, dom, {-1.0, 0.0}, 3, 256);
  } catch (Infeasible& e) {
    infeasible_side = std::string(e.what()).find("upper") != std::string::npos;
  }
  pass = pass && infeasible_side;

  report(10, "rotating datum certified, cone rejected", pass, timer.seconds());
  CHECK(pass);
  CHECK(timer.seconds() < 10.0);
}
